#include "slowfast/image_io.h"

#include <png.h>

#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <string>

#include "slowfast/error.h"

namespace slowfast {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const fs::path& path, const std::string& why) {
  throw InvalidInputError("cannot decode '" + path.string() + "': " + why);
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

struct PpmHeader {
  bool binary = true;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

PpmHeader read_ppm_header(std::istream& in, const fs::path& path) {
  PpmHeader h;
  const std::string magic = header_token(in);
  if (magic == "P6") {
    h.binary = true;
  } else if (magic == "P3") {
    h.binary = false;
  } else {
    fail(path, "not a P3/P6 PPM file");
  }
  try {
    h.width = std::stoi(header_token(in));
    h.height = std::stoi(header_token(in));
    h.maxval = std::stoi(header_token(in));
  } catch (const std::exception&) {
    fail(path, "malformed PPM header");
  }
  if (h.width < 1 || h.height < 1) fail(path, "zero-sized image");
  if (h.maxval < 1 || h.maxval > 255) fail(path, "only 8-bit PPM is supported");
  return h;
}

bool is_png(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<unsigned char, 8> sig{};
  in.read(reinterpret_cast<char*>(sig.data()), sig.size());
  return in.gcount() == 8 && png_sig_cmp(sig.data(), 0, 8) == 0;
}

}  // namespace

RgbImage read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "file cannot be opened");
  const PpmHeader h = read_ppm_header(in, path);

  RgbImage img;
  img.width = h.width;
  img.height = h.height;
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height * 3;
  img.pixels.resize(n);
  if (h.binary) {
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) fail(path, "truncated pixel data");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      int v = -1;
      if (!(in >> v) || v < 0 || v > h.maxval) fail(path, "malformed ASCII pixel data");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  if (h.maxval != 255) {
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>((p * 255 + h.maxval / 2) / h.maxval);
  }
  return img;
}

void write_ppm(const fs::path& path, const RgbImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write '" + path.string() + "'");
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

RgbImage read_png(const fs::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    fail(path, png.message);
  }
  // Decode with alpha and drop it; asking for RGB would composite onto black.
  png.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, rgba.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    fail(path, msg);
  }
  RgbImage img;
  img.width = static_cast<int>(png.width);
  img.height = static_cast<int>(png.height);
  img.pixels.resize(rgba.size() / 4 * 3);
  for (std::size_t p = 0, q = 0; p < rgba.size(); p += 4, q += 3) {
    img.pixels[q] = rgba[p];
    img.pixels[q + 1] = rgba[p + 1];
    img.pixels[q + 2] = rgba[p + 2];
  }
  return img;
}

RgbImage read_image(const fs::path& path) {
  if (!fs::exists(path)) fail(path, "file not found");
  return is_png(path) ? read_png(path) : read_ppm(path);
}

std::pair<int, int> read_image_dims(const fs::path& path) {
  if (!fs::exists(path)) fail(path, "file not found");
  if (is_png(path)) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) fail(path, png.message);
    const std::pair<int, int> dims{static_cast<int>(png.width), static_cast<int>(png.height)};
    png_image_free(&png);
    return dims;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "file cannot be opened");
  const PpmHeader h = read_ppm_header(in, path);
  return {h.width, h.height};
}

RgbImage read_raw_rgb(const fs::path& path, int width, int height) {
  if (width < 1 || height < 1) fail(path, "raw frame needs positive width and height");
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "file cannot be opened");
  RgbImage img;
  img.width = width;
  img.height = height;
  const std::size_t n = static_cast<std::size_t>(width) * height * 3;
  img.pixels.resize(n);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    fail(path, "expected " + std::to_string(n) + " bytes of RGB data");
  }
  return img;
}

}  // namespace slowfast
