#ifndef SLOWFAST_IMAGE_IO_H_
#define SLOWFAST_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace slowfast {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB
};

// Binary (P6) or ASCII (P3) PPM with maxval <= 255.
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

// Any PNG, converted to 8-bit RGB (alpha dropped, gray expanded).
RgbImage read_png(const std::filesystem::path& path);

// Dispatches on the file signature.
RgbImage read_image(const std::filesystem::path& path);

// Width and height from the file header without decoding pixels.
std::pair<int, int> read_image_dims(const std::filesystem::path& path);

// Raw interleaved RGB bytes of known dimensions.
RgbImage read_raw_rgb(const std::filesystem::path& path, int width, int height);

}  // namespace slowfast

#endif  // SLOWFAST_IMAGE_IO_H_
