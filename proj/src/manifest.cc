#include "slowfast/manifest.h"

#include <cmath>
#include <fstream>

#include "json_util.h"
#include "slowfast/error.h"
#include "slowfast/image_io.h"
#include "slowfast/json_io.h"

namespace slowfast {

using detail::check_keys;
using detail::get_as;

std::vector<double> FrameManifest::timestamps() const {
  std::vector<double> ts;
  ts.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].timestamp_s) {
      ts.push_back(*frames[i].timestamp_s);
    } else if (fps) {
      ts.push_back(static_cast<double>(i) / *fps);
    } else {
      throw InvalidInputError("frame " + std::to_string(i) +
                              " has no timestamp_s and the manifest has no fps");
    }
    if (!std::isfinite(ts.back()) || ts.back() < 0.0) {
      throw InvalidInputError("frame " + std::to_string(i) + " has a negative timestamp");
    }
    if (i > 0 && !(ts[i] > ts[i - 1])) {
      throw InvalidInputError("timestamps must strictly increase (frame " +
                              std::to_string(i) + ")");
    }
  }
  return ts;
}

FrameManifest manifest_from_json(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"version", "fps", "frames"}, "manifest");
  FrameManifest m;
  if (j.contains("version")) m.version = get_as<std::string>(j["version"], "manifest.version");
  if (j.contains("fps")) {
    const double fps = get_as<double>(j["fps"], "manifest.fps");
    if (!(fps > 0.0) || !std::isfinite(fps)) throw InvalidInputError("manifest.fps must be > 0");
    m.fps = fps;
  }
  if (!j.contains("frames") || !j["frames"].is_array()) {
    throw InvalidInputError("manifest.frames must be an array");
  }

  const auto& frames = j["frames"];
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string where = "manifest.frames[" + std::to_string(i) + "]";
    const Json& f = frames[i];
    check_keys(f, {"path", "raw", "fill", "width", "height", "timestamp_s"}, where);
    ManifestFrame mf;
    const int sources = static_cast<int>(f.contains("path")) + static_cast<int>(f.contains("raw")) +
                        static_cast<int>(f.contains("fill"));
    if (sources != 1) throw InvalidInputError(where + ": exactly one of path/raw/fill is required");
    if (f.contains("path")) {
      mf.source = FrameSourceKind::kImageFile;
      mf.path = base_dir / get_as<std::string>(f["path"], where + ".path");
    } else {
      if (!f.contains("width") || !f.contains("height")) {
        throw InvalidInputError(where + ": raw and fill frames need width and height");
      }
      mf.width = get_as<int>(f["width"], where + ".width");
      mf.height = get_as<int>(f["height"], where + ".height");
      if (mf.width < 1 || mf.height < 1) throw InvalidInputError(where + ": zero-sized frame");
      if (f.contains("raw")) {
        mf.source = FrameSourceKind::kRawRgb;
        mf.path = base_dir / get_as<std::string>(f["raw"], where + ".raw");
      } else {
        mf.source = FrameSourceKind::kFill;
        const auto rgb = get_as<std::vector<int>>(f["fill"], where + ".fill");
        if (rgb.size() != 3) throw InvalidInputError(where + ".fill must be [r, g, b]");
        for (int c = 0; c < 3; ++c) {
          if (rgb[c] < 0 || rgb[c] > 255) throw InvalidInputError(where + ".fill out of 0..255");
          mf.fill[c] = static_cast<std::uint8_t>(rgb[c]);
        }
      }
    }
    if (f.contains("timestamp_s")) mf.timestamp_s = get_as<double>(f["timestamp_s"], where + ".timestamp_s");
    m.frames.push_back(std::move(mf));
  }
  m.timestamps();  // rejects missing or non-increasing timestamps up front
  return m;
}

FrameManifest load_manifest(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  return manifest_from_json(j, path.parent_path());
}

FrameRecord load_frame(const FrameManifest& manifest, std::size_t i, double timestamp_s) {
  const ManifestFrame& mf = manifest.frames.at(i);
  RgbImage img;
  switch (mf.source) {
    case FrameSourceKind::kImageFile:
      img = read_image(mf.path);
      break;
    case FrameSourceKind::kRawRgb:
      img = read_raw_rgb(mf.path, mf.width, mf.height);
      break;
    case FrameSourceKind::kFill: {
      img.width = mf.width;
      img.height = mf.height;
      img.pixels.resize(static_cast<std::size_t>(mf.width) * mf.height * 3);
      for (std::size_t p = 0; p < img.pixels.size(); p += 3) {
        img.pixels[p] = mf.fill[0];
        img.pixels[p + 1] = mf.fill[1];
        img.pixels[p + 2] = mf.fill[2];
      }
      break;
    }
  }
  FrameRecord rec;
  rec.index = i;
  rec.timestamp_s = timestamp_s;
  rec.width_px = img.width;
  rec.height_px = img.height;
  rec.pixels = std::move(img.pixels);
  return rec;
}

FrameDims frame_dims(const ManifestFrame& frame) {
  if (frame.source == FrameSourceKind::kImageFile) {
    const auto [w, h] = read_image_dims(frame.path);
    return {w, h};
  }
  return {frame.width, frame.height};
}

}  // namespace slowfast
