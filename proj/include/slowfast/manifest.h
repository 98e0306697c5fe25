#ifndef SLOWFAST_MANIFEST_H_
#define SLOWFAST_MANIFEST_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slowfast/budget_solver.h"
#include "slowfast/frame_analysis.h"

namespace slowfast {

// Where a frame's pixels come from.
enum class FrameSourceKind {
  kImageFile,  // PNG or PPM on disk
  kRawRgb,     // headerless RGB bytes with explicit width/height
  kFill,       // synthetic solid color with explicit width/height
};

struct ManifestFrame {
  FrameSourceKind source = FrameSourceKind::kImageFile;
  std::filesystem::path path;  // resolved against the manifest directory
  int width = 0;
  int height = 0;
  std::array<std::uint8_t, 3> fill{};
  std::optional<double> timestamp_s;
};

// Pre-decoded video frames, e.g.
//   {"version": "1", "fps": 2.0,
//    "frames": [{"path": "f000.png"},
//               {"raw": "f001.rgb", "width": 64, "height": 48},
//               {"fill": [0, 0, 0], "width": 640, "height": 360,
//                "timestamp_s": 1.0}]}
// A frame without timestamp_s sits at index / fps.
struct FrameManifest {
  std::string version = "1";
  std::optional<double> fps;
  std::vector<ManifestFrame> frames;

  // Throws InvalidInputError when a timestamp cannot be derived or the
  // timestamps do not strictly increase.
  std::vector<double> timestamps() const;
};

FrameManifest load_manifest(const std::filesystem::path& path);

// Decodes frame i (pixels included) with its timestamp.
FrameRecord load_frame(const FrameManifest& manifest, std::size_t i,
                       double timestamp_s);

// Frame dimensions without decoding pixel data.
FrameDims frame_dims(const ManifestFrame& frame);

}  // namespace slowfast

#endif  // SLOWFAST_MANIFEST_H_
