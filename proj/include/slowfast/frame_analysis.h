#ifndef SLOWFAST_FRAME_ANALYSIS_H_
#define SLOWFAST_FRAME_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace slowfast {

// One decoded video frame. Pixels are row-major interleaved RGB, 8 bits per
// channel, so pixels.size() == width_px * height_px * 3.
struct FrameRecord {
  std::size_t index = 0;
  double timestamp_s = 0.0;
  int width_px = 0;
  int height_px = 0;
  std::vector<std::uint8_t> pixels;
};

// Throws InvalidInputError on zero-sized frames or a pixel buffer whose size
// does not match the dimensions.
void validate_frame(const FrameRecord& frame);

struct SimilarityConfig {
  int grid_side = 8;
  double per_patch_tol = 0.05;
  // A frame is Fast when its unchanged fraction against the latest Slow
  // frame is strictly greater than this.
  double threshold = 0.95;
  // Both frames are area-resampled to compare_size x compare_size first.
  int compare_size = 224;

  void validate() const;
};

struct SimilarityReport {
  std::size_t anchor_index = 0;
  std::size_t target_index = 0;
  int grid_side = 0;
  double unchanged_fraction = 0.0;
};

enum class FrameKind { kSlow, kFast };

const char* to_string(FrameKind kind);

struct FrameClass {
  std::size_t index = 0;
  FrameKind kind = FrameKind::kSlow;
  // Latest Slow frame this frame was compared to; a Slow frame anchors itself.
  std::size_t anchor_index = 0;

  bool operator==(const FrameClass&) const = default;
};

// Area-averaging resampler over interleaved channels. Every output sample is
// the exact coverage-weighted mean of the source samples under it.
std::vector<double> area_resample(std::span<const double> src, int width,
                                  int height, int channels, int out_width,
                                  int out_height);

// Per-patch mean colors of a frame in [0, 1], grid_side x grid_side x 3,
// computed in the common comparison space. Two signatures with the same
// grid_side can be compared regardless of the source frame dimensions.
struct PatchSignature {
  int grid_side = 0;
  std::vector<double> patch_means;
};

PatchSignature patch_signature(const FrameRecord& frame, int grid_side,
                               int compare_size = 224);

// Fraction of patches whose mean absolute per-channel difference is below
// per_patch_tol. Patches with zero difference always count as unchanged, so
// any frame is fully unchanged against itself even at tolerance 0.
double unchanged_fraction(const PatchSignature& a, const PatchSignature& b,
                          double per_patch_tol);

SimilarityReport patch_similarity(const FrameRecord& a, const FrameRecord& b,
                                  int grid_side, double per_patch_tol,
                                  int compare_size = 224);

struct Classification {
  std::vector<FrameClass> classes;
  // One report per frame after the first, comparing it with its anchor
  // candidate (the latest Slow frame at the time).
  std::vector<SimilarityReport> reports;
};

// Slow/Fast rule over precomputed signatures: frame 0 is Slow; every later
// frame is Fast iff its unchanged fraction against the latest Slow frame
// exceeds cfg.threshold, and becomes the new Slow anchor otherwise.
Classification classify_signatures(std::span<const PatchSignature> signatures,
                                   const SimilarityConfig& cfg);

Classification classify_frames_with_reports(std::span<const FrameRecord> frames,
                                            const SimilarityConfig& cfg);

std::vector<FrameClass> classify_frames(std::span<const FrameRecord> frames,
                                        const SimilarityConfig& cfg = {});

}  // namespace slowfast

#endif  // SLOWFAST_FRAME_ANALYSIS_H_
