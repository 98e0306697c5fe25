#include "slowfast/frame_analysis.h"

#include <cmath>
#include <string>

#include "slowfast/error.h"
#include "slowfast/parallel.h"

namespace slowfast {
namespace {

struct Tap {
  int src;
  double weight;
};

// For each output index, the source samples it covers and their weights.
// Source sample i spans [i*out, (i+1)*out) and output x spans
// [x*in, (x+1)*in) on a common integer axis, so overlaps are exact.
std::vector<std::vector<Tap>> axis_taps(int in, int out) {
  std::vector<std::vector<Tap>> taps(out);
  const std::int64_t in64 = in;
  const std::int64_t out64 = out;
  for (std::int64_t x = 0; x < out64; ++x) {
    const std::int64_t lo = x * in64;
    const std::int64_t hi = (x + 1) * in64;
    const std::int64_t first = lo / out64;
    const std::int64_t last = (hi + out64 - 1) / out64;
    for (std::int64_t i = first; i < last; ++i) {
      const std::int64_t overlap =
          std::min(hi, (i + 1) * out64) - std::max(lo, i * out64);
      if (overlap > 0) {
        taps[x].push_back({static_cast<int>(i),
                           static_cast<double>(overlap) /
                               static_cast<double>(in64)});
      }
    }
  }
  return taps;
}

template <typename T>
std::vector<double> resample(const T* src, int width, int height, int channels,
                             int out_width, int out_height) {
  const auto htaps = axis_taps(width, out_width);
  const auto vtaps = axis_taps(height, out_height);

  // Horizontal pass: height x out_width.
  std::vector<double> tmp(static_cast<std::size_t>(height) * out_width *
                          channels);
  for (int y = 0; y < height; ++y) {
    const T* row = src + static_cast<std::size_t>(y) * width * channels;
    double* dst = tmp.data() + static_cast<std::size_t>(y) * out_width * channels;
    for (int x = 0; x < out_width; ++x) {
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (const Tap& t : htaps[x]) {
          acc += t.weight * static_cast<double>(row[t.src * channels + c]);
        }
        dst[x * channels + c] = acc;
      }
    }
  }

  std::vector<double> out(static_cast<std::size_t>(out_height) * out_width *
                          channels);
  const std::size_t stride = static_cast<std::size_t>(out_width) * channels;
  for (int y = 0; y < out_height; ++y) {
    double* dst = out.data() + y * stride;
    for (const Tap& t : vtaps[y]) {
      const double* srow = tmp.data() + t.src * stride;
      for (std::size_t k = 0; k < stride; ++k) dst[k] += t.weight * srow[k];
    }
  }
  return out;
}

void check_dims(int width, int height, int channels, std::size_t size) {
  if (width < 1 || height < 1 || channels < 1) {
    throw InvalidInputError("zero-sized image");
  }
  if (size != static_cast<std::size_t>(width) * height * channels) {
    throw InvalidInputError("sample buffer does not match image dimensions");
  }
}

}  // namespace

const char* to_string(FrameKind kind) {
  return kind == FrameKind::kSlow ? "slow" : "fast";
}

void validate_frame(const FrameRecord& frame) {
  if (frame.width_px < 1 || frame.height_px < 1) {
    throw InvalidInputError("frame " + std::to_string(frame.index) +
                            " is zero-sized");
  }
  const std::size_t expected =
      static_cast<std::size_t>(frame.width_px) * frame.height_px * 3;
  if (frame.pixels.size() != expected) {
    throw InvalidInputError("frame " + std::to_string(frame.index) + " has " +
                            std::to_string(frame.pixels.size()) +
                            " bytes, expected " + std::to_string(expected));
  }
}

void SimilarityConfig::validate() const {
  if (grid_side < 1) throw InvalidConfigError("grid_side must be >= 1");
  if (!(per_patch_tol >= 0.0)) {
    throw InvalidConfigError("per_patch_tol must be >= 0");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidConfigError("threshold must lie in [0, 1]");
  }
  if (compare_size < 1) throw InvalidConfigError("compare_size must be >= 1");
}

std::vector<double> area_resample(std::span<const double> src, int width,
                                  int height, int channels, int out_width,
                                  int out_height) {
  check_dims(width, height, channels, src.size());
  if (out_width < 1 || out_height < 1) {
    throw InvalidInputError("resample target must be at least 1x1");
  }
  return resample(src.data(), width, height, channels, out_width, out_height);
}

PatchSignature patch_signature(const FrameRecord& frame, int grid_side,
                               int compare_size) {
  validate_frame(frame);
  if (grid_side < 1) throw InvalidInputError("grid_side must be >= 1");
  if (compare_size < 1) throw InvalidInputError("compare_size must be >= 1");

  const auto common = resample(frame.pixels.data(), frame.width_px,
                               frame.height_px, 3, compare_size, compare_size);
  PatchSignature sig;
  sig.grid_side = grid_side;
  sig.patch_means =
      resample(common.data(), compare_size, compare_size, 3, grid_side, grid_side);
  for (double& v : sig.patch_means) v /= 255.0;
  return sig;
}

double unchanged_fraction(const PatchSignature& a, const PatchSignature& b,
                          double per_patch_tol) {
  if (a.grid_side != b.grid_side || a.patch_means.size() != b.patch_means.size()) {
    throw InvalidInputError("patch signatures use different grids");
  }
  if (!(per_patch_tol >= 0.0)) throw InvalidInputError("per_patch_tol must be >= 0");
  const std::size_t patches = a.patch_means.size() / 3;
  if (patches == 0) throw InvalidInputError("empty patch signature");

  std::size_t unchanged = 0;
  for (std::size_t p = 0; p < patches; ++p) {
    const double* pa = &a.patch_means[p * 3];
    const double* pb = &b.patch_means[p * 3];
    const double diff = (std::abs(pa[0] - pb[0]) + std::abs(pa[1] - pb[1]) +
                         std::abs(pa[2] - pb[2])) /
                        3.0;
    if (diff == 0.0 || diff < per_patch_tol) ++unchanged;
  }
  return static_cast<double>(unchanged) / static_cast<double>(patches);
}

SimilarityReport patch_similarity(const FrameRecord& a, const FrameRecord& b,
                                  int grid_side, double per_patch_tol,
                                  int compare_size) {
  if (!(per_patch_tol >= 0.0)) throw InvalidInputError("per_patch_tol must be >= 0");
  const PatchSignature sa = patch_signature(a, grid_side, compare_size);
  const PatchSignature sb = patch_signature(b, grid_side, compare_size);
  return SimilarityReport{a.index, b.index, grid_side,
                          unchanged_fraction(sa, sb, per_patch_tol)};
}

Classification classify_signatures(std::span<const PatchSignature> signatures,
                                   const SimilarityConfig& cfg) {
  cfg.validate();
  if (signatures.empty()) throw InvalidInputError("no frames to classify");

  Classification out;
  out.classes.reserve(signatures.size());
  out.reports.reserve(signatures.size() - 1);
  out.classes.push_back({0, FrameKind::kSlow, 0});
  std::size_t anchor = 0;
  for (std::size_t i = 1; i < signatures.size(); ++i) {
    const double fraction =
        unchanged_fraction(signatures[anchor], signatures[i], cfg.per_patch_tol);
    out.reports.push_back({anchor, i, cfg.grid_side, fraction});
    if (fraction > cfg.threshold) {
      out.classes.push_back({i, FrameKind::kFast, anchor});
    } else {
      out.classes.push_back({i, FrameKind::kSlow, i});
      anchor = i;
    }
  }
  return out;
}

Classification classify_frames_with_reports(std::span<const FrameRecord> frames,
                                            const SimilarityConfig& cfg) {
  cfg.validate();
  if (frames.empty()) throw InvalidInputError("no frames to classify");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].index != i) {
      throw InvalidInputError("frame at position " + std::to_string(i) +
                              " carries index " +
                              std::to_string(frames[i].index));
    }
    if (i > 0 && !(frames[i].timestamp_s > frames[i - 1].timestamp_s)) {
      throw InvalidInputError("timestamps must strictly increase (frame " +
                              std::to_string(i) + ")");
    }
  }

  std::vector<PatchSignature> sigs(frames.size());
  parallel_for(frames.size(), [&](std::size_t i) {
    sigs[i] = patch_signature(frames[i], cfg.grid_side, cfg.compare_size);
  });
  return classify_signatures(sigs, cfg);
}

std::vector<FrameClass> classify_frames(std::span<const FrameRecord> frames,
                                        const SimilarityConfig& cfg) {
  return classify_frames_with_reports(frames, cfg).classes;
}

}  // namespace slowfast
