#include "slowfast/budget_solver.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "slowfast/error.h"

namespace slowfast {
namespace {

using i64 = std::int64_t;
using i128 = __int128;

// Axis distortion of a (rows, cols) grid against a W x H frame, kept as the
// exact ratio max(c*H, r*W) / min(c*H, r*W).
struct Distortion {
  i128 num;
  i128 den;

  bool operator<(const Distortion& o) const { return num * o.den < o.num * den; }
  bool operator==(const Distortion& o) const { return num * o.den == o.num * den; }
};

Distortion distortion(i64 rows, i64 cols, i64 width, i64 height) {
  const i128 a = static_cast<i128>(cols) * height;
  const i128 b = static_cast<i128>(rows) * width;
  return a >= b ? Distortion{a, b} : Distortion{b, a};
}

// Whether candidate (r1, c1) beats (r2, c2).
bool better(i64 r1, i64 c1, i64 r2, i64 c2, i64 width, i64 height) {
  const i64 t1 = r1 * c1;
  const i64 t2 = r2 * c2;
  if (t1 != t2) return t1 > t2;
  const Distortion d1 = distortion(r1, c1, width, height);
  const Distortion d2 = distortion(r2, c2, width, height);
  if (!(d1 == d2)) return d1 < d2;
  return r1 > r2;
}

// round-half-up(n / d) for positive operands, floored at one unit.
i64 round_units(i64 n, i64 d) { return std::max<i64>(1, (2 * n + d) / (2 * d)); }

}  // namespace

void GeometryConfig::validate() const {
  if (patch_px < 1) throw InvalidConfigError("patch_px must be >= 1");
  if (merge_factor < 1) throw InvalidConfigError("merge_factor must be >= 1");
  if (!(fast_ratio > 0.0 && fast_ratio <= 1.0)) {
    throw InvalidConfigError("fast_ratio must lie in (0, 1]");
  }
  if (min_tokens_per_frame < 1) {
    throw InvalidConfigError("min_tokens_per_frame must be >= 1");
  }
  if (min_tokens_per_frame > max_tokens_per_frame ||
      max_tokens_per_frame > video_token_budget) {
    throw InvalidConfigError(
        "need min_tokens_per_frame <= max_tokens_per_frame <= "
        "video_token_budget");
  }
  if (fast_tokens_for(min_tokens_per_frame, fast_ratio) < 1) {
    throw InvalidConfigError(
        "fast_ratio * min_tokens_per_frame must allow at least one token");
  }
  if (image_token_cap < 1) throw InvalidConfigError("image_token_cap must be >= 1");
}

PatchGrid fit_grid(int width_px, int height_px, std::int64_t max_tokens,
                   const GeometryConfig& cfg) {
  if (width_px < 1 || height_px < 1) {
    throw InvalidInputError("frame dimensions must be positive");
  }
  if (max_tokens < 1) throw InvalidInputError("max_tokens must be >= 1");
  if (cfg.patch_px < 1 || cfg.merge_factor < 1) {
    throw InvalidConfigError("patch_px and merge_factor must be >= 1");
  }

  const i64 u = cfg.unit_px();
  const i64 w = width_px;
  const i64 h = height_px;
  const i64 max_rows = round_units(h, u);
  const i64 full_cols = round_units(w, u);

  // rows(s) = max(1, round(s*h/u)) is a step function of the scale s. For
  // each attainable row count r, find the scale interval producing it and the
  // range of column counts attainable inside that interval.
  i64 best_r = 1;
  i64 best_c = 1;
  for (i64 r = 1; r <= max_rows && r <= max_tokens; ++r) {
    // Lowest column count: value at the interval's left end (s -> 0 for r=1).
    const i64 c_lo =
        r == 1 ? 1 : std::max<i64>(1, ((2 * r - 1) * w + h) / (2 * h));
    // Highest: either the value at s = 1 (interval reaches the top) or the
    // value just below the next row breakpoint.
    i64 c_hi;
    if ((2 * r + 1) * u > 2 * h) {
      c_hi = full_cols;
    } else {
      c_hi = std::max<i64>(1, ((2 * r + 1) * w + h - 1) / (2 * h));
    }
    const i64 c = std::min(c_hi, max_tokens / r);
    if (c < c_lo) continue;
    if (better(r, c, best_r, best_c, w, h)) {
      best_r = r;
      best_c = c;
    }
  }

  PatchGrid grid;
  grid.rows = static_cast<int>(best_r);
  grid.cols = static_cast<int>(best_c);
  grid.resized_h_px = static_cast<int>(best_r * u);
  grid.resized_w_px = static_cast<int>(best_c * u);
  return grid;
}

PatchGrid fit_image(const FrameDims& dims, const GeometryConfig& cfg) {
  return fit_grid(dims.width_px, dims.height_px, cfg.image_token_cap, cfg);
}

std::int64_t fast_tokens_for(std::int64_t slow_tokens, double fast_ratio) {
  return static_cast<i64>(
      std::floor(fast_ratio * static_cast<double>(slow_tokens) + 1e-9));
}

std::int64_t max_feasible(std::int64_t lo, std::int64_t hi, std::int64_t budget,
                          const std::function<std::int64_t(std::int64_t)>& total) {
  if (lo > hi) return lo - 1;
  if (total(lo) > budget) return lo - 1;
  // Invariant: total(lo) <= budget; answer in [lo, hi].
  while (lo < hi) {
    const i64 mid = lo + (hi - lo + 1) / 2;
    if (total(mid) <= budget) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

namespace {

void check_plan_inputs(std::span<const FrameClass> classes,
                       std::span<const FrameDims> dims) {
  if (classes.empty()) throw InvalidInputError("no frames to plan");
  if (classes.size() != dims.size()) {
    throw InvalidInputError("frame classes and dimensions are misaligned");
  }
  if (classes.front().kind != FrameKind::kSlow) {
    throw InvalidInputError("frame 0 must be Slow");
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].width_px < 1 || dims[i].height_px < 1) {
      throw InvalidInputError("frame " + std::to_string(i) + " is zero-sized");
    }
  }
}

}  // namespace

std::int64_t total_quantized_tokens(std::span<const FrameClass> classes,
                                    std::span<const FrameDims> dims,
                                    std::int64_t slow_tokens,
                                    const GeometryConfig& cfg) {
  check_plan_inputs(classes, dims);
  // Videos repeat the same dimensions, so fit each distinct shape once.
  std::map<std::tuple<int, int, bool>, i64> counts;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    ++counts[{dims[i].width_px, dims[i].height_px,
              classes[i].kind == FrameKind::kSlow}];
  }
  const i64 fast_tokens = std::max<i64>(1, fast_tokens_for(slow_tokens, cfg.fast_ratio));
  i64 total = 0;
  for (const auto& [key, n] : counts) {
    const auto& [w, h, slow] = key;
    total += n * fit_grid(w, h, slow ? slow_tokens : fast_tokens, cfg).tokens();
  }
  return total;
}

BudgetPlan solve_video_budget(std::span<const FrameClass> classes,
                              std::span<const FrameDims> dims,
                              const GeometryConfig& cfg) {
  cfg.validate();
  check_plan_inputs(classes, dims);

  auto total = [&](i64 t) { return total_quantized_tokens(classes, dims, t, cfg); };
  const i64 t = max_feasible(cfg.min_tokens_per_frame, cfg.max_tokens_per_frame,
                             cfg.video_token_budget, total);
  if (t < cfg.min_tokens_per_frame) {
    throw BudgetTooSmallError(total(cfg.min_tokens_per_frame),
                              cfg.video_token_budget);
  }

  BudgetPlan plan;
  plan.tokens_per_slow = t;
  plan.tokens_per_fast = fast_tokens_for(t, cfg.fast_ratio);
  plan.grids.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const i64 allowance = classes[i].kind == FrameKind::kSlow
                              ? plan.tokens_per_slow
                              : plan.tokens_per_fast;
    plan.grids.push_back(
        fit_grid(dims[i].width_px, dims[i].height_px, allowance, cfg));
    plan.total_tokens += plan.grids.back().tokens();
  }
  return plan;
}

}  // namespace slowfast
