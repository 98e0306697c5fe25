#ifndef SLOWFAST_BUDGET_SOLVER_H_
#define SLOWFAST_BUDGET_SOLVER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "slowfast/frame_analysis.h"

namespace slowfast {

struct GeometryConfig {
  int patch_px = 14;
  // Tokens are merge_factor x merge_factor groups of patches.
  int merge_factor = 2;
  std::int64_t min_tokens_per_frame = 4;
  std::int64_t max_tokens_per_frame = 16384;
  std::int64_t image_token_cap = 20480;
  std::int64_t video_token_budget = 75000;
  double fast_ratio = 0.3;

  // Side of one merged token in pixels.
  int unit_px() const { return patch_px * merge_factor; }

  void validate() const;
};

struct PatchGrid {
  int rows = 0;
  int cols = 0;
  int resized_h_px = 0;
  int resized_w_px = 0;

  std::int64_t tokens() const {
    return static_cast<std::int64_t>(rows) * cols;
  }
  bool operator==(const PatchGrid&) const = default;
};

struct FrameDims {
  int width_px = 0;
  int height_px = 0;
};

// Largest aspect-preserving grid with at most max_tokens tokens.
//
// The frame is scaled by one factor s in (0, 1] (never upscaled) and each
// axis is rounded half-up to a whole number of merged-token units, with at
// least one unit per axis. Among every (rows, cols) reachable this way the
// grid with the most tokens wins; ties go to the smaller aspect distortion,
// then to more rows.
PatchGrid fit_grid(int width_px, int height_px, std::int64_t max_tokens,
                   const GeometryConfig& cfg);

// Single-image encoding under cfg.image_token_cap.
PatchGrid fit_image(const FrameDims& dims, const GeometryConfig& cfg);

// floor(fast_ratio * slow_tokens), robust to the representation error of
// ratios like 0.3.
std::int64_t fast_tokens_for(std::int64_t slow_tokens, double fast_ratio);

// Largest T in [lo, hi] with total(T) <= budget, assuming total is
// non-decreasing. Returns lo - 1 when even total(lo) exceeds the budget.
std::int64_t max_feasible(std::int64_t lo, std::int64_t hi, std::int64_t budget,
                          const std::function<std::int64_t(std::int64_t)>& total);

struct BudgetPlan {
  std::int64_t tokens_per_slow = 0;
  std::int64_t tokens_per_fast = 0;
  std::vector<PatchGrid> grids;
  std::int64_t total_tokens = 0;
};

// Sum of quantized grid tokens when Slow frames get slow_tokens and Fast
// frames get fast_tokens_for(slow_tokens).
std::int64_t total_quantized_tokens(std::span<const FrameClass> classes,
                                    std::span<const FrameDims> dims,
                                    std::int64_t slow_tokens,
                                    const GeometryConfig& cfg);

// Binary search for the largest per-Slow-frame allowance whose quantized
// total fits cfg.video_token_budget. Throws BudgetTooSmallError when even
// cfg.min_tokens_per_frame does not fit.
BudgetPlan solve_video_budget(std::span<const FrameClass> classes,
                              std::span<const FrameDims> dims,
                              const GeometryConfig& cfg);

}  // namespace slowfast

#endif  // SLOWFAST_BUDGET_SOLVER_H_
