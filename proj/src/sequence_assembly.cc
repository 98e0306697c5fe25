#include "slowfast/sequence_assembly.h"

#include <cmath>
#include <cstdio>

#include "slowfast/error.h"

namespace slowfast {

const char* to_string(VisionKind kind) {
  switch (kind) {
    case VisionKind::kSlow:
      return "slow";
    case VisionKind::kFast:
      return "fast";
    case VisionKind::kImage:
      return "image";
  }
  return "image";
}

std::string render_timestamp(double seconds) {
  if (!std::isfinite(seconds) || seconds < 0.0) {
    throw InvalidInputError("timestamps must be finite and non-negative");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1fs", seconds);
  return buf;
}

TokenLayout assemble_layout(std::span<const FrameClass> classes,
                            const BudgetPlan& plan,
                            std::span<const double> timestamps,
                            const SpecialTokenNames& names) {
  if (classes.size() != plan.grids.size() || classes.size() != timestamps.size()) {
    throw InvalidInputError("classes, plan grids and timestamps are misaligned (" +
                            std::to_string(classes.size()) + ", " +
                            std::to_string(plan.grids.size()) + ", " +
                            std::to_string(timestamps.size()) + ")");
  }
  TokenLayout layout;
  layout.elements.reserve(classes.size() * 3);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const bool slow = classes[i].kind == FrameKind::kSlow;
    layout.elements.emplace_back(SpecialToken{slow ? names.slow : names.fast});
    layout.elements.emplace_back(
        TimestampText{timestamps[i], render_timestamp(timestamps[i])});
    layout.elements.emplace_back(VisionBlock{
        classes[i].index, plan.grids[i], slow ? VisionKind::kSlow : VisionKind::kFast});
  }
  return layout;
}

TokenLayout assemble_image_layout(std::span<const PatchGrid> grids) {
  TokenLayout layout;
  layout.elements.reserve(grids.size());
  for (std::size_t i = 0; i < grids.size(); ++i) {
    layout.elements.emplace_back(VisionBlock{i, grids[i], VisionKind::kImage});
  }
  return layout;
}

std::int64_t vision_token_total(const TokenLayout& layout) {
  std::int64_t total = 0;
  for (const auto& e : layout.elements) {
    if (const auto* block = std::get_if<VisionBlock>(&e)) total += block->grid.tokens();
  }
  return total;
}

std::int64_t sequence_length(const TokenLayout& layout) {
  std::int64_t n = 0;
  for (const auto& e : layout.elements) {
    if (const auto* block = std::get_if<VisionBlock>(&e)) {
      n += block->grid.tokens();
    } else if (const auto* span = std::get_if<TextSpan>(&e)) {
      n += span->n_tokens;
    } else {
      n += 1;
    }
  }
  return n;
}

}  // namespace slowfast
