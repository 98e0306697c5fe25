#ifndef SLOWFAST_SEQUENCE_ASSEMBLY_H_
#define SLOWFAST_SEQUENCE_ASSEMBLY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slowfast/budget_solver.h"
#include "slowfast/frame_analysis.h"

namespace slowfast {

struct SpecialTokenNames {
  std::string slow = "<|slow_frame|>";
  std::string fast = "<|fast_frame|>";
};

// Layout elements. Special tokens, timestamps and text spans occupy text
// positions; a vision block occupies rows x cols positions.
struct SpecialToken {
  std::string name;
  bool operator==(const SpecialToken&) const = default;
};

// Plain text of a known token length, for layouts that mix in prompt text.
struct TextSpan {
  std::int64_t n_tokens = 1;
  bool operator==(const TextSpan&) const = default;
};

// Absolute timestamp rendered as text; one text position.
struct TimestampText {
  double seconds = 0.0;
  std::string text;
  bool operator==(const TimestampText&) const = default;
};

enum class VisionKind { kSlow, kFast, kImage };

const char* to_string(VisionKind kind);

struct VisionBlock {
  std::size_t frame_index = 0;
  PatchGrid grid;
  VisionKind kind = VisionKind::kSlow;
  bool operator==(const VisionBlock&) const = default;
};

using LayoutElement = std::variant<SpecialToken, TextSpan, TimestampText, VisionBlock>;

struct TokenLayout {
  std::vector<LayoutElement> elements;
};

// "{t:.1f}s", e.g. 22.34 -> "22.3s".
std::string render_timestamp(double seconds);

// Per frame: boundary token for its kind, its timestamp, its vision block.
TokenLayout assemble_layout(std::span<const FrameClass> classes,
                            const BudgetPlan& plan,
                            std::span<const double> timestamps,
                            const SpecialTokenNames& names = {});

// Images carry no boundary tokens or timestamps.
TokenLayout assemble_image_layout(std::span<const PatchGrid> grids);

std::int64_t vision_token_total(const TokenLayout& layout);

// Total positions the layout occupies in the LLM sequence.
std::int64_t sequence_length(const TokenLayout& layout);

}  // namespace slowfast

#endif  // SLOWFAST_SEQUENCE_ASSEMBLY_H_
