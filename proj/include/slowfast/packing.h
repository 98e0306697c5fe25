#ifndef SLOWFAST_PACKING_H_
#define SLOWFAST_PACKING_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slowfast {

inline constexpr std::int64_t kShortContextTokens = 8192;
inline constexpr std::int64_t kLongContextTokens = 131072;

enum class Modality { kVideo = 0, kImage = 1, kText = 2 };

inline constexpr std::size_t kModalityCount = 3;

const char* to_string(Modality m);
std::optional<Modality> modality_from_string(std::string_view name);

struct SequenceItem {
  std::string id;
  std::int64_t length_tokens = 1;
  Modality modality = Modality::kText;
  double est_cost = 0.0;
};

// Work estimate when a sample does not carry its own cost:
// alpha * vision_tokens + beta * text_tokens.
struct CostModel {
  double alpha = 2.0;
  double beta = 1.0;

  double estimate(std::int64_t vision_tokens, std::int64_t text_tokens) const {
    return alpha * static_cast<double>(vision_tokens) +
           beta * static_cast<double>(text_tokens);
  }
  // Whole item counted as vision (video/image) or text.
  double estimate(const SequenceItem& item) const;
};

struct PackedWindow {
  std::int64_t capacity = 0;
  std::vector<SequenceItem> items;
  // Start token of each item inside the window.
  std::vector<std::int64_t> offsets;
  // Per token: position of the owning item within this window.
  std::vector<std::int32_t> segment_ids;

  std::int64_t used_tokens() const;
};

// First-fit-decreasing by length (stable for equal lengths). Windows come out
// in creation order and items keep their insertion order inside a window.
// Throws OversizeItemError for an item longer than capacity.
std::vector<PackedWindow> pack_windows(std::span<const SequenceItem> items,
                                       std::int64_t capacity);

using ModalityTokens = std::array<std::int64_t, kModalityCount>;
using MixtureFractions = std::array<double, kModalityCount>;

// 24% video, 50% image, 26% text.
inline constexpr MixtureFractions kLongContextMixture = {0.24, 0.50, 0.26};

// Per-modality token targets for one window. Each modality gets its share
// of window_budget by the largest-remainder method; a modality short on
// supply is capped at what is available and the shortfall is spread over the
// others in proportion to their fractions. Targets sum to window_budget.
// Throws InfeasibleMixtureError when supply cannot cover the budget.
ModalityTokens plan_mixture(const ModalityTokens& available,
                            std::int64_t window_budget,
                            const MixtureFractions& fractions = kLongContextMixture);

struct WorkerAssignment {
  std::vector<std::vector<std::string>> assignments;
  std::vector<double> loads;

  double makespan() const;
};

// Longest-processing-time-first: items by est_cost descending (ties by id),
// each to the currently least-loaded worker (ties to the lowest index).
WorkerAssignment balance_workers(std::span<const SequenceItem> items,
                                 std::size_t n_workers);

}  // namespace slowfast

#endif  // SLOWFAST_PACKING_H_
