#include "slowfast/packing.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slowfast/error.h"

namespace slowfast {

const char* to_string(Modality m) {
  switch (m) {
    case Modality::kVideo:
      return "video";
    case Modality::kImage:
      return "image";
    case Modality::kText:
      return "text";
  }
  return "text";
}

std::optional<Modality> modality_from_string(std::string_view name) {
  if (name == "video") return Modality::kVideo;
  if (name == "image") return Modality::kImage;
  if (name == "text") return Modality::kText;
  return std::nullopt;
}

double CostModel::estimate(const SequenceItem& item) const {
  return item.modality == Modality::kText ? estimate(0, item.length_tokens)
                                          : estimate(item.length_tokens, 0);
}

std::int64_t PackedWindow::used_tokens() const {
  std::int64_t n = 0;
  for (const auto& item : items) n += item.length_tokens;
  return n;
}

std::vector<PackedWindow> pack_windows(std::span<const SequenceItem> items,
                                       std::int64_t capacity) {
  if (capacity < 1) throw InvalidInputError("window capacity must be >= 1");
  for (const auto& item : items) {
    if (item.length_tokens < 1) {
      throw InvalidInputError("item '" + item.id + "' has no tokens");
    }
    if (item.length_tokens > capacity) {
      throw OversizeItemError(item.id, item.length_tokens, capacity);
    }
  }

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].length_tokens > items[b].length_tokens;
  });

  std::vector<PackedWindow> windows;
  std::vector<std::int64_t> free_space;
  for (std::size_t idx : order) {
    const SequenceItem& item = items[idx];
    std::size_t w = 0;
    while (w < windows.size() && free_space[w] < item.length_tokens) ++w;
    if (w == windows.size()) {
      windows.push_back(PackedWindow{capacity, {}, {}, {}});
      free_space.push_back(capacity);
    }
    PackedWindow& win = windows[w];
    const auto segment = static_cast<std::int32_t>(win.items.size());
    win.offsets.push_back(capacity - free_space[w]);
    win.segment_ids.insert(win.segment_ids.end(),
                           static_cast<std::size_t>(item.length_tokens), segment);
    win.items.push_back(item);
    free_space[w] -= item.length_tokens;
  }
  return windows;
}

ModalityTokens plan_mixture(const ModalityTokens& available,
                            std::int64_t window_budget,
                            const MixtureFractions& fractions) {
  if (window_budget < 0) throw InvalidInputError("window budget must be >= 0");
  double fsum = 0.0;
  for (std::size_t m = 0; m < kModalityCount; ++m) {
    if (!(fractions[m] >= 0.0) || !std::isfinite(fractions[m])) {
      throw InvalidInputError("mixture fractions must be finite and non-negative");
    }
    if (available[m] < 0) throw InvalidInputError("availability must be >= 0");
    fsum += fractions[m];
  }
  if (std::abs(fsum - 1.0) > 1e-9) {
    throw InvalidInputError("mixture fractions must sum to 1");
  }

  std::int64_t supply = 0;
  for (std::size_t m = 0; m < kModalityCount; ++m) {
    if (fractions[m] > 0.0) supply += available[m];
  }
  if (supply < window_budget) throw InfeasibleMixtureError(supply, window_budget);

  // Water-fill: cap modalities whose proportional share exceeds supply, then
  // re-split the remainder among the rest until no share exceeds supply.
  ModalityTokens target{};
  std::array<double, kModalityCount> quota{};
  std::array<bool, kModalityCount> active{};
  for (std::size_t m = 0; m < kModalityCount; ++m) active[m] = fractions[m] > 0.0;

  std::int64_t remaining = window_budget;
  while (true) {
    double active_sum = 0.0;
    for (std::size_t m = 0; m < kModalityCount; ++m) {
      if (active[m]) active_sum += fractions[m];
    }
    const std::int64_t pass_budget = remaining;
    bool capped = false;
    for (std::size_t m = 0; m < kModalityCount; ++m) {
      if (!active[m]) continue;
      quota[m] = static_cast<double>(pass_budget) * fractions[m] / active_sum;
      if (quota[m] > static_cast<double>(available[m])) {
        target[m] = available[m];
        remaining -= available[m];
        active[m] = false;
        capped = true;
      }
    }
    if (!capped) break;
  }

  // Largest remainder over the uncapped modalities.
  std::int64_t assigned = 0;
  std::vector<std::size_t> by_remainder;
  for (std::size_t m = 0; m < kModalityCount; ++m) {
    if (!active[m]) continue;
    target[m] = static_cast<std::int64_t>(std::floor(quota[m]));
    assigned += target[m];
    by_remainder.push_back(m);
  }
  std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
    return quota[a] - std::floor(quota[a]) > quota[b] - std::floor(quota[b]);
  });
  std::int64_t leftover = remaining - assigned;
  for (std::size_t i = 0; leftover > 0 && !by_remainder.empty(); i = (i + 1) % by_remainder.size()) {
    const std::size_t m = by_remainder[i];
    if (target[m] < available[m]) {
      ++target[m];
      --leftover;
    }
  }
  return target;
}

double WorkerAssignment::makespan() const {
  return loads.empty() ? 0.0 : *std::max_element(loads.begin(), loads.end());
}

WorkerAssignment balance_workers(std::span<const SequenceItem> items,
                                 std::size_t n_workers) {
  if (n_workers < 1) throw InvalidInputError("need at least one worker");
  for (const auto& item : items) {
    if (!(item.est_cost >= 0.0) || !std::isfinite(item.est_cost)) {
      throw InvalidInputError("item '" + item.id + "' has an invalid cost");
    }
  }

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].est_cost != items[b].est_cost) return items[a].est_cost > items[b].est_cost;
    return items[a].id < items[b].id;
  });

  WorkerAssignment out;
  out.assignments.resize(n_workers);
  out.loads.assign(n_workers, 0.0);
  for (std::size_t idx : order) {
    const auto worker = static_cast<std::size_t>(
        std::min_element(out.loads.begin(), out.loads.end()) - out.loads.begin());
    out.assignments[worker].push_back(items[idx].id);
    out.loads[worker] += items[idx].est_cost;
  }
  return out;
}

}  // namespace slowfast
