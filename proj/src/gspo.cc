#include "slowfast/gspo.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "slowfast/error.h"

namespace slowfast {
namespace {

// Sum in ascending order so the result is independent of input order.
double ordered_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc;
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInputError(std::string(what) + " must be finite");
  }
}

}  // namespace

void GroupRollouts::validate() const {
  const std::size_t g = rewards.size();
  if (g < 2) throw InvalidInputError("a group needs at least 2 responses");
  if (token_logprobs_new.size() != g || token_logprobs_old.size() != g) {
    throw InvalidInputError("log-probability vectors do not match the group size");
  }
  if (!(clip_eps > 0.0) || !std::isfinite(clip_eps)) {
    throw InvalidInputError("clip_eps must be > 0");
  }
  check_finite(rewards, "rewards");
  for (std::size_t i = 0; i < g; ++i) {
    const auto& lp_new = token_logprobs_new[i];
    const auto& lp_old = token_logprobs_old[i];
    if (lp_new.empty() || lp_new.size() != lp_old.size()) {
      throw InvalidInputError("response " + std::to_string(i) +
                              " needs equal, non-empty new/old log-probabilities");
    }
    for (const auto* lps : {&lp_new, &lp_old}) {
      for (double v : *lps) {
        if (!std::isfinite(v) || v > 0.0) {
          throw InvalidInputError("response " + std::to_string(i) +
                                  " has a log-probability that is not finite and <= 0");
        }
      }
    }
  }
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw InvalidInputError("a group needs at least 2 rewards");
  check_finite(rewards, "rewards");
  std::vector<double> adv(rewards.size(), 0.0);
  const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (*lo == *hi) return adv;

  const double n = static_cast<double>(rewards.size());
  const double mean = ordered_sum({rewards.begin(), rewards.end()}) / n;

  std::vector<double> sq;
  sq.reserve(rewards.size());
  for (double r : rewards) sq.push_back((r - mean) * (r - mean));
  const double stddev = std::sqrt(ordered_sum(std::move(sq)) / n);

  if (stddev == 0.0) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / stddev;
  return adv;
}

double sequence_ratio(std::span<const double> lp_new, std::span<const double> lp_old) {
  if (lp_new.empty() || lp_new.size() != lp_old.size()) {
    throw InvalidInputError("sequence ratio needs equal, non-empty log-probability vectors");
  }
  check_finite(lp_new, "log-probabilities");
  check_finite(lp_old, "log-probabilities");
  std::vector<double> diffs(lp_new.size());
  for (std::size_t t = 0; t < lp_new.size(); ++t) diffs[t] = lp_new[t] - lp_old[t];
  return std::exp(ordered_sum(std::move(diffs)) / static_cast<double>(lp_new.size()));
}

GspoResult gspo_objective(const GroupRollouts& rollouts) {
  rollouts.validate();
  const std::size_t g = rollouts.group_size();
  const double eps = rollouts.clip_eps;

  GspoResult out;
  out.advantages = group_advantages(rollouts.rewards);
  out.ratios.resize(g);
  out.clipped_terms.resize(g);
  for (std::size_t i = 0; i < g; ++i) {
    const double s = sequence_ratio(rollouts.token_logprobs_new[i], rollouts.token_logprobs_old[i]);
    const double a = out.advantages[i];
    out.ratios[i] = s;
    out.clipped_terms[i] = std::min(s * a, std::clamp(s, 1.0 - eps, 1.0 + eps) * a);
  }
  out.objective = ordered_sum(out.clipped_terms) / static_cast<double>(g);
  return out;
}

}  // namespace slowfast
