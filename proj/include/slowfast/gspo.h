#ifndef SLOWFAST_GSPO_H_
#define SLOWFAST_GSPO_H_

#include <span>
#include <vector>

namespace slowfast {

// One prompt's group of G sampled responses.
struct GroupRollouts {
  std::vector<double> rewards;
  // Per response, per token log-probabilities under the current and the
  // sampling policy.
  std::vector<std::vector<double>> token_logprobs_new;
  std::vector<std::vector<double>> token_logprobs_old;
  double clip_eps = 0.2;

  std::size_t group_size() const { return rewards.size(); }
  void validate() const;
};

struct GspoResult {
  std::vector<double> advantages;
  std::vector<double> ratios;
  std::vector<double> clipped_terms;
  double objective = 0.0;
};

// Group-normalized advantages (r_i - mean) / std with the population standard
// deviation; all zero when the rewards have no spread. The result does not
// depend on the order of the rewards, bit for bit.
std::vector<double> group_advantages(std::span<const double> rewards);

// exp(mean_t(lp_new_t - lp_old_t)): the length-normalized sequence ratio.
double sequence_ratio(std::span<const double> lp_new, std::span<const double> lp_old);

// mean_i min(s_i A_i, clip(s_i, 1 - eps, 1 + eps) A_i).
GspoResult gspo_objective(const GroupRollouts& rollouts);

}  // namespace slowfast

#endif  // SLOWFAST_GSPO_H_
