#include "slowfast/pipeline_config.h"

#include <fstream>

#include "json_util.h"
#include "slowfast/error.h"

namespace slowfast {

using detail::check_keys;
using detail::json;
using detail::read_opt;

void PipelineConfig::validate() const {
  geometry.validate();
  similarity.validate();
  rope.rope_config().validate();
  if (!(rope.temporal_unit_s > 0.0)) {
    throw InvalidConfigError("rope.temporal_unit_s must be > 0");
  }
  if (rope.axis_split.size() != 3) {
    throw InvalidConfigError("rope.axis_split needs (temporal, height, width) parts");
  }
  if (packing.capacity < 1) throw InvalidConfigError("packing.capacity must be >= 1");
  if (packing.n_workers < 1) throw InvalidConfigError("packing.n_workers must be >= 1");
  double fsum = 0.0;
  for (double f : packing.mixture) {
    if (!(f >= 0.0)) throw InvalidConfigError("packing.mixture fractions must be >= 0");
    fsum += f;
  }
  if (std::abs(fsum - 1.0) > 1e-9) {
    throw InvalidConfigError("packing.mixture fractions must sum to 1");
  }
  if (packing.cost.alpha < 0.0 || packing.cost.beta < 0.0) {
    throw InvalidConfigError("packing cost weights must be >= 0");
  }
  if (special_tokens.slow.empty() || special_tokens.fast.empty() ||
      special_tokens.slow == special_tokens.fast) {
    throw InvalidConfigError("special token names must be non-empty and distinct");
  }
}

PipelineConfig config_from_json(const json& j) {
  const std::string where = "config";
  check_keys(j, {"geometry", "similarity", "rope", "packing", "special_tokens"}, where);
  PipelineConfig cfg;

  if (auto it = j.find("geometry"); it != j.end()) {
    const std::string w = where + ".geometry";
    check_keys(*it, {"patch_px", "merge_factor", "min_tokens_per_frame", "max_tokens_per_frame",
                     "image_token_cap", "video_token_budget", "fast_ratio"},
               w);
    GeometryConfig& g = cfg.geometry;
    read_opt(*it, "patch_px", g.patch_px, w);
    read_opt(*it, "merge_factor", g.merge_factor, w);
    read_opt(*it, "min_tokens_per_frame", g.min_tokens_per_frame, w);
    read_opt(*it, "max_tokens_per_frame", g.max_tokens_per_frame, w);
    read_opt(*it, "image_token_cap", g.image_token_cap, w);
    read_opt(*it, "video_token_budget", g.video_token_budget, w);
    read_opt(*it, "fast_ratio", g.fast_ratio, w);
  }
  if (auto it = j.find("similarity"); it != j.end()) {
    const std::string w = where + ".similarity";
    check_keys(*it, {"grid_side", "per_patch_tol", "threshold", "compare_size"}, w);
    SimilarityConfig& s = cfg.similarity;
    read_opt(*it, "grid_side", s.grid_side, w);
    read_opt(*it, "per_patch_tol", s.per_patch_tol, w);
    read_opt(*it, "threshold", s.threshold, w);
    read_opt(*it, "compare_size", s.compare_size, w);
  }
  if (auto it = j.find("rope"); it != j.end()) {
    const std::string w = where + ".rope";
    check_keys(*it, {"head_dim", "inv_freq_base", "temporal_unit_s", "axis_split"}, w);
    RopeSettings& r = cfg.rope;
    read_opt(*it, "head_dim", r.head_dim, w);
    read_opt(*it, "inv_freq_base", r.inv_freq_base, w);
    read_opt(*it, "temporal_unit_s", r.temporal_unit_s, w);
    read_opt(*it, "axis_split", r.axis_split, w);
  }
  if (auto it = j.find("packing"); it != j.end()) {
    const std::string w = where + ".packing";
    check_keys(*it, {"capacity", "mixture", "cost_alpha", "cost_beta", "n_workers"}, w);
    PackingSettings& p = cfg.packing;
    read_opt(*it, "capacity", p.capacity, w);
    read_opt(*it, "cost_alpha", p.cost.alpha, w);
    read_opt(*it, "cost_beta", p.cost.beta, w);
    read_opt(*it, "n_workers", p.n_workers, w);
    if (auto mix = it->find("mixture"); mix != it->end()) {
      const std::string mw = w + ".mixture";
      check_keys(*mix, {"video", "image", "text"}, mw);
      // Listing the mixture replaces it entirely; omitted modalities get 0.
      p.mixture = {0.0, 0.0, 0.0};
      read_opt(*mix, "video", p.mixture[0], mw);
      read_opt(*mix, "image", p.mixture[1], mw);
      read_opt(*mix, "text", p.mixture[2], mw);
    }
  }
  if (auto it = j.find("special_tokens"); it != j.end()) {
    const std::string w = where + ".special_tokens";
    check_keys(*it, {"slow", "fast"}, w);
    read_opt(*it, "slow", cfg.special_tokens.slow, w);
    read_opt(*it, "fast", cfg.special_tokens.fast, w);
  }

  try {
    cfg.validate();
  } catch (const InvalidConfigError& e) {
    throw InvalidInputError(std::string("config: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInputError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace slowfast
