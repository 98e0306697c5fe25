#ifndef SLOWFAST_PIPELINE_CONFIG_H_
#define SLOWFAST_PIPELINE_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "slowfast/budget_solver.h"
#include "slowfast/frame_analysis.h"
#include "slowfast/packing.h"
#include "slowfast/position_encoding.h"
#include "slowfast/sequence_assembly.h"

namespace slowfast {

struct RopeSettings {
  int head_dim = 128;
  double inv_freq_base = kDefaultRopeBase;
  double temporal_unit_s = 1.0;
  // (temporal, height, width) rotary pairs.
  std::vector<int> axis_split = {16, 24, 24};

  RopeConfig rope_config() const { return {head_dim, inv_freq_base, axis_split}; }
};

struct PackingSettings {
  std::int64_t capacity = kShortContextTokens;
  MixtureFractions mixture = kLongContextMixture;
  CostModel cost;
  std::size_t n_workers = 8;
};

// Everything the CLI reads from --config. All sections and keys are
// optional; unknown keys are rejected.
struct PipelineConfig {
  GeometryConfig geometry;
  SimilarityConfig similarity;
  RopeSettings rope;
  PackingSettings packing;
  SpecialTokenNames special_tokens;

  void validate() const;
};

PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace slowfast

#endif  // SLOWFAST_PIPELINE_CONFIG_H_
