#ifndef SLOWFAST_POSITION_ENCODING_H_
#define SLOWFAST_POSITION_ENCODING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "slowfast/sequence_assembly.h"

namespace slowfast {

inline constexpr double kDefaultRopeBase = 1'000'000.0;
inline constexpr double kLongContextRopeBase = 8'000'000.0;

// Source side of the learned absolute grid: a 384px encoder with 14px patches.
inline constexpr int kPosEmbedSide = 384 / 14;

// Learned absolute position embeddings on a side x side grid, row-major with
// dim values per cell.
struct PosEmbedGrid {
  int side = kPosEmbedSide;
  int dim = 0;
  std::vector<double> values;

  double at(int row, int col, int d) const {
    return values[(static_cast<std::size_t>(row) * side + col) * dim + d];
  }
};

// Bilinear resize of the grid to rows x cols with corner-aligned sampling:
// target row i samples source row i * (side - 1) / (rows - 1). A one-cell
// target axis samples source index 0. Result is rows x cols x dim.
std::vector<double> interpolate_pos_embed(const PosEmbedGrid& src, int rows,
                                          int cols);

struct RopeConfig {
  int head_dim = 0;
  double inv_freq_base = kDefaultRopeBase;
  // Rotary pairs per axis; must sum to head_dim / 2.
  std::vector<int> axis_split;

  void validate() const;

  // Equal halves over (row, col).
  static RopeConfig vit_2d(int head_dim, double base = kDefaultRopeBase);
  // (temporal, height, width) split of the LLM-side pairs.
  static RopeConfig unified_3d(int head_dim, std::vector<int> split,
                               double base = kDefaultRopeBase);
};

// base^(-k / pairs) for k = 0 .. pairs-1.
std::vector<double> inverse_frequencies(int pairs, double base);

// Angles for one token: axis a's pairs rotate by positions[a] * frequency.
// positions.size() must equal cfg.axis_split.size().
std::vector<double> rope_angles(std::span<const std::int64_t> positions,
                                const RopeConfig& cfg);

std::vector<double> rope_angles_2d(std::int64_t row, std::int64_t col,
                                   const RopeConfig& cfg);

std::vector<double> rope_angles_3d(std::int64_t t, std::int64_t h,
                                   std::int64_t w, const RopeConfig& cfg);

// Reference rotation of a head vector (rotate-half pairing: element i pairs
// with element i + head_dim/2). Only used to check rotary properties.
void apply_rotary(std::span<double> vec, std::span<const double> angles);

struct RopeIndex {
  std::int64_t t = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;
  bool operator==(const RopeIndex&) const = default;
};

using RopeIndexTable = std::vector<RopeIndex>;

// 3D rotary indices for a layout. Text-like elements take (c, c, c) at the
// running cursor c. A vision block's tokens take
//   t = max(c, video_start + round(timestamp / temporal_unit_s))
//   h = c + row, w = c + col
// where video_start is the cursor at the first vision block of the layout.
// Blocks without a timestamp (frame_timestamps empty, or image blocks) use
// t = c. After a block the cursor moves to the block's largest index + 1.
RopeIndexTable build_rope_index_table(const TokenLayout& layout,
                                      std::span<const double> frame_timestamps,
                                      double temporal_unit_s = 1.0);

}  // namespace slowfast

#endif  // SLOWFAST_POSITION_ENCODING_H_
