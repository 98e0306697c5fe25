#include "slowfast/position_encoding.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "slowfast/error.h"

namespace slowfast {
namespace {

struct Sample {
  int lo;
  int hi;
  double frac;
};

// Corner-aligned source coordinates for every target index on one axis.
std::vector<Sample> axis_samples(int side, int n) {
  std::vector<Sample> out(n);
  for (int i = 0; i < n; ++i) {
    if (n == 1) {
      out[i] = {0, 0, 0.0};
      continue;
    }
    const long num = static_cast<long>(i) * (side - 1);
    const int lo = static_cast<int>(num / (n - 1));
    const long rem = num % (n - 1);
    const int hi = std::min(lo + 1, side - 1);
    out[i] = {lo, hi, static_cast<double>(rem) / static_cast<double>(n - 1)};
  }
  return out;
}

}  // namespace

std::vector<double> interpolate_pos_embed(const PosEmbedGrid& src, int rows,
                                          int cols) {
  if (src.side < 2) throw InvalidInputError("position grid side must be >= 2");
  if (src.dim < 1) throw InvalidInputError("position grid dim must be >= 1");
  if (src.values.size() != static_cast<std::size_t>(src.side) * src.side * src.dim) {
    throw InvalidInputError("position grid size does not match side x side x dim");
  }
  if (rows < 1 || cols < 1) throw InvalidInputError("target grid must be at least 1x1");
  for (double v : src.values) {
    if (!std::isfinite(v)) throw InvalidInputError("position grid has non-finite values");
  }

  const auto ys = axis_samples(src.side, rows);
  const auto xs = axis_samples(src.side, cols);
  std::vector<double> out(static_cast<std::size_t>(rows) * cols * src.dim);
  std::size_t k = 0;
  for (const Sample& y : ys) {
    for (const Sample& x : xs) {
      for (int d = 0; d < src.dim; ++d) {
        // std::lerp is exact at the endpoints and never leaves [a, b].
        const double top = std::lerp(src.at(y.lo, x.lo, d), src.at(y.lo, x.hi, d), x.frac);
        const double bot = std::lerp(src.at(y.hi, x.lo, d), src.at(y.hi, x.hi, d), x.frac);
        out[k++] = std::lerp(top, bot, y.frac);
      }
    }
  }
  return out;
}

void RopeConfig::validate() const {
  if (head_dim < 2 || head_dim % 2 != 0) {
    throw InvalidConfigError("head_dim must be a positive even number");
  }
  if (!(inv_freq_base > 1.0) || !std::isfinite(inv_freq_base)) {
    throw InvalidConfigError("inv_freq_base must be > 1");
  }
  if (axis_split.empty()) throw InvalidConfigError("axis_split is empty");
  for (int p : axis_split) {
    if (p < 1) throw InvalidConfigError("axis_split parts must be >= 1");
  }
  if (std::accumulate(axis_split.begin(), axis_split.end(), 0) != head_dim / 2) {
    throw InvalidConfigError("axis_split must sum to head_dim / 2");
  }
}

RopeConfig RopeConfig::vit_2d(int head_dim, double base) {
  const int pairs = head_dim / 2;
  return RopeConfig{head_dim, base, {pairs - pairs / 2, pairs / 2}};
}

RopeConfig RopeConfig::unified_3d(int head_dim, std::vector<int> split, double base) {
  return RopeConfig{head_dim, base, std::move(split)};
}

std::vector<double> inverse_frequencies(int pairs, double base) {
  std::vector<double> freqs(pairs);
  for (int k = 0; k < pairs; ++k) {
    freqs[k] = std::pow(base, -static_cast<double>(k) / pairs);
  }
  return freqs;
}

std::vector<double> rope_angles(std::span<const std::int64_t> positions,
                                const RopeConfig& cfg) {
  cfg.validate();
  if (positions.size() != cfg.axis_split.size()) {
    throw InvalidInputError("expected " + std::to_string(cfg.axis_split.size()) +
                            " positions, got " + std::to_string(positions.size()));
  }
  std::vector<double> angles;
  angles.reserve(cfg.head_dim / 2);
  for (std::size_t a = 0; a < positions.size(); ++a) {
    const double pos = static_cast<double>(positions[a]);
    for (double f : inverse_frequencies(cfg.axis_split[a], cfg.inv_freq_base)) {
      angles.push_back(pos * f);
    }
  }
  return angles;
}

std::vector<double> rope_angles_2d(std::int64_t row, std::int64_t col,
                                   const RopeConfig& cfg) {
  if (cfg.axis_split.size() != 2) {
    cfg.validate();
    throw InvalidConfigError("2D rotary config needs exactly 2 axis parts");
  }
  const std::int64_t pos[] = {row, col};
  return rope_angles(pos, cfg);
}

std::vector<double> rope_angles_3d(std::int64_t t, std::int64_t h,
                                   std::int64_t w, const RopeConfig& cfg) {
  if (cfg.axis_split.size() != 3) {
    cfg.validate();
    throw InvalidConfigError("3D rotary config needs exactly 3 axis parts");
  }
  const std::int64_t pos[] = {t, h, w};
  return rope_angles(pos, cfg);
}

void apply_rotary(std::span<double> vec, std::span<const double> angles) {
  const std::size_t half = vec.size() / 2;
  if (vec.size() % 2 != 0 || angles.size() != half) {
    throw InvalidInputError("rotary vector must have 2 * angles.size() entries");
  }
  for (std::size_t i = 0; i < half; ++i) {
    const double c = std::cos(angles[i]);
    const double s = std::sin(angles[i]);
    const double x = vec[i];
    const double y = vec[i + half];
    vec[i] = x * c - y * s;
    vec[i + half] = x * s + y * c;
  }
}

RopeIndexTable build_rope_index_table(const TokenLayout& layout,
                                      std::span<const double> frame_timestamps,
                                      double temporal_unit_s) {
  if (!(temporal_unit_s > 0.0) || !std::isfinite(temporal_unit_s)) {
    throw InvalidInputError("temporal_unit_s must be positive");
  }
  RopeIndexTable table;
  table.reserve(static_cast<std::size_t>(sequence_length(layout)));

  std::int64_t cursor = 0;
  std::int64_t video_start = -1;
  for (const LayoutElement& element : layout.elements) {
    if (const auto* span = std::get_if<TextSpan>(&element)) {
      if (span->n_tokens < 1) throw InvalidInputError("text span must hold >= 1 token");
      for (std::int64_t i = 0; i < span->n_tokens; ++i, ++cursor) {
        table.push_back({cursor, cursor, cursor});
      }
      continue;
    }
    const auto* block = std::get_if<VisionBlock>(&element);
    if (block == nullptr) {
      table.push_back({cursor, cursor, cursor});
      ++cursor;
      continue;
    }

    const PatchGrid& grid = block->grid;
    if (grid.rows < 1 || grid.cols < 1) {
      throw InvalidInputError("vision block has an empty grid");
    }
    std::int64_t t = cursor;
    if (block->kind != VisionKind::kImage && !frame_timestamps.empty()) {
      if (block->frame_index >= frame_timestamps.size()) {
        throw InvalidInputError("no timestamp for frame " +
                                std::to_string(block->frame_index));
      }
      if (video_start < 0) video_start = cursor;
      const double ts = frame_timestamps[block->frame_index];
      if (!std::isfinite(ts) || ts < 0.0) {
        throw InvalidInputError("timestamps must be finite and non-negative");
      }
      const auto offset = static_cast<std::int64_t>(std::llround(ts / temporal_unit_s));
      t = std::max(cursor, video_start + offset);
    }
    for (int r = 0; r < grid.rows; ++r) {
      for (int c = 0; c < grid.cols; ++c) {
        table.push_back({t, cursor + r, cursor + c});
      }
    }
    cursor = std::max({t, cursor + grid.rows - 1, cursor + grid.cols - 1}) + 1;
  }
  return table;
}

}  // namespace slowfast
