#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slowfast/budget_solver.h"
#include "slowfast/cli.h"
#include "slowfast/error.h"
#include "slowfast/frame_analysis.h"
#include "slowfast/grounding.h"
#include "slowfast/gspo.h"
#include "slowfast/json_io.h"
#include "slowfast/packing.h"
#include "slowfast/position_encoding.h"

namespace py = pybind11;
using namespace slowfast;

namespace {

// Structured values cross the boundary as JSON text; the Python side wraps
// these with json.loads / json.dumps.

FrameRecord frame_from_bytes(std::size_t index, int width, int height, const py::bytes& data) {
  FrameRecord f;
  f.index = index;
  f.width_px = width;
  f.height_px = height;
  const std::string s = data;
  f.pixels.assign(s.begin(), s.end());
  return f;
}

std::vector<std::string> classify(const std::vector<std::tuple<int, int, py::bytes>>& frames, double threshold,
                     int grid_side, double per_patch_tol, double fps) {
  if (!(fps > 0.0)) throw InvalidInputError("fps must be > 0");
  std::vector<FrameRecord> recs;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& [w, h, data] = frames[i];
    recs.push_back(frame_from_bytes(i, w, h, data));
    recs.back().timestamp_s = static_cast<double>(i) / fps;
  }
  SimilarityConfig cfg;
  cfg.threshold = threshold;
  cfg.grid_side = grid_side;
  cfg.per_patch_tol = per_patch_tol;
  const auto classes = classify_frames(recs, cfg);
  std::vector<std::string> kinds;
  for (const auto& c : classes) kinds.push_back(to_string(c.kind));
  return kinds;
}

std::string solve_budget(const std::vector<bool>& slow, const std::vector<std::pair<int, int>>& dims,
                         std::int64_t budget) {
  if (slow.size() != dims.size()) throw InvalidInputError("slow and dims differ in length");
  std::vector<FrameClass> classes;
  std::vector<FrameDims> fd;
  std::size_t anchor = 0;
  for (std::size_t i = 0; i < slow.size(); ++i) {
    if (slow[i] || i == 0) anchor = i;
    classes.push_back({i, anchor == i ? FrameKind::kSlow : FrameKind::kFast, anchor});
    fd.push_back({dims[i].first, dims[i].second});
  }
  GeometryConfig cfg;
  cfg.video_token_budget = budget;
  cfg.max_tokens_per_frame = std::min(cfg.max_tokens_per_frame, budget);
  return plan_to_json(solve_video_budget(classes, fd, cfg)).dump();
}

std::string rope_index(const std::string& layout_json, const std::vector<double>& timestamps) {
  return rope_table_to_json(build_rope_index_table(layout_from_json(Json::parse(layout_json)), timestamps))
      .dump();
}

std::string parse(const std::string& text, bool lenient) {
  return grounding_parse_to_json(parse_grounding(text, lenient ? ParseMode::kLenient : ParseMode::kStrict))
      .dump();
}

std::string emit(const std::string& item_json) {
  return emit_grounding(grounding_item_from_json(Json::parse(item_json)));
}

std::string pack(const std::string& items_json, std::int64_t capacity) {
  const auto items = items_from_json(Json::parse(items_json), CostModel{});
  return windows_to_json(pack_windows(items, capacity)).dump();
}

std::string balance(const std::string& items_json, std::size_t workers) {
  const auto items = items_from_json(Json::parse(items_json), CostModel{});
  return assignment_to_json(balance_workers(items, workers)).dump();
}

std::string gspo(const std::string& group_json) {
  return gspo_result_to_json(gspo_objective(rollouts_from_json(Json::parse(group_json)))).dump();
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Slow/Fast video token pipeline";

  // Translators run newest first, so the base class goes in before its subclasses.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInputError>(m, "InvalidInputError", base.ptr());
  py::register_exception<InvalidConfigError>(m, "InvalidConfigError", base.ptr());
  py::register_exception<BudgetTooSmallError>(m, "BudgetTooSmallError", base.ptr());
  py::register_exception<InfeasibleMixtureError>(m, "InfeasibleMixtureError", base.ptr());
  py::register_exception<OversizeItemError>(m, "OversizeItemError", base.ptr());
  py::register_exception<GroundingParseError>(m, "GroundingParseError", base.ptr());

  m.def("classify", &classify, py::arg("frames"), py::arg("threshold") = 0.95, py::arg("grid_side") = 8,
        py::arg("per_patch_tol") = 0.05, py::arg("fps") = 1.0, "frames: list of (width, height, rgb bytes)");
  m.def(
      "fit_grid",
      [](int w, int h, std::int64_t max_tokens) {
        const PatchGrid g = fit_grid(w, h, max_tokens, GeometryConfig{});
        return py::make_tuple(g.rows, g.cols);
      },
      py::arg("width"), py::arg("height"), py::arg("max_tokens") = 20480);
  m.def("fast_tokens_for", &fast_tokens_for, py::arg("slow_tokens"), py::arg("fast_ratio") = 0.3);
  m.def("_solve_budget", &solve_budget);
  m.def("_rope_index", &rope_index);
  m.def("_parse_grounding", &parse);
  m.def("_emit_grounding", &emit);
  m.def("_pack", &pack);
  m.def("_balance", &balance);
  m.def("_gspo", &gspo);
  m.def("plan_mixture", [](const ModalityTokens& available, std::int64_t budget) {
    return plan_mixture(available, budget);
  });
  m.def("group_advantages", [](const std::vector<double>& r) { return group_advantages(r); });
  m.def("sequence_ratio", [](const std::vector<double>& n, const std::vector<double>& o) {
    return sequence_ratio(n, o);
  });
  m.def("run_cli", &cli, "Run a CLI command in-process; returns (exit_code, stdout, stderr).");
}
