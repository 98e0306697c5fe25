#include "slowfast/json_io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "json_util.h"
#include "slowfast/error.h"

namespace slowfast {

using detail::check_keys;
using detail::get_as;
using detail::get_required;

double round_sig9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::strtod(buf, nullptr);
}

std::string dump_stable(const Json& j) { return j.dump(2) + "\n"; }

Json grid_to_json(const PatchGrid& grid) {
  return Json{{"rows", grid.rows},
              {"cols", grid.cols},
              {"resized_h_px", grid.resized_h_px},
              {"resized_w_px", grid.resized_w_px},
              {"tokens", grid.tokens()}};
}

Json frame_classes_to_json(std::span<const FrameClass> classes,
                           std::span<const double> timestamps) {
  Json out = Json::array();
  for (std::size_t i = 0; i < classes.size(); ++i) {
    Json f{{"index", classes[i].index},
           {"kind", to_string(classes[i].kind)},
           {"anchor_index", classes[i].anchor_index}};
    if (i < timestamps.size()) f["timestamp_s"] = round_sig9(timestamps[i]);
    out.push_back(std::move(f));
  }
  return out;
}

Json similarity_to_json(std::span<const SimilarityReport> reports) {
  Json out = Json::array();
  for (const auto& r : reports) {
    out.push_back({{"anchor_index", r.anchor_index},
                   {"target_index", r.target_index},
                   {"grid_side", r.grid_side},
                   {"unchanged_fraction", round_sig9(r.unchanged_fraction)}});
  }
  return out;
}

Json plan_to_json(const BudgetPlan& plan) {
  Json grids = Json::array();
  for (const auto& g : plan.grids) grids.push_back(grid_to_json(g));
  return Json{{"tokens_per_slow", plan.tokens_per_slow},
              {"tokens_per_fast", plan.tokens_per_fast},
              {"total_tokens", plan.total_tokens},
              {"grids", std::move(grids)}};
}

Json layout_to_json(const TokenLayout& layout) {
  Json out = Json::array();
  for (const auto& e : layout.elements) {
    if (const auto* s = std::get_if<SpecialToken>(&e)) {
      out.push_back({{"type", "special"}, {"name", s->name}});
    } else if (const auto* t = std::get_if<TextSpan>(&e)) {
      out.push_back({{"type", "text"}, {"n_tokens", t->n_tokens}});
    } else if (const auto* ts = std::get_if<TimestampText>(&e)) {
      out.push_back({{"type", "timestamp"}, {"seconds", round_sig9(ts->seconds)}, {"text", ts->text}});
    } else {
      const auto& v = std::get<VisionBlock>(e);
      out.push_back({{"type", "vision"},
                     {"frame_index", v.frame_index},
                     {"kind", to_string(v.kind)},
                     {"rows", v.grid.rows},
                     {"cols", v.grid.cols},
                     {"resized_h_px", v.grid.resized_h_px},
                     {"resized_w_px", v.grid.resized_w_px}});
    }
  }
  return out;
}

Json rope_table_to_json(const RopeIndexTable& table) {
  std::vector<std::int64_t> t, h, w;
  t.reserve(table.size());
  h.reserve(table.size());
  w.reserve(table.size());
  for (const auto& r : table) {
    t.push_back(r.t);
    h.push_back(r.h);
    w.push_back(r.w);
  }
  return Json{{"t", std::move(t)}, {"h", std::move(h)}, {"w", std::move(w)}};
}

Json grounding_item_to_json(const GroundingItem& item) {
  Json j{{"kind", to_string(item.kind)}};
  if (item.label) j["label"] = *item.label;
  switch (item.kind) {
    case GroundingKind::kPoints: {
      Json pts = Json::array();
      for (const auto& p : item.points) pts.push_back({p.x, p.y});
      j["points"] = std::move(pts);
      break;
    }
    case GroundingKind::kBoxes:
    case GroundingKind::kOcrBoxes: {
      Json boxes = Json::array();
      for (const auto& b : item.boxes) boxes.push_back({b.x1, b.y1, b.x2, b.y2});
      j["boxes"] = std::move(boxes);
      break;
    }
    case GroundingKind::kPolygons:
    case GroundingKind::kOcrPolygons: {
      Json polys = Json::array();
      for (const auto& poly : item.polygons) {
        Json vs = Json::array();
        for (const auto& p : poly) vs.push_back({p.x, p.y});
        polys.push_back(std::move(vs));
      }
      j["polygons"] = std::move(polys);
      break;
    }
    case GroundingKind::kClipTime:
      j["start_s"] = round_sig9(item.start_s);
      j["end_s"] = round_sig9(item.end_s);
      break;
    case GroundingKind::kObjectRef:
      break;
  }
  return j;
}

Json grounding_parse_to_json(const GroundingParse& parse) {
  Json items = Json::array();
  for (const auto& item : parse.items) items.push_back(grounding_item_to_json(item));
  Json issues = Json::array();
  for (const auto& issue : parse.issues) {
    issues.push_back({{"offset", issue.offset}, {"reason", issue.reason}});
  }
  return Json{{"items", std::move(items)}, {"issues", std::move(issues)}};
}

Json windows_to_json(std::span<const PackedWindow> windows) {
  Json out = Json::array();
  for (const auto& w : windows) {
    std::vector<std::string> ids;
    std::vector<std::int64_t> lengths;
    for (const auto& item : w.items) {
      ids.push_back(item.id);
      lengths.push_back(item.length_tokens);
    }
    out.push_back({{"capacity", w.capacity},
                   {"items", std::move(ids)},
                   {"lengths", std::move(lengths)},
                   {"offsets", w.offsets},
                   {"used_tokens", w.used_tokens()}});
  }
  return out;
}

Json assignment_to_json(const WorkerAssignment& assignment) {
  Json workers = Json::array();
  for (std::size_t i = 0; i < assignment.assignments.size(); ++i) {
    workers.push_back({{"worker", i},
                       {"items", assignment.assignments[i]},
                       {"load", round_sig9(assignment.loads[i])}});
  }
  return Json{{"workers", std::move(workers)}, {"makespan", round_sig9(assignment.makespan())}};
}

Json gspo_result_to_json(const GspoResult& result) {
  auto rounded = [](const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) out.push_back(round_sig9(x));
    return out;
  };
  return Json{{"advantages", rounded(result.advantages)},
              {"ratios", rounded(result.ratios)},
              {"clipped_terms", rounded(result.clipped_terms)},
              {"objective", round_sig9(result.objective)}};
}

Json modality_tokens_to_json(const ModalityTokens& tokens) {
  Json j = Json::object();
  for (std::size_t m = 0; m < kModalityCount; ++m) {
    j[to_string(static_cast<Modality>(m))] = tokens[m];
  }
  return j;
}

// ---------------------------------------------------------------------------

TokenLayout layout_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInputError("layout must be a JSON array");
  TokenLayout layout;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "layout[" + std::to_string(i) + "]";
    const Json& e = j[i];
    detail::require_object(e, where);
    const std::string type = e.contains("type") ? get_as<std::string>(e["type"], where + ".type") : "";
    if (type == "special") {
      check_keys(e, {"type", "name"}, where);
      layout.elements.emplace_back(SpecialToken{get_required<std::string>(e, "name", where)});
    } else if (type == "text") {
      check_keys(e, {"type", "n_tokens"}, where);
      const auto n = get_required<std::int64_t>(e, "n_tokens", where);
      if (n < 1) throw InvalidInputError(where + ": text span needs >= 1 token");
      layout.elements.emplace_back(TextSpan{n});
    } else if (type == "timestamp") {
      check_keys(e, {"type", "seconds", "text"}, where);
      const double s = get_required<double>(e, "seconds", where);
      const std::string text =
          e.contains("text") ? get_as<std::string>(e["text"], where + ".text") : render_timestamp(s);
      layout.elements.emplace_back(TimestampText{s, text});
    } else if (type == "vision") {
      check_keys(e, {"type", "frame_index", "kind", "rows", "cols", "resized_h_px", "resized_w_px"},
                 where);
      VisionBlock v;
      v.frame_index = get_required<std::size_t>(e, "frame_index", where);
      const std::string kind = get_required<std::string>(e, "kind", where);
      if (kind == "slow") {
        v.kind = VisionKind::kSlow;
      } else if (kind == "fast") {
        v.kind = VisionKind::kFast;
      } else if (kind == "image") {
        v.kind = VisionKind::kImage;
      } else {
        throw InvalidInputError(where + ": unknown vision kind '" + kind + "'");
      }
      v.grid.rows = get_required<int>(e, "rows", where);
      v.grid.cols = get_required<int>(e, "cols", where);
      if (v.grid.rows < 1 || v.grid.cols < 1) throw InvalidInputError(where + ": empty grid");
      v.grid.resized_h_px = e.contains("resized_h_px") ? get_as<int>(e["resized_h_px"], where) : 0;
      v.grid.resized_w_px = e.contains("resized_w_px") ? get_as<int>(e["resized_w_px"], where) : 0;
      layout.elements.emplace_back(v);
    } else {
      throw InvalidInputError(where + ": unknown element kind '" + type + "'");
    }
  }
  return layout;
}

GroundingItem grounding_item_from_json(const Json& j) {
  const std::string where = "grounding item";
  check_keys(j, {"kind", "label", "points", "boxes", "polygons", "start_s", "end_s"}, where);
  if (!j.contains("kind")) throw InvalidInputError(where + ": missing kind");
  const auto kind = grounding_kind_from_string(get_as<std::string>(j["kind"], where + ".kind"));
  if (!kind) throw InvalidInputError(where + ": unknown kind " + j["kind"].dump());

  GroundingItem item;
  item.kind = *kind;
  if (j.contains("label")) item.label = get_as<std::string>(j["label"], where + ".label");
  auto pairs = [&](const Json& arr, const std::string& w) {
    std::vector<GroundPoint> pts;
    for (const auto& p : get_as<std::vector<std::vector<int>>>(arr, w)) {
      if (p.size() != 2) throw InvalidInputError(w + ": points need 2 coordinates");
      pts.push_back({p[0], p[1]});
    }
    return pts;
  };
  if (j.contains("points")) item.points = pairs(j["points"], where + ".points");
  if (j.contains("boxes")) {
    for (const auto& b : get_as<std::vector<std::vector<int>>>(j["boxes"], where + ".boxes")) {
      if (b.size() != 4) throw InvalidInputError(where + ": boxes need 4 coordinates");
      item.boxes.push_back({b[0], b[1], b[2], b[3]});
    }
  }
  if (j.contains("polygons")) {
    if (!j["polygons"].is_array()) throw InvalidInputError(where + ": polygons must be an array");
    for (const auto& poly : j["polygons"]) item.polygons.push_back(pairs(poly, where + ".polygons"));
  }
  if (j.contains("start_s")) item.start_s = get_as<double>(j["start_s"], where + ".start_s");
  if (j.contains("end_s")) item.end_s = get_as<double>(j["end_s"], where + ".end_s");
  validate_item(item);
  return item;
}

std::vector<SequenceItem> items_from_json(const Json& j, const CostModel& cost) {
  const Json& arr = j.is_object() && j.contains("items") ? j["items"] : j;
  if (!arr.is_array()) throw InvalidInputError("items must be a JSON array");
  std::vector<SequenceItem> items;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "items[" + std::to_string(i) + "]";
    const Json& e = arr[i];
    check_keys(e, {"id", "length_tokens", "modality", "est_cost", "vision_tokens", "text_tokens"},
               where);
    SequenceItem item;
    if (!e.contains("id") || !e.contains("length_tokens")) {
      throw InvalidInputError(where + ": id and length_tokens are required");
    }
    item.id = e["id"].is_string() ? e["id"].get<std::string>() : e["id"].dump();
    item.length_tokens = get_as<std::int64_t>(e["length_tokens"], where + ".length_tokens");
    if (item.length_tokens < 1) throw InvalidInputError(where + ": length_tokens must be >= 1");
    if (e.contains("modality")) {
      const auto m = modality_from_string(get_as<std::string>(e["modality"], where + ".modality"));
      if (!m) throw InvalidInputError(where + ": unknown modality");
      item.modality = *m;
    }
    if (e.contains("est_cost")) {
      item.est_cost = get_as<double>(e["est_cost"], where + ".est_cost");
    } else if (e.contains("vision_tokens") || e.contains("text_tokens")) {
      std::int64_t vision = 0, text = 0;
      detail::read_opt(e, "vision_tokens", vision, where);
      detail::read_opt(e, "text_tokens", text, where);
      item.est_cost = cost.estimate(vision, text);
    } else {
      item.est_cost = cost.estimate(item);
    }
    if (!(item.est_cost >= 0.0) || !std::isfinite(item.est_cost)) {
      throw InvalidInputError(where + ": est_cost must be finite and >= 0");
    }
    items.push_back(std::move(item));
  }
  return items;
}

GroupRollouts rollouts_from_json(const Json& j) {
  const std::string where = "group";
  check_keys(j, {"rewards", "logprobs_new", "logprobs_old", "clip_eps"}, where);
  GroupRollouts g;
  if (!j.contains("rewards") || !j.contains("logprobs_new") || !j.contains("logprobs_old")) {
    throw InvalidInputError(where + ": rewards, logprobs_new and logprobs_old are required");
  }
  g.rewards = get_as<std::vector<double>>(j["rewards"], where + ".rewards");
  g.token_logprobs_new = get_as<std::vector<std::vector<double>>>(j["logprobs_new"], where);
  g.token_logprobs_old = get_as<std::vector<std::vector<double>>>(j["logprobs_old"], where);
  detail::read_opt(j, "clip_eps", g.clip_eps, where);
  g.validate();
  return g;
}

ModalityTokens modality_tokens_from_json(const Json& j) {
  check_keys(j, {"video", "image", "text"}, "modality tokens");
  ModalityTokens t{};
  detail::read_opt(j, "video", t[0], "modality tokens");
  detail::read_opt(j, "image", t[1], "modality tokens");
  detail::read_opt(j, "text", t[2], "modality tokens");
  return t;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidInputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace slowfast
