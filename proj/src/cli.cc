#include "slowfast/cli.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "slowfast/budget_solver.h"
#include "slowfast/error.h"
#include "slowfast/frame_analysis.h"
#include "slowfast/grounding.h"
#include "slowfast/gspo.h"
#include "slowfast/json_io.h"
#include "slowfast/manifest.h"
#include "slowfast/packing.h"
#include "slowfast/parallel.h"
#include "slowfast/pipeline_config.h"
#include "slowfast/position_encoding.h"
#include "slowfast/sequence_assembly.h"

namespace slowfast {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string manifest;
  std::string input;
  std::string out;
  std::string mode = "video";
  std::string grounding_action;
  bool lenient = false;
  std::optional<std::int64_t> capacity;
  std::optional<std::size_t> workers;
  std::optional<std::int64_t> budget;
};

// Per-frame load failures, reported together.
class FrameErrors : public std::runtime_error {
 public:
  explicit FrameErrors(std::vector<std::string> lines)
      : std::runtime_error("frame decoding failed"), lines_(std::move(lines)) {}
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

PipelineConfig config_for(const Options& opt) {
  return opt.config.empty() ? PipelineConfig{} : load_config(opt.config);
}

void emit(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw InvalidInputError("cannot write '" + opt.out + "'");
  f << text;
}

std::string read_text(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Json read_json_input(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidInputError("input is not valid JSON: " + std::string(e.what()));
  }
}

struct AnalyzedVideo {
  std::vector<double> timestamps;
  std::vector<FrameDims> dims;
  Classification classification;
};

// Decodes every frame (in parallel), keeps only its dimensions and patch
// signature, and runs the Slow/Fast rule.
AnalyzedVideo analyze_video(const FrameManifest& manifest, const SimilarityConfig& sim) {
  if (manifest.frames.empty()) throw InvalidInputError("no frames");
  AnalyzedVideo video;
  video.timestamps = manifest.timestamps();

  const std::size_t n = manifest.frames.size();
  std::vector<PatchSignature> sigs(n);
  std::vector<FrameDims> dims(n);
  std::vector<std::string> errors(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      const FrameRecord frame = load_frame(manifest, i, video.timestamps[i]);
      dims[i] = {frame.width_px, frame.height_px};
      sigs[i] = patch_signature(frame, sim.grid_side, sim.compare_size);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::vector<std::string> lines;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) lines.push_back("frame " + std::to_string(i) + ": " + errors[i]);
  }
  if (!lines.empty()) throw FrameErrors(std::move(lines));

  video.dims = std::move(dims);
  video.classification = classify_signatures(sigs, sim);
  return video;
}

std::size_t count_kind(std::span<const FrameClass> classes, FrameKind kind) {
  return static_cast<std::size_t>(std::count_if(
      classes.begin(), classes.end(), [&](const FrameClass& c) { return c.kind == kind; }));
}

int cmd_classify(const Options& opt, std::ostream& out) {
  const PipelineConfig cfg = config_for(opt);
  const AnalyzedVideo video = analyze_video(load_manifest(opt.manifest), cfg.similarity);
  const auto& classes = video.classification.classes;

  Json j{{"frames", frame_classes_to_json(classes, video.timestamps)},
         {"similarity", similarity_to_json(video.classification.reports)},
         {"summary",
          {{"n_frames", classes.size()},
           {"n_slow", count_kind(classes, FrameKind::kSlow)},
           {"n_fast", count_kind(classes, FrameKind::kFast)},
           {"grid_side", cfg.similarity.grid_side},
           {"per_patch_tol", round_sig9(cfg.similarity.per_patch_tol)},
           {"threshold", round_sig9(cfg.similarity.threshold)}}}};
  emit(opt, dump_stable(j), out);
  return 0;
}

int cmd_tokenize(const Options& opt, std::ostream& out) {
  const PipelineConfig cfg = config_for(opt);
  const FrameManifest manifest = load_manifest(opt.manifest);

  if (opt.mode == "image") {
    if (manifest.frames.empty()) throw InvalidInputError("no frames");
    std::vector<PatchGrid> grids(manifest.frames.size());
    parallel_for(grids.size(), [&](std::size_t i) {
      grids[i] = fit_image(frame_dims(manifest.frames[i]), cfg.geometry);
    });
    const TokenLayout layout = assemble_image_layout(grids);
    const RopeIndexTable rope = build_rope_index_table(layout, {}, cfg.rope.temporal_unit_s);

    Json images = Json::array();
    for (const auto& g : grids) images.push_back(grid_to_json(g));
    const std::int64_t vision = vision_token_total(layout);
    Json j{{"mode", "image"},
           {"images", std::move(images)},
           {"layout", layout_to_json(layout)},
           {"rope_index", rope_table_to_json(rope)},
           {"summary",
            {{"n_images", grids.size()},
             {"vision_tokens", vision},
             {"image_token_cap", cfg.geometry.image_token_cap},
             {"sequence_length", sequence_length(layout)}}}};
    emit(opt, dump_stable(j), out);
    return 0;
  }
  if (opt.mode != "video") throw InvalidInputError("--mode must be image or video");

  const AnalyzedVideo video = analyze_video(manifest, cfg.similarity);
  const auto& classes = video.classification.classes;
  const BudgetPlan plan = solve_video_budget(classes, video.dims, cfg.geometry);
  const TokenLayout layout =
      assemble_layout(classes, plan, video.timestamps, cfg.special_tokens);
  const RopeIndexTable rope =
      build_rope_index_table(layout, video.timestamps, cfg.rope.temporal_unit_s);

  const std::int64_t vision = vision_token_total(layout);
  Json j{{"mode", "video"},
         {"frames", frame_classes_to_json(classes, video.timestamps)},
         {"plan", plan_to_json(plan)},
         {"layout", layout_to_json(layout)},
         {"rope_index", rope_table_to_json(rope)},
         {"summary",
          {{"n_frames", classes.size()},
           {"n_slow", count_kind(classes, FrameKind::kSlow)},
           {"n_fast", count_kind(classes, FrameKind::kFast)},
           {"tokens_per_slow", plan.tokens_per_slow},
           {"tokens_per_fast", plan.tokens_per_fast},
           {"vision_tokens", vision},
           {"video_token_budget", cfg.geometry.video_token_budget},
           {"within_budget", vision <= cfg.geometry.video_token_budget},
           {"sequence_length", sequence_length(layout)}}}};
  emit(opt, dump_stable(j), out);
  return 0;
}

int cmd_pack(const Options& opt, std::ostream& out) {
  const PipelineConfig cfg = config_for(opt);
  const auto items = items_from_json(read_json_input(opt.input), cfg.packing.cost);
  const std::int64_t capacity = opt.capacity.value_or(cfg.packing.capacity);
  const auto windows = pack_windows(items, capacity);
  std::int64_t used = 0;
  for (const auto& w : windows) used += w.used_tokens();
  Json j{{"capacity", capacity},
         {"windows", windows_to_json(windows)},
         {"summary",
          {{"n_items", items.size()},
           {"n_windows", windows.size()},
           {"used_tokens", used},
           {"fill_ratio", windows.empty() ? 0.0
                                          : round_sig9(static_cast<double>(used) /
                                                       static_cast<double>(capacity * windows.size()))}}}};
  emit(opt, dump_stable(j), out);
  return 0;
}

int cmd_balance(const Options& opt, std::ostream& out) {
  const PipelineConfig cfg = config_for(opt);
  const auto items = items_from_json(read_json_input(opt.input), cfg.packing.cost);
  const std::size_t workers = opt.workers.value_or(cfg.packing.n_workers);
  const WorkerAssignment a = balance_workers(items, workers);
  Json j = assignment_to_json(a);
  j["n_workers"] = workers;
  emit(opt, dump_stable(j), out);
  return 0;
}

// Balance across workers first, then pack each worker's share into windows.
int cmd_schedule(const Options& opt, std::ostream& out) {
  const PipelineConfig cfg = config_for(opt);
  const auto items = items_from_json(read_json_input(opt.input), cfg.packing.cost);
  const std::size_t workers = opt.workers.value_or(cfg.packing.n_workers);
  const std::int64_t capacity = opt.capacity.value_or(cfg.packing.capacity);
  const WorkerAssignment a = balance_workers(items, workers);

  Json per_worker = Json::array();
  for (std::size_t w = 0; w < workers; ++w) {
    std::vector<SequenceItem> mine;
    for (const auto& id : a.assignments[w]) {
      for (const auto& item : items) {
        if (item.id == id) {
          mine.push_back(item);
          break;
        }
      }
    }
    per_worker.push_back({{"worker", w},
                          {"load", round_sig9(a.loads[w])},
                          {"windows", windows_to_json(pack_windows(mine, capacity))}});
  }
  Json j{{"capacity", capacity},
         {"n_workers", workers},
         {"makespan", round_sig9(a.makespan())},
         {"workers", std::move(per_worker)}};
  emit(opt, dump_stable(j), out);
  return 0;
}

int cmd_mixture(const Options& opt, std::ostream& out) {
  const PipelineConfig cfg = config_for(opt);
  const Json in = read_json_input(opt.input);
  if (!in.is_object() || !in.contains("available")) {
    throw InvalidInputError("mixture input needs an 'available' object");
  }
  std::int64_t budget = cfg.packing.capacity;
  if (in.contains("window_budget")) budget = in["window_budget"].get<std::int64_t>();
  if (opt.budget) budget = *opt.budget;
  const ModalityTokens targets =
      plan_mixture(modality_tokens_from_json(in["available"]), budget, cfg.packing.mixture);
  Json fractions = Json::object();
  for (std::size_t m = 0; m < kModalityCount; ++m) {
    fractions[to_string(static_cast<Modality>(m))] = round_sig9(cfg.packing.mixture[m]);
  }
  Json j{{"window_budget", budget},
         {"fractions", std::move(fractions)},
         {"targets", modality_tokens_to_json(targets)}};
  emit(opt, dump_stable(j), out);
  return 0;
}

int cmd_grounding(const Options& opt, std::ostream& out) {
  if (opt.grounding_action == "parse") {
    const std::string text = read_text(opt.input);
    const GroundingParse parse =
        parse_grounding(text, opt.lenient ? ParseMode::kLenient : ParseMode::kStrict);
    emit(opt, dump_stable(grounding_parse_to_json(parse)), out);
    return 0;
  }
  const Json in = read_json_input(opt.input);
  const Json& items = in.is_object() && in.contains("items") ? in["items"] : in;
  if (!items.is_array()) throw InvalidInputError("emit input must be an array of items");
  std::string text;
  for (const auto& item : items) {
    text += emit_grounding(grounding_item_from_json(item));
    text += '\n';
  }
  emit(opt, text, out);
  return 0;
}

int cmd_gspo_eval(const Options& opt, std::ostream& out) {
  const Json in = read_json_input(opt.input);
  Json groups = in.is_object() && in.contains("groups") ? in["groups"] : in;
  if (groups.is_object()) groups = Json::array({groups});  // a single group
  if (!groups.is_array() || groups.empty()) {
    throw InvalidInputError("gspo-eval input needs a non-empty 'groups' array");
  }
  Json results = Json::array();
  std::vector<double> objectives;
  for (const auto& g : groups) {
    const GspoResult r = gspo_objective(rollouts_from_json(g));
    objectives.push_back(r.objective);
    results.push_back(gspo_result_to_json(r));
  }
  double sum = 0.0;
  for (double o : objectives) sum += o;
  Json j{{"groups", std::move(results)},
         {"batch_objective", round_sig9(sum / static_cast<double>(objectives.size()))}};
  emit(opt, dump_stable(j), out);
  return 0;
}

int cmd_rope_index(const Options& opt, std::ostream& out) {
  const PipelineConfig cfg = config_for(opt);
  const Json in = read_json_input(opt.input);
  const Json& layout_json = in.is_object() && in.contains("layout") ? in["layout"] : in;
  std::vector<double> timestamps;
  double unit = cfg.rope.temporal_unit_s;
  if (in.is_object()) {
    if (in.contains("frame_timestamps")) timestamps = in["frame_timestamps"].get<std::vector<double>>();
    if (in.contains("temporal_unit_s")) unit = in["temporal_unit_s"].get<double>();
  }
  const TokenLayout layout = layout_from_json(layout_json);
  const RopeIndexTable table = build_rope_index_table(layout, timestamps, unit);
  emit(opt, dump_stable(Json{{"rope_index", rope_table_to_json(table)}}), out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slow/Fast video token pipeline: frame classification, token budgets, "
               "rotary indices, grounding markup, packing and GSPO evaluation"};
  app.name("slowfast");
  app.require_subcommand(1);
  Options opt;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Pipeline config JSON")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Write output here instead of stdout");
  };

  auto* classify = app.add_subcommand("classify", "Classify manifest frames as Slow or Fast");
  classify->add_option("--manifest", opt.manifest, "Frame manifest JSON")->required();
  add_config(classify);

  auto* tokenize = app.add_subcommand("tokenize", "Solve the token budget and emit the layout");
  tokenize->add_option("--manifest", opt.manifest, "Frame manifest JSON")->required();
  tokenize->add_option("--mode", opt.mode, "image or video")
      ->check(CLI::IsMember({"image", "video"}));
  add_config(tokenize);

  auto* pack = app.add_subcommand("pack", "Pack sequences into fixed-capacity windows");
  pack->add_option("--input", opt.input, "Items JSON (default stdin)");
  pack->add_option("--capacity", opt.capacity, "Window capacity in tokens");
  add_config(pack);

  auto* balance = app.add_subcommand("balance", "Balance samples across workers");
  balance->add_option("--input", opt.input, "Items JSON (default stdin)");
  balance->add_option("--workers", opt.workers, "Number of workers");
  add_config(balance);

  auto* schedule = app.add_subcommand("schedule", "Balance across workers, then pack each share");
  schedule->add_option("--input", opt.input, "Items JSON (default stdin)");
  schedule->add_option("--workers", opt.workers, "Number of workers");
  schedule->add_option("--capacity", opt.capacity, "Window capacity in tokens");
  add_config(schedule);

  auto* mixture = app.add_subcommand("mixture", "Per-modality token targets for a window");
  mixture->add_option("--input", opt.input, "Availability JSON (default stdin)");
  mixture->add_option("--budget", opt.budget, "Window budget in tokens");
  add_config(mixture);

  auto* grounding = app.add_subcommand("grounding", "Parse or emit grounding markup");
  grounding->add_option("action", opt.grounding_action, "parse or emit")
      ->required()
      ->check(CLI::IsMember({"parse", "emit"}));
  grounding->add_option("--input", opt.input, "Markup text (parse) or items JSON (emit)");
  grounding->add_flag("--lenient,!--strict", opt.lenient,
                      "Skip malformed spans instead of failing (default --strict)");
  grounding->add_option("--out", opt.out, "Write output here instead of stdout");

  auto* gspo = app.add_subcommand("gspo-eval", "Evaluate the GSPO objective for rollout groups");
  gspo->add_option("--input", opt.input, "Batch JSON (default stdin)");
  gspo->add_option("--out", opt.out, "Write output here instead of stdout");

  auto* rope = app.add_subcommand("rope-index", "3D rotary indices for a token layout");
  rope->add_option("--input", opt.input, "Layout JSON (default stdin)");
  add_config(rope);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify->parsed()) return cmd_classify(opt, out);
    if (tokenize->parsed()) return cmd_tokenize(opt, out);
    if (pack->parsed()) return cmd_pack(opt, out);
    if (balance->parsed()) return cmd_balance(opt, out);
    if (schedule->parsed()) return cmd_schedule(opt, out);
    if (mixture->parsed()) return cmd_mixture(opt, out);
    if (grounding->parsed()) return cmd_grounding(opt, out);
    if (gspo->parsed()) return cmd_gspo_eval(opt, out);
    if (rope->parsed()) return cmd_rope_index(opt, out);
  } catch (const FrameErrors& e) {
    for (const auto& line : e.lines()) err << "error: " << line << "\n";
    return 2;
  } catch (const GroundingParseError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace slowfast
