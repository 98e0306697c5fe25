// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "grounding_fixtures.h"
#include "oracles.h"
#include "slowfast/budget_solver.h"
#include "slowfast/error.h"
#include "slowfast/frame_analysis.h"
#include "slowfast/grounding.h"
#include "slowfast/gspo.h"
#include "slowfast/packing.h"
#include "slowfast/position_encoding.h"
#include "slowfast/sequence_assembly.h"
#include "test_support.h"

namespace sf = slowfast;
using i64 = std::int64_t;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& title, Outcome& o, double secs, double limit_s = 0) {
  if (limit_s > 0) o.require(secs < limit_s, "runtime over limit");
  std::printf("[%s] %d. %s (%.2fs%s) %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
              limit_s > 0 ? (", limit " + std::to_string(static_cast<int>(limit_s)) + "s").c_str() : "",
              o.detail.str().c_str());
  if (!o.pass) ++failures;
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937 rng(1001);
  const sf::SimilarityConfig cfg;
  std::size_t mismatches = 0;
  for (int seq = 0; seq < 200; ++seq) {
    const auto frames = sf::testing::random_frame_sequence(rng, 4 + seq % 13);
    const auto classes = sf::classify_frames(frames, cfg);
    o.require(classes.at(0).kind == sf::FrameKind::kSlow, "frame 0 not Slow");
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < frames.size(); ++i) {
      const double f =
          sf::patch_similarity(frames[anchor], frames[i], cfg.grid_side, cfg.per_patch_tol).unchanged_fraction;
      const bool fast = f > 0.95;  // "exceeds 95%"
      const sf::FrameClass want{i, fast ? sf::FrameKind::kFast : sf::FrameKind::kSlow, fast ? anchor : i};
      if (!(classes[i] == want)) ++mismatches;
      if (!fast) anchor = i;
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.detail << "200 sequences, " << mismatches << " mismatches";
  report(1, "Slow-Fast rule conformance", o, seconds_since(t0), 10);
}

std::vector<sf::FrameClass> classes_for(const std::vector<bool>& slow) {
  std::vector<sf::FrameClass> out;
  std::size_t anchor = 0;
  for (std::size_t i = 0; i < slow.size(); ++i) {
    if (slow[i]) anchor = i;
    out.push_back({i, slow[i] ? sf::FrameKind::kSlow : sf::FrameKind::kFast, anchor});
  }
  return out;
}

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937 rng(2002);
  std::uniform_int_distribution<int> nframes(1, 8), dim(20, 1000), coin(0, 2), pick(0, 2);
  std::uniform_int_distribution<i64> budget(40, 10000);
  int agree = 0, infeasible = 0;
  for (int inst = 0; inst < 500; ++inst) {
    std::vector<sf::FrameDims> shapes;
    for (int s = 0; s < 3; ++s) shapes.push_back({dim(rng), dim(rng)});
    const int n = nframes(rng);
    std::vector<bool> slow;
    std::vector<sf::FrameDims> dims;
    for (int i = 0; i < n; ++i) {
      slow.push_back(i == 0 || coin(rng) == 0);
      dims.push_back(shapes[pick(rng)]);
    }
    const auto classes = classes_for(slow);
    sf::GeometryConfig cfg;
    cfg.video_token_budget = budget(rng);
    cfg.max_tokens_per_frame = std::min<i64>(cfg.video_token_budget, 4096);

    i64 scan = cfg.min_tokens_per_frame - 1;
    for (i64 t = cfg.min_tokens_per_frame; t <= cfg.max_tokens_per_frame; ++t) {
      if (sf::total_quantized_tokens(classes, dims, t, cfg) <= cfg.video_token_budget) scan = t;
    }
    try {
      const sf::BudgetPlan plan = sf::solve_video_budget(classes, dims, cfg);
      o.require(plan.tokens_per_slow == scan, "binary search != linear scan");
      o.require(plan.total_tokens <= cfg.video_token_budget, "plan over budget");
      if (plan.tokens_per_slow == scan) ++agree;
    } catch (const sf::BudgetTooSmallError&) {
      o.require(scan < cfg.min_tokens_per_frame, "spurious budget-too-small");
      ++infeasible;
      ++agree;
    }
  }
  auto relaxed = [](i64 t) { return 10 * t + 20 * sf::fast_tokens_for(t, 0.3); };
  const i64 t = sf::max_feasible(1, 75000, 75000, relaxed);
  o.require(t == 4688, "relaxed instance T = " + std::to_string(t));
  o.detail << agree << "/500 agree (" << infeasible << " infeasible), relaxed T = " << t;
  report(2, "Budget solver optimality", o, seconds_since(t0), 30);
}

void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const sf::GeometryConfig cfg;
  const sf::PatchGrid g = sf::fit_grid(1008, 504, cfg.image_token_cap, cfg);
  o.require(g.tokens() == 648, "1008x504 gives " + std::to_string(g.tokens()));
  std::mt19937 rng(3003);
  std::uniform_int_distribution<int> dim(1, 20000);
  i64 worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const int w = dim(rng), h = dim(rng);
    const sf::PatchGrid p = sf::fit_image({w, h}, cfg);
    worst = std::max(worst, p.tokens());
    o.require(p.tokens() <= cfg.image_token_cap, "cap exceeded");
    // Some single scale s <= 1 must put both axes within half a unit of the
    // rounded grid (or floor them to one unit).
    const double u = cfg.unit_px();
    const double rl = p.rows == 1 ? 0.0 : (p.rows - 0.5) * u / h, rh = (p.rows + 0.5) * u / h;
    const double cl = p.cols == 1 ? 0.0 : (p.cols - 0.5) * u / w, ch = (p.cols + 0.5) * u / w;
    o.require(std::max(rl, cl) < std::min({rh, ch, 1.0 + 1e-12}),
              "distortion above one unit for " + std::to_string(w) + "x" + std::to_string(h));
  }
  o.detail << "1008x504 -> " << g.tokens() << ", max over 1000 random = " << worst;
  report(3, "Geometry", o, seconds_since(t0));
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937 rng(4004);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  sf::PosEmbedGrid grid;
  grid.dim = 32;
  grid.values.resize(static_cast<std::size_t>(grid.side) * grid.side * grid.dim);
  for (auto& x : grid.values) x = v(rng);
  const auto same = sf::interpolate_pos_embed(grid, 27, 27);
  double max_err = 0;
  for (std::size_t i = 0; i < same.size(); ++i) max_err = std::max(max_err, std::abs(same[i] - grid.values[i]));
  o.require(max_err == 0.0, "identity error");

  const sf::RopeConfig cfg = sf::RopeConfig::vit_2d(64);
  std::uniform_int_distribution<i64> pos(0, 4096);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst_rel = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    std::vector<double> q(64), k(64);
    for (auto& x : q) x = gauss(rng);
    for (auto& x : k) x = gauss(rng);
    const i64 r1 = pos(rng), c1 = pos(rng), r2 = pos(rng), c2 = pos(rng), dr = pos(rng), dc = pos(rng);
    auto dot = [&](i64 a, i64 b, i64 c, i64 d) {
      auto qq = q, kk = k;
      sf::apply_rotary(qq, sf::rope_angles_2d(a, b, cfg));
      sf::apply_rotary(kk, sf::rope_angles_2d(c, d, cfg));
      return std::inner_product(qq.begin(), qq.end(), kk.begin(), 0.0);
    };
    const double norm = std::sqrt(std::inner_product(q.begin(), q.end(), q.begin(), 0.0) *
                                  std::inner_product(k.begin(), k.end(), k.begin(), 0.0));
    const double rel = std::abs(dot(r1, c1, r2, c2) - dot(r1 + dr, c1 + dc, r2 + dr, c2 + dc)) / norm;
    worst_rel = std::max(worst_rel, rel);
  }
  o.require(worst_rel <= 1e-9, "offset invariance");

  sf::TokenLayout text;
  for (int i = 0; i < 50; ++i) text.elements.push_back(sf::SpecialToken{"w"});
  const auto table = sf::build_rope_index_table(text, {});
  bool one_d = table.size() == 50;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const i64 n = static_cast<i64>(i);
    one_d = one_d && table[i] == sf::RopeIndex{n, n, n};
  }
  o.require(one_d, "pure text table");
  o.detail << "identity max err " << max_err << ", worst relative offset error " << worst_rel;
  report(4, "Position encoding", o, seconds_since(t0));
}

sf::GroundingItem make_points(std::vector<sf::GroundPoint> p, std::optional<std::string> label = {}) {
  sf::GroundingItem it;
  it.kind = sf::GroundingKind::kPoints;
  it.points = std::move(p);
  it.label = std::move(label);
  return it;
}

sf::GroundingItem make_boxes(std::vector<sf::GroundBox> b, std::optional<std::string> label,
                             sf::GroundingKind kind = sf::GroundingKind::kBoxes) {
  sf::GroundingItem it;
  it.kind = kind;
  it.boxes = std::move(b);
  it.label = std::move(label);
  return it;
}

sf::GroundingItem make_polygon(std::string label, sf::GroundingKind kind) {
  sf::GroundingItem it;
  it.kind = kind;
  it.polygons = {{{10, 10}, {90, 10}, {50, 80}}};
  it.label = std::move(label);
  return it;
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937_64 rng(5005);
  int ok = 0;
  for (int i = 0; i < 10000; ++i) {
    const sf::GroundingItem it = sf::testing::random_grounding_item(rng);
    const std::string s = sf::emit_grounding(it);
    const auto parsed = sf::parse_grounding(s);
    const bool same = parsed.items.size() == 1 && parsed.items[0] == it &&
                      sf::emit_grounding(parsed.items[0]) == s;
    if (same) ++ok;
  }
  o.require(ok == 10000, "round trip");

  sf::GroundingItem clip;
  clip.kind = sf::GroundingKind::kClipTime;
  clip.start_s = 22.3;
  clip.end_s = 23.8;
  clip.label = "handbag appears";
  sf::GroundingItem ref;
  ref.kind = sf::GroundingKind::kObjectRef;
  ref.label = "obj";
  const std::vector<std::pair<sf::GroundingItem, std::string>> golden = {
      {make_points({{500, 250}}), "<|point_start|>[[500, 250]]<|point_end|>"},
      {make_points({{1, 2}, {3, 4}}), "<|point_start|>[[1, 2], [3, 4]]<|point_end|>"},
      {make_points({{1, 2}}, "obj"),
       "<|object_ref_start|>obj<|object_ref_end|><|point_start|>[[1, 2]]<|point_end|>"},
      {make_boxes({{1, 2, 3, 4}}, {}), "<|box_start|>[[1, 2, 3, 4]]<|box_end|>"},
      {make_boxes({{1, 2, 3, 4}, {5, 6, 7, 8}}, {}), "<|box_start|>[[1, 2, 3, 4], [5, 6, 7, 8]]<|box_end|>"},
      {make_boxes({{1, 2, 3, 4}}, "dog"),
       "<|object_ref_start|>dog<|object_ref_end|><|box_start|>[[1, 2, 3, 4]]<|box_end|>"},
      {make_boxes({{1, 2, 3, 4}}, "text", sf::GroundingKind::kOcrBoxes),
       "<|ocr_text_start|>text<|ocr_text_end|><|box_start|>[[1, 2, 3, 4]]<|box_end|>"},
      {make_polygon("obj", sf::GroundingKind::kPolygons),
       "<|object_ref_start|>obj<|object_ref_end|><|polygon_start|>[[[10, 10], [90, 10], [50, 80]]]<|polygon_end|>"},
      {make_polygon("text", sf::GroundingKind::kOcrPolygons),
       "<|ocr_text_start|>text<|ocr_text_end|><|polygon_start|>[[[10, 10], [90, 10], [50, 80]]]<|polygon_end|>"},
      {clip, "<|clip_time_start|>[22.3, 23.8]<|clip_time_end|> handbag appears"},
      {ref, "<|object_ref_start|>obj<|object_ref_end|>"},
  };
  int golden_ok = 0;
  for (const auto& [item, text] : golden) {
    const bool match = sf::emit_grounding(item) == text;
    o.require(match, "golden " + text);
    golden_ok += match;
  }

  const std::vector<std::string> invalid = {
      "<|box_start|>[[10, 10, 5, 5]]<|box_end|>",
      "<|polygon_start|>[[[1, 1], [5, 9]]]<|polygon_end|>",
      "<|point_start|>[[1000, 5]]<|point_end|>",
  };
  int rejected = 0;
  for (const auto& text : invalid) {
    try {
      sf::parse_grounding(text, sf::ParseMode::kStrict);
    } catch (const sf::GroundingParseError&) {
      ++rejected;
    }
  }
  o.require(rejected == static_cast<int>(invalid.size()), "invalid fixture accepted");
  o.detail << ok << "/10000 round trips, " << golden_ok << "/" << golden.size() << " golden, "
           << rejected << "/" << invalid.size() << " invalid rejected";
  report(5, "Grounding grammar", o, seconds_since(t0));
}

void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937 rng(6006);
  std::uniform_int_distribution<int> count(1, 12), workers(1, 4);
  std::uniform_int_distribution<i64> cap(5, 100);
  int ffd_instances = 0, lpt_instances = 0;
  double worst_ffd = 0, worst_lpt = 0;
  for (int inst = 0; inst < 2000; ++inst) {
    const i64 capacity = cap(rng);
    std::uniform_int_distribution<i64> len(1, capacity);
    std::vector<i64> lengths(static_cast<std::size_t>(count(rng)));
    std::vector<sf::SequenceItem> items;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      lengths[i] = len(rng);
      items.push_back({"i" + std::to_string(i), lengths[i], sf::Modality::kText, static_cast<double>(lengths[i])});
    }
    const auto windows = sf::pack_windows(items, capacity);
    const int opt = sf::testing::optimal_bin_count(lengths, capacity);
    o.require(static_cast<double>(windows.size()) <= opt * 11.0 / 9.0 + 1.0, "FFD bound");
    worst_ffd = std::max(worst_ffd, static_cast<double>(windows.size()) / opt);
    ++ffd_instances;

    if (items.size() <= 10) {
      const int m = workers(rng);
      std::vector<double> costs;
      for (const auto& it : items) costs.push_back(it.est_cost);
      const auto a = sf::balance_workers(items, static_cast<std::size_t>(m));
      const double best = sf::testing::optimal_makespan(costs, m);
      o.require(a.makespan() <= (4.0 / 3.0 - 1.0 / (3.0 * m)) * best + 1e-9, "LPT bound");
      worst_lpt = std::max(worst_lpt, a.makespan() / best);
      ++lpt_instances;
    }
  }
  const sf::ModalityTokens t = sf::plan_mixture({100000, 100000, 100000}, 100);
  o.require(t == sf::ModalityTokens{24, 50, 26}, "mixture");
  o.detail << ffd_instances << " FFD instances (worst bins/opt " << worst_ffd << "), " << lpt_instances
           << " LPT instances (worst makespan/opt " << worst_lpt << "), mixture {" << t[0] << ", "
           << t[1] << ", " << t[2] << "}";
  report(6, "Packing and balancing", o, seconds_since(t0), 60);
}

sf::GroupRollouts group_with_ratios(std::vector<double> rewards, const std::vector<double>& ratios) {
  sf::GroupRollouts g;
  g.rewards = std::move(rewards);
  for (double s : ratios) {
    g.token_logprobs_old.push_back({-3.0});
    g.token_logprobs_new.push_back({-3.0 + std::log(s)});
  }
  return g;
}

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const auto adv = sf::group_advantages(std::vector<double>{1, 0});
  o.require(std::abs(adv[0] - 1) <= 1e-12 && std::abs(adv[1] + 1) <= 1e-12, "advantages [1, -1]");
  const std::vector<double> lp_old = {-4.0, -4.0};
  const std::vector<double> lp_new = {-4.0 + std::log(2.0), -4.0 + std::log(8.0)};
  const double s = sf::sequence_ratio(lp_new, lp_old);
  o.require(std::abs(s - 4.0) <= 1e-12, "ratio 4");
  const double obj = sf::gspo_objective(group_with_ratios({1, 0}, {1.5, 0.5})).objective;
  o.require(std::abs(obj - 0.2) <= 1e-12, "objective 0.2");
  const double zero = sf::gspo_objective(group_with_ratios({0.7, 0.7, 0.7}, {0.3, 1.0, 2.5})).objective;
  o.require(zero == 0.0, "zero variance objective");

  std::mt19937 rng(7007);
  std::uniform_real_distribution<double> lp(-5.0, 0.0);
  std::normal_distribution<double> rw(0.0, 1.0);
  sf::GroupRollouts g;
  for (int i = 0; i < 16; ++i) {
    g.rewards.push_back(rw(rng));
    std::vector<double> n(2 + i % 5), d(n.size());
    for (auto& x : n) x = lp(rng);
    for (auto& x : d) x = lp(rng);
    g.token_logprobs_new.push_back(n);
    g.token_logprobs_old.push_back(d);
  }
  const double base = sf::gspo_objective(g).objective;
  std::vector<std::size_t> perm(g.rewards.size());
  std::iota(perm.begin(), perm.end(), 0);
  int invariant = 0;
  for (int t = 0; t < 1000; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    sf::GroupRollouts p;
    for (auto i : perm) {
      p.rewards.push_back(g.rewards[i]);
      p.token_logprobs_new.push_back(g.token_logprobs_new[i]);
      p.token_logprobs_old.push_back(g.token_logprobs_old[i]);
    }
    invariant += sf::gspo_objective(p).objective == base;
  }
  o.require(invariant == 1000, "permutation invariance");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "adv [%.15g, %.15g], ratio %.15g, objective %.15g, %d/1000 shuffles equal",
                adv[0], adv[1], s, obj, invariant);
  o.detail << buf;
  report(7, "GSPO kernel", o, seconds_since(t0));
}

std::string run_command(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  std::array<char, 65536> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  status = pclose(p);
  return out;
}

void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const std::string cli = SLOWFAST_CLI_PATH;
  const std::string data = SLOWFAST_TEST_DATA;
  std::size_t bytes = 0;
  for (const char* manifest : {"/scene_cut/manifest.json", "/manifest_10slow_20fast.json"}) {
    int s1 = 0, s8 = 0;
    const std::string base = " '" + cli + "' tokenize --manifest '" + data + manifest + "'";
    const std::string a = run_command("SLOWFAST_THREADS=1" + base, s1);
    const std::string b = run_command("SLOWFAST_THREADS=8" + base, s8);
    o.require(s1 == 0 && s8 == 0, std::string("cli failed on ") + manifest);
    o.require(!a.empty() && a == b, std::string("outputs differ on ") + manifest);
    bytes += a.size();
  }
  o.detail << "2 manifests, " << bytes << " bytes compared";
  report(8, "End-to-end determinism", o, seconds_since(t0));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                       criterion_5, criterion_6, criterion_7, criterion_8};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      std::printf("[FAIL] %zu. unexpected exception: %s\n", i + 1, e.what());
      ++failures;
    }
  }
  std::printf("%d/8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
