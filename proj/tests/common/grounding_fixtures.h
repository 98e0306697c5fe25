#ifndef SLOWFAST_TESTS_GROUNDING_FIXTURES_H_
#define SLOWFAST_TESTS_GROUNDING_FIXTURES_H_

#include <random>
#include <string>
#include <vector>

#include "slowfast/grounding.h"

namespace slowfast::testing {

struct InvalidFixture {
  std::string text;
  std::size_t offset;  // byte offset the parser must report
  std::string reason;  // substring of the reported reason
};

inline std::vector<InvalidFixture> invalid_grounding_fixtures() {
  return {
      {"<|box_start|>[[10, 10, 5, 5]]<|box_end|>", 14, "inverted box"},
      {"xy <|polygon_start|>[[[1, 1], [5, 9]]]<|polygon_end|>", 21, "at least 3 vertices"},
      {"<|point_start|>[[1000, 5]]<|point_end|>", 17, "out of range"},
      {"<|point_start|>[[-1, 5]]<|point_end|>", 17, "out of range"},
      {"<|point_start|>[[1.5, 5]]<|point_end|>", 17, "integer"},
      {"<|point_start|>[[1, 5]]", 0, "unbalanced"},
      {"<|box_start|>[[1, 2, 3, 4]]<|point_end|>", 0, "unbalanced"},
      {"text <|point_end|>", 5, "unbalanced"},
      {"<|box_start|>[[1, 2, 3]]<|box_end|>", 14, "4 coordinates"},
      {"<|polygon_start|>[[[1, 1], [1, 1], [1, 1]]]<|polygon_end|>", 18, "zero area"},
      {"<|polygon_start|>[[[10, 10], [50, 80], [90, 10]]]<|polygon_end|>", 18, "clockwise"},
      {"<|clip_time_start|>[5.0, 2.0]<|clip_time_end|>", 19, "start"},
      {"<|ocr_text_start|>abc<|ocr_text_end|> no geometry", 0, "box or polygon"},
      {"<|point_start|>[[1, 2]] trailing<|point_end|>", 24, "trailing"},
  };
}

inline std::string random_text(std::mt19937_64& rng, bool caption) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyz ABCXYZ0123456789.,;:!?-_'\"()[]{}<>|/\\\xc3\xa9";
  std::uniform_int_distribution<std::size_t> len(caption ? 1 : 0, 24);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (;;) {
    std::string s;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) s += alphabet[pick(rng)];
    if (s.find("<|") != std::string::npos) continue;
    // Avoid a trailing '<' running into the closing tag's '|'.
    if (!s.empty() && s.back() == '<') continue;
    if (caption && (s.front() == ' ' || s.back() == ' ')) continue;
    return s;
  }
}

inline GroundPoint random_point(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(0, 999);
  return {c(rng), c(rng)};
}

inline GroundPolygon random_polygon(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(3, 7);
  for (;;) {
    GroundPolygon p;
    const int k = n(rng);
    for (int i = 0; i < k; ++i) p.push_back(random_point(rng));
    const long long o = polygon_orientation(p);
    if (o == 0) continue;
    if (o < 0) std::reverse(p.begin(), p.end());
    return p;
  }
}

inline GroundingItem random_grounding_item(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 6);
  std::uniform_int_distribution<int> count(1, 4);
  std::bernoulli_distribution coin(0.5);
  GroundingItem it;
  it.kind = static_cast<GroundingKind>(kind(rng));
  switch (it.kind) {
    case GroundingKind::kPoints:
      for (int i = count(rng); i > 0; --i) it.points.push_back(random_point(rng));
      if (coin(rng)) it.label = random_text(rng, false);
      break;
    case GroundingKind::kBoxes:
    case GroundingKind::kOcrBoxes:
      for (int i = count(rng); i > 0; --i) {
        const GroundPoint a = random_point(rng), b = random_point(rng);
        it.boxes.push_back({std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x),
                            std::max(a.y, b.y)});
      }
      if (it.kind == GroundingKind::kOcrBoxes || coin(rng)) it.label = random_text(rng, false);
      break;
    case GroundingKind::kPolygons:
    case GroundingKind::kOcrPolygons:
      for (int i = count(rng) % 3 + 1; i > 0; --i) it.polygons.push_back(random_polygon(rng));
      if (it.kind == GroundingKind::kOcrPolygons || coin(rng)) it.label = random_text(rng, false);
      break;
    case GroundingKind::kClipTime: {
      std::uniform_real_distribution<double> t(0.0, 7200.0);
      std::uniform_int_distribution<int> tenths(0, 72000);
      double a, b;
      if (coin(rng)) {
        a = t(rng);
        b = t(rng);
      } else {
        a = tenths(rng) / 10.0;
        b = tenths(rng) / 10.0;
      }
      it.start_s = std::min(a, b);
      it.end_s = std::max(a, b);
      if (coin(rng)) {
        std::string c;
        do {
          c = random_text(rng, true);
        } while (c.empty());
        it.label = c;
      }
      break;
    }
    case GroundingKind::kObjectRef:
      it.label = random_text(rng, false);
      break;
  }
  return it;
}

}  // namespace slowfast::testing

#endif  // SLOWFAST_TESTS_GROUNDING_FIXTURES_H_
