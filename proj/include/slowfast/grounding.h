#ifndef SLOWFAST_GROUNDING_H_
#define SLOWFAST_GROUNDING_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slowfast {

// Coordinates are integers normalized to [0, 1000).
inline constexpr int kCoordRange = 1000;

// floor(v_px / extent_px * 1000), clamped to 999.
int normalize_coord(double v_px, double extent_px);

struct GroundPoint {
  int x = 0;
  int y = 0;
  bool operator==(const GroundPoint&) const = default;
};

// Top-left (x1, y1) and bottom-right (x2, y2).
struct GroundBox {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;
  bool operator==(const GroundBox&) const = default;
};

// Vertices in clockwise order (image coordinates, y pointing down).
using GroundPolygon = std::vector<GroundPoint>;

enum class GroundingKind {
  kPoints,
  kBoxes,
  kPolygons,
  kOcrBoxes,
  kOcrPolygons,
  kClipTime,
  kObjectRef,
};

const char* to_string(GroundingKind kind);
std::optional<GroundingKind> grounding_kind_from_string(std::string_view name);

// One grounding span. Which payload field is used depends on kind:
//   kPoints / kBoxes / kPolygons: geometry, label = optional object ref
//   kOcrBoxes / kOcrPolygons:     geometry, label = the OCR text (required)
//   kClipTime:                    start_s/end_s, label = optional caption
//   kObjectRef:                   label only (a bare object reference)
struct GroundingItem {
  GroundingKind kind = GroundingKind::kPoints;
  std::optional<std::string> label;
  std::vector<GroundPoint> points;
  std::vector<GroundBox> boxes;
  std::vector<GroundPolygon> polygons;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const GroundingItem&) const = default;
};

// Twice the signed shoelace area; positive means clockwise on screen.
long long polygon_orientation(const GroundPolygon& polygon);

// Throws InvalidInputError if the item breaks its kind's invariants.
void validate_item(const GroundingItem& item);

std::string emit_grounding(const GroundingItem& item);

enum class ParseMode { kStrict, kLenient };

struct ParseIssue {
  std::size_t offset = 0;
  std::string reason;
};

struct GroundingParse {
  std::vector<GroundingItem> items;
  // Lenient mode only: malformed spans that were skipped or repaired.
  std::vector<ParseIssue> issues;
};

// Extracts every grounding span from free text in order of appearance.
// Strict mode throws GroundingParseError at the first malformed span.
// Lenient mode skips malformed spans, reverses counter-clockwise polygons,
// and reports both in issues.
GroundingParse parse_grounding(std::string_view text,
                               ParseMode mode = ParseMode::kStrict);

}  // namespace slowfast

#endif  // SLOWFAST_GROUNDING_H_
