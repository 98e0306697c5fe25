#include "slowfast/grounding.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "slowfast/error.h"

namespace slowfast {
namespace {

constexpr std::string_view kPointStart = "<|point_start|>";
constexpr std::string_view kPointEnd = "<|point_end|>";
constexpr std::string_view kBoxStart = "<|box_start|>";
constexpr std::string_view kBoxEnd = "<|box_end|>";
constexpr std::string_view kPolygonStart = "<|polygon_start|>";
constexpr std::string_view kPolygonEnd = "<|polygon_end|>";
constexpr std::string_view kRefStart = "<|object_ref_start|>";
constexpr std::string_view kRefEnd = "<|object_ref_end|>";
constexpr std::string_view kOcrStart = "<|ocr_text_start|>";
constexpr std::string_view kOcrEnd = "<|ocr_text_end|>";
constexpr std::string_view kClipStart = "<|clip_time_start|>";
constexpr std::string_view kClipEnd = "<|clip_time_end|>";

constexpr std::string_view kTagOpen = "<|";

void append_int(std::string& out, int v) { out += std::to_string(v); }

// Shortest fixed-notation text that reads back to the same double.
std::string format_seconds(double v) {
  std::array<char, 512> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed);
  if (ec != std::errc()) throw InvalidInputError("cannot format time value");
  std::string s(buf.data(), end);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

void append_point(std::string& out, const GroundPoint& p) {
  out += '[';
  append_int(out, p.x);
  out += ", ";
  append_int(out, p.y);
  out += ']';
}

std::string geometry_body(const GroundingItem& item) {
  std::string out = "[";
  switch (item.kind) {
    case GroundingKind::kPoints:
      for (std::size_t i = 0; i < item.points.size(); ++i) {
        if (i) out += ", ";
        append_point(out, item.points[i]);
      }
      break;
    case GroundingKind::kBoxes:
    case GroundingKind::kOcrBoxes:
      for (std::size_t i = 0; i < item.boxes.size(); ++i) {
        const GroundBox& b = item.boxes[i];
        if (i) out += ", ";
        out += '[';
        append_int(out, b.x1);
        out += ", ";
        append_int(out, b.y1);
        out += ", ";
        append_int(out, b.x2);
        out += ", ";
        append_int(out, b.y2);
        out += ']';
      }
      break;
    case GroundingKind::kPolygons:
    case GroundingKind::kOcrPolygons:
      for (std::size_t i = 0; i < item.polygons.size(); ++i) {
        if (i) out += ", ";
        out += '[';
        for (std::size_t j = 0; j < item.polygons[i].size(); ++j) {
          if (j) out += ", ";
          append_point(out, item.polygons[i][j]);
        }
        out += ']';
      }
      break;
    default:
      break;
  }
  out += ']';
  return out;
}

bool in_range(int v) { return v >= 0 && v < kCoordRange; }

bool has_tag_open(std::string_view s) { return s.find(kTagOpen) != std::string_view::npos; }

// ---------------------------------------------------------------------------
// Nested list reader for coordinate payloads.

struct Node {
  std::size_t offset = 0;
  bool is_list = false;
  std::vector<Node> children;
  double value = 0.0;
  bool integral = false;
};

class ListReader {
 public:
  ListReader(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  Node read_all() {
    skip_ws();
    Node n = read_value(0);
    skip_ws();
    if (pos_ != text_.size()) fail(pos_, "unexpected trailing characters");
    return n;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& reason) const {
    throw GroundingParseError(base_ + at, reason);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  Node read_value(int depth) {
    if (depth > 8) fail(pos_, "list nesting too deep");
    if (pos_ >= text_.size()) fail(pos_, "unexpected end of coordinate list");
    if (text_[pos_] == '[') return read_list(depth);
    return read_number();
  }

  Node read_list(int depth) {
    Node n;
    n.offset = base_ + pos_;
    n.is_list = true;
    ++pos_;  // '['
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return n;
    }
    while (true) {
      skip_ws();
      n.children.push_back(read_value(depth + 1));
      skip_ws();
      if (pos_ >= text_.size()) fail(pos_, "unterminated list");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return n;
      }
      fail(pos_, std::string("unexpected character '") + text_[pos_] + "' in list");
    }
  }

  Node read_number() {
    Node n;
    n.offset = base_ + pos_;
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    bool digits = false;
    bool fractional = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c >= '0' && c <= '9') {
        digits = true;
      } else if (c == '.' || c == 'e' || c == 'E') {
        fractional = true;
      } else if ((c == '-' || c == '+') && pos_ > start &&
                 (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')) {
        // exponent sign
      } else {
        break;
      }
      ++pos_;
    }
    if (!digits) fail(start, "expected a number");
    std::string_view token = text_.substr(start, pos_ - start);
    if (token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
      fail(start, "malformed number '" + std::string(token) + "'");
    }
    n.value = v;
    n.integral = !fractional;
    return n;
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------

struct TagInfo {
  std::string_view start;
  std::string_view end;
};

constexpr std::array<TagInfo, 6> kSpanTags = {{
    {kPointStart, kPointEnd},
    {kBoxStart, kBoxEnd},
    {kPolygonStart, kPolygonEnd},
    {kRefStart, kRefEnd},
    {kOcrStart, kOcrEnd},
    {kClipStart, kClipEnd},
}};

class MarkupParser {
 public:
  MarkupParser(std::string_view text, ParseMode mode) : text_(text), mode_(mode) {}

  GroundingParse run() {
    std::size_t pos = 0;
    while (true) {
      const std::size_t open = text_.find(kTagOpen, pos);
      if (open == std::string_view::npos) break;
      const std::size_t close = text_.find("|>", open + 2);
      if (close == std::string_view::npos) break;
      const std::string_view tag = text_.substr(open, close + 2 - open);

      const TagInfo* info = nullptr;
      bool stray_end = false;
      for (const TagInfo& t : kSpanTags) {
        if (tag == t.start) info = &t;
        if (tag == t.end) stray_end = true;
      }
      if (info == nullptr && !stray_end) {
        // Some other special token; plain text as far as grounding goes.
        pos = close + 2;
        continue;
      }

      resume_ = open + tag.size();
      try {
        if (stray_end) fail(open, "unbalanced delimiter: " + std::string(tag) + " without opening tag");
        pos = parse_span(open, *info);
      } catch (const GroundingParseError& e) {
        if (mode_ == ParseMode::kStrict) throw;
        out_.issues.push_back({e.offset(), e.reason()});
        pos = resume_;
      }
    }
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& reason) const {
    throw GroundingParseError(at, reason);
  }

  // Position of the closing tag for a span opened at body_start. Any other
  // tag in between means the delimiters are unbalanced.
  std::size_t find_close(std::size_t open, std::size_t body_start, std::string_view end_tag) {
    const std::size_t end = text_.find(end_tag, body_start);
    const std::size_t next_open = text_.find(kTagOpen, body_start);
    if (end == std::string_view::npos || next_open < end) {
      fail(open, "unbalanced delimiter: missing " + std::string(end_tag));
    }
    resume_ = end + end_tag.size();
    return end;
  }

  std::size_t parse_span(std::size_t open, const TagInfo& info) {
    const std::size_t body = open + info.start.size();
    const std::size_t end = find_close(open, body, info.end);
    const std::size_t after = end + info.end.size();
    const std::string_view inner = text_.substr(body, end - body);

    if (info.start == kClipStart) return parse_clip(body, inner, after);

    if (info.start == kRefStart || info.start == kOcrStart) {
      const bool ocr = info.start == kOcrStart;
      std::string label(inner);
      for (const TagInfo& geom : {kSpanTags[0], kSpanTags[1], kSpanTags[2]}) {
        if (text_.substr(after, geom.start.size()) != geom.start) continue;
        if (ocr && geom.start == kPointStart) break;
        GroundingItem item = parse_geometry(after, geom);
        item.label = std::move(label);
        if (ocr) {
          item.kind = item.kind == GroundingKind::kBoxes ? GroundingKind::kOcrBoxes
                                                          : GroundingKind::kOcrPolygons;
        }
        out_.items.push_back(std::move(item));
        return resume_;
      }
      if (ocr) fail(open, "OCR text must be followed by a box or polygon");
      GroundingItem item;
      item.kind = GroundingKind::kObjectRef;
      item.label = std::move(label);
      out_.items.push_back(std::move(item));
      return after;
    }

    out_.items.push_back(parse_geometry(open, info));
    return after;
  }

  GroundingItem parse_geometry(std::size_t open, const TagInfo& info) {
    const std::size_t body = open + info.start.size();
    const std::size_t end = find_close(open, body, info.end);
    const Node root = ListReader(text_.substr(body, end - body), body).read_all();

    GroundingItem item;
    if (!root.is_list || root.children.empty()) {
      fail(body, "expected a non-empty list of coordinates");
    }
    if (info.start == kPointStart) {
      item.kind = GroundingKind::kPoints;
      for (const Node& n : root.children) item.points.push_back(point_of(n));
    } else if (info.start == kBoxStart) {
      item.kind = GroundingKind::kBoxes;
      for (const Node& n : root.children) {
        const auto v = ints_of(n, 4, "box");
        if (v[0] > v[2] || v[1] > v[3]) fail(n.offset, "inverted box (need x1 <= x2 and y1 <= y2)");
        item.boxes.push_back({v[0], v[1], v[2], v[3]});
      }
    } else {
      item.kind = GroundingKind::kPolygons;
      for (const Node& poly : root.children) {
        if (!poly.is_list) fail(poly.offset, "expected a polygon vertex list");
        GroundPolygon vertices;
        for (const Node& n : poly.children) vertices.push_back(point_of(n));
        if (vertices.size() < 3) {
          fail(poly.offset, "polygon needs at least 3 vertices, got " +
                                std::to_string(vertices.size()));
        }
        const long long orient = polygon_orientation(vertices);
        if (orient == 0) fail(poly.offset, "degenerate polygon with zero area");
        if (orient < 0) {
          if (mode_ == ParseMode::kStrict) {
            fail(poly.offset, "polygon vertices are counter-clockwise");
          }
          std::reverse(vertices.begin(), vertices.end());
          out_.issues.push_back({poly.offset, "reversed counter-clockwise polygon"});
        }
        item.polygons.push_back(std::move(vertices));
      }
    }
    return item;
  }

  std::size_t parse_clip(std::size_t body, std::string_view inner, std::size_t after) {
    const Node root = ListReader(inner, body).read_all();
    if (!root.is_list || root.children.size() != 2 || root.children[0].is_list ||
        root.children[1].is_list) {
      fail(body, "clip time must be [t1, t2]");
    }
    GroundingItem item;
    item.kind = GroundingKind::kClipTime;
    item.start_s = root.children[0].value;
    item.end_s = root.children[1].value;
    if (item.start_s < 0.0 || item.end_s < 0.0) fail(body, "clip times must be non-negative");
    if (item.start_s > item.end_s) fail(body, "clip start is after its end");

    // Caption: the text after one space, up to the next tag or line break.
    std::size_t next = after;
    if (after < text_.size() && text_[after] == ' ') {
      std::size_t stop = std::min(text_.find(kTagOpen, after), text_.find('\n', after));
      if (stop == std::string_view::npos) stop = text_.size();
      std::string_view caption = text_.substr(after + 1, stop - after - 1);
      while (!caption.empty() && std::isspace(static_cast<unsigned char>(caption.back()))) {
        caption.remove_suffix(1);
      }
      while (!caption.empty() && std::isspace(static_cast<unsigned char>(caption.front()))) {
        caption.remove_prefix(1);
      }
      if (!caption.empty()) item.label = std::string(caption);
      next = stop;
    }
    out_.items.push_back(std::move(item));
    return next;
  }

  GroundPoint point_of(const Node& n) {
    const auto v = ints_of(n, 2, "point");
    return {v[0], v[1]};
  }

  std::vector<int> ints_of(const Node& n, std::size_t arity, const char* what) {
    if (!n.is_list || n.children.size() != arity) {
      fail(n.offset, std::string("expected ") + what + " with " + std::to_string(arity) +
                         " coordinates");
    }
    std::vector<int> out;
    for (const Node& c : n.children) {
      if (c.is_list || !c.integral) fail(c.offset, "coordinates must be integers");
      if (c.value < 0 || c.value >= kCoordRange) {
        fail(c.offset, "coordinate out of range [0, 1000)");
      }
      out.push_back(static_cast<int>(c.value));
    }
    return out;
  }

  std::string_view text_;
  ParseMode mode_;
  std::size_t resume_ = 0;
  GroundingParse out_;
};

}  // namespace

int normalize_coord(double v_px, double extent_px) {
  if (!(extent_px >= 1.0) || !std::isfinite(extent_px)) {
    throw InvalidInputError("extent must be >= 1 pixel");
  }
  if (!(v_px >= 0.0 && v_px <= extent_px)) {
    throw InvalidInputError("coordinate lies outside [0, extent]");
  }
  const double scaled = std::floor(v_px / extent_px * kCoordRange);
  return std::min(static_cast<int>(scaled), kCoordRange - 1);
}

const char* to_string(GroundingKind kind) {
  switch (kind) {
    case GroundingKind::kPoints:
      return "points";
    case GroundingKind::kBoxes:
      return "boxes";
    case GroundingKind::kPolygons:
      return "polygons";
    case GroundingKind::kOcrBoxes:
      return "ocr_boxes";
    case GroundingKind::kOcrPolygons:
      return "ocr_polygons";
    case GroundingKind::kClipTime:
      return "clip_time";
    case GroundingKind::kObjectRef:
      return "object_ref";
  }
  return "points";
}

std::optional<GroundingKind> grounding_kind_from_string(std::string_view name) {
  for (auto k : {GroundingKind::kPoints, GroundingKind::kBoxes, GroundingKind::kPolygons,
                 GroundingKind::kOcrBoxes, GroundingKind::kOcrPolygons,
                 GroundingKind::kClipTime, GroundingKind::kObjectRef}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

long long polygon_orientation(const GroundPolygon& polygon) {
  long long twice_area = 0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const GroundPoint& a = polygon[i];
    const GroundPoint& b = polygon[(i + 1) % polygon.size()];
    twice_area += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
  }
  return twice_area;
}

void validate_item(const GroundingItem& item) {
  auto bad = [](const std::string& why) { throw InvalidInputError("invalid grounding item: " + why); };
  auto check_point = [&](const GroundPoint& p) {
    if (!in_range(p.x) || !in_range(p.y)) bad("coordinate out of range [0, 1000)");
  };
  auto check_label = [&](bool required) {
    if (required && !item.label) bad("missing label");
    if (item.label && has_tag_open(*item.label)) bad("label contains '<|'");
  };

  switch (item.kind) {
    case GroundingKind::kPoints:
      check_label(false);
      if (item.points.empty()) bad("no points");
      for (const auto& p : item.points) check_point(p);
      break;
    case GroundingKind::kBoxes:
    case GroundingKind::kOcrBoxes:
      check_label(item.kind == GroundingKind::kOcrBoxes);
      if (item.boxes.empty()) bad("no boxes");
      for (const auto& b : item.boxes) {
        check_point({b.x1, b.y1});
        check_point({b.x2, b.y2});
        if (b.x1 > b.x2 || b.y1 > b.y2) bad("inverted box");
      }
      break;
    case GroundingKind::kPolygons:
    case GroundingKind::kOcrPolygons:
      check_label(item.kind == GroundingKind::kOcrPolygons);
      if (item.polygons.empty()) bad("no polygons");
      for (const auto& poly : item.polygons) {
        if (poly.size() < 3) bad("polygon needs at least 3 vertices");
        for (const auto& p : poly) check_point(p);
        if (polygon_orientation(poly) <= 0) bad("polygon vertices must be clockwise");
      }
      break;
    case GroundingKind::kClipTime:
      if (!std::isfinite(item.start_s) || !std::isfinite(item.end_s) || item.start_s < 0.0 ||
          item.end_s < 0.0) {
        bad("clip times must be finite and non-negative");
      }
      if (item.start_s > item.end_s) bad("clip start is after its end");
      if (item.label) {
        const std::string& c = *item.label;
        if (c.empty() || has_tag_open(c) || c.find('\n') != std::string::npos ||
            std::isspace(static_cast<unsigned char>(c.front())) ||
            std::isspace(static_cast<unsigned char>(c.back()))) {
          bad("caption must be one trimmed line without '<|'");
        }
      }
      break;
    case GroundingKind::kObjectRef:
      check_label(true);
      break;
  }
}

std::string emit_grounding(const GroundingItem& item) {
  validate_item(item);
  std::string out;
  switch (item.kind) {
    case GroundingKind::kPoints:
    case GroundingKind::kBoxes:
    case GroundingKind::kPolygons:
      if (item.label) {
        out += kRefStart;
        out += *item.label;
        out += kRefEnd;
      }
      break;
    case GroundingKind::kOcrBoxes:
    case GroundingKind::kOcrPolygons:
      out += kOcrStart;
      out += *item.label;
      out += kOcrEnd;
      break;
    case GroundingKind::kClipTime:
      out += kClipStart;
      out += '[';
      out += format_seconds(item.start_s);
      out += ", ";
      out += format_seconds(item.end_s);
      out += ']';
      out += kClipEnd;
      if (item.label) {
        out += ' ';
        out += *item.label;
      }
      return out;
    case GroundingKind::kObjectRef:
      out += kRefStart;
      out += *item.label;
      out += kRefEnd;
      return out;
  }

  switch (item.kind) {
    case GroundingKind::kPoints:
      out += kPointStart;
      out += geometry_body(item);
      out += kPointEnd;
      break;
    case GroundingKind::kBoxes:
    case GroundingKind::kOcrBoxes:
      out += kBoxStart;
      out += geometry_body(item);
      out += kBoxEnd;
      break;
    default:
      out += kPolygonStart;
      out += geometry_body(item);
      out += kPolygonEnd;
      break;
  }
  return out;
}

GroundingParse parse_grounding(std::string_view text, ParseMode mode) {
  return MarkupParser(text, mode).run();
}

}  // namespace slowfast
