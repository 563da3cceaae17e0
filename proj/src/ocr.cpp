#include "hudtrack/ocr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "hudtrack/font.hpp"

namespace hudtrack::ocr {

namespace {

// Samples column j of `out_w` from a source span [0, src_w) at cell centres.
int nn_index(int j, int out_n, int src_n) {
  return std::min(src_n - 1, static_cast<int>((j + 0.5) * src_n / out_n));
}

std::vector<bool> stretch_glyph(const font::Bitmap& bm) {
  int first = font::kGlyphWidth, last = -1;
  for (int x = 0; x < font::kGlyphWidth; ++x)
    for (int y = 0; y < font::kGlyphHeight; ++y)
      if (bm[y][x]) {
        first = std::min(first, x);
        last = std::max(last, x);
      }
  std::vector<bool> out(font::kGlyphWidth * font::kGlyphHeight, false);
  if (last < 0) return out;
  const int span = last - first + 1;
  for (int y = 0; y < font::kGlyphHeight; ++y)
    for (int x = 0; x < font::kGlyphWidth; ++x)
      out[y * font::kGlyphWidth + x] = bm[y][first + nn_index(x, font::kGlyphWidth, span)];
  return out;
}

}  // namespace

const GlyphTemplateSet& GlyphTemplateSet::builtin() {
  static const GlyphTemplateSet set = [] {
    GlyphTemplateSet s;
    s.width_ = font::kGlyphWidth;
    s.height_ = font::kGlyphHeight;
    for (char c : font::kHudCharset) s.templates_[c] = stretch_glyph(*font::glyph(c));
    return s;
  }();
  return set;
}

GrayImage GlyphTemplateSet::bitmap(char c) const {
  const auto& t = templates_.at(c);
  GrayImage img(width_, height_, 255);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (t[y * width_ + x]) img.at(x, y) = 0;
  return img;
}

OcrReading recognize_builtin(const GrayImage& binary, const GlyphTemplateSet& templates,
                             const std::string& label) {
  OcrReading reading{label, {}, 0.0};
  const int w = binary.width(), h = binary.height();
  auto ink = [&](int x, int y) { return binary.at(x, y) < 128; };

  std::vector<bool> col_ink(w, false);
  int top = h, bottom = -1;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (ink(x, y)) {
        col_ink[x] = true;
        top = std::min(top, y);
        bottom = std::max(bottom, y);
      }
  if (bottom < 0) return reading;

  // A line of only short glyphs ('.', '-') does not span the full cell;
  // widen the band to the cell height implied by the stroke width, centred.
  int stroke = h;
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h;) {
      if (!ink(x, y)) {
        ++y;
        continue;
      }
      const int y0 = y;
      while (y < h && ink(x, y)) ++y;
      stroke = std::min(stroke, y - y0);
    }
  for (int y = top; y <= bottom; ++y)
    for (int x = 0; x < w;) {
      if (!ink(x, y)) {
        ++x;
        continue;
      }
      const int x0 = x;
      while (x < w && ink(x, y)) ++x;
      stroke = std::min(stroke, x - x0);
    }
  const int cell = std::min(stroke * font::kGlyphHeight, h);
  if (bottom - top + 1 < cell) {
    const int centred = (h - cell) / 2;
    top = std::clamp(centred, std::max(0, bottom - cell + 1), top);
    bottom = top + cell - 1;
  }
  const int band = bottom - top + 1;
  const int tw = templates.width(), th = templates.height();
  double score_sum = 0.0;
  int glyphs = 0;
  for (int x = 0; x < w;) {
    if (!col_ink[x]) {
      ++x;
      continue;
    }
    const int x0 = x;
    while (x < w && col_ink[x]) ++x;
    const int seg_w = x - x0;

    std::vector<bool> sample(static_cast<std::size_t>(tw * th));
    for (int j = 0; j < th; ++j)
      for (int i = 0; i < tw; ++i)
        sample[j * tw + i] = ink(x0 + nn_index(i, tw, seg_w), top + nn_index(j, th, band));

    char best = '?';
    double best_score = -1.0;
    for (const auto& [c, tpl] : templates.templates()) {
      int agree = 0;
      for (std::size_t k = 0; k < sample.size(); ++k) agree += sample[k] == tpl[k];
      const double score = static_cast<double>(agree) / static_cast<double>(sample.size());
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    reading.raw_text += best;
    score_sum += best_score;
    ++glyphs;
  }
  reading.confidence = score_sum / glyphs;
  return reading;
}

std::string to_string(Unit unit) {
  switch (unit) {
    case Unit::None: return "";
    case Unit::Degrees: return "deg";
    case Unit::Meters: return "m";
    case Unit::KmPerHour: return "km/h";
    case Unit::MetersPerSecond: return "m/s";
    case Unit::Percent: return "%";
    case Unit::Volts: return "V";
    case Unit::MilliampHours: return "mAh";
  }
  return "";
}

namespace {

bool ends_with_ci(const std::string& s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[s.size() - suffix.size() + i])) !=
        std::tolower(static_cast<unsigned char>(suffix[i])))
      return false;
  return true;
}

// Removes the first matching suffix from `s`; returns it or empty.
std::string_view strip_suffix(std::string& s, std::initializer_list<std::string_view> suffixes) {
  for (auto suf : suffixes)
    if (ends_with_ci(s, suf)) {
      s.resize(s.size() - suf.size());
      return suf;
    }
  return {};
}

struct Range {
  double lo, hi;
};

}  // namespace

ParseOutcome parse_value(const roi::RoiKind& kind, const std::string& raw_text,
                         std::optional<int> int_digits) {
  std::string s;
  for (char c : raw_text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;

  Unit unit = Unit::None;
  Range range{-1e300, 1e300};
  switch (kind.kind) {
    case roi::Kind::Latitude:
      strip_suffix(s, {"deg"});
      unit = Unit::Degrees;
      range = {-90.0, 90.0};
      break;
    case roi::Kind::Longitude:
      strip_suffix(s, {"deg"});
      unit = Unit::Degrees;
      range = {-180.0, 180.0};
      break;
    case roi::Kind::Altitude:
      strip_suffix(s, {"m"});
      unit = Unit::Meters;
      range = {-500.0, 10000.0};
      break;
    case roi::Kind::AirSpeed:
      strip_suffix(s, {"km/h", "kmh", "kph"});
      unit = Unit::KmPerHour;
      range = {0.0, 500.0};
      break;
    case roi::Kind::VerticalSpeed:
      strip_suffix(s, {"m/s"});
      unit = Unit::MetersPerSecond;
      range = {-500.0 / 3.6, 500.0 / 3.6};
      break;
    case roi::Kind::Battery:
      if (!strip_suffix(s, {"V"}).empty()) {
        unit = Unit::Volts;
        range = {0.0, 30.0};
      } else {
        strip_suffix(s, {"%"});
        unit = Unit::Percent;
        range = {0.0, 100.0};
      }
      break;
    case roi::Kind::CapacityUsed:
      strip_suffix(s, {"mah"});
      unit = Unit::MilliampHours;
      range = {0.0, 1e9};
      break;
    case roi::Kind::Auxiliary:
      break;
  }

  if (s.empty()) return {std::nullopt, ErrorCode::Empty};

  const bool negative = s.front() == '-';
  const std::string body = negative ? s.substr(1) : s;
  int dots = 0, digits = 0;
  for (char c : body) {
    if (c == '.') ++dots;
    else if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
    else return {std::nullopt, ErrorCode::CharInvalid};
  }
  if (dots > 1 || digits == 0) return {std::nullopt, ErrorCode::CharInvalid};

  std::string number = body;
  if (kind.is_coordinate() && dots == 0 && int_digits && *int_digits > 0 &&
      static_cast<int>(number.size()) > *int_digits)
    number.insert(static_cast<std::size_t>(*int_digits), 1, '.');

  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (ec != std::errc() || ptr != number.data() + number.size())
    return {std::nullopt, ErrorCode::CharInvalid};
  if (negative) value = -value;
  if (!(value >= range.lo && value <= range.hi)) return {std::nullopt, ErrorCode::RangeInvalid};
  return {ParsedValue{value, unit}, ErrorCode::Empty};
}

}  // namespace hudtrack::ocr
