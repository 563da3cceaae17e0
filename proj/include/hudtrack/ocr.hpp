#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hudtrack/error.hpp"
#include "hudtrack/image.hpp"
#include "hudtrack/roi.hpp"

namespace hudtrack::ocr {

struct OcrReading {
  std::string label;
  std::string raw_text;
  double confidence = 0.0;

  bool empty() const { return raw_text.empty(); }
};

/// Binary glyph templates (ink = true), all the same size.
///
/// Each template is the glyph's inked columns stretched to the full template
/// width, which is also how the recognizer normalizes a segmented glyph.
class GlyphTemplateSet {
 public:
  /// Templates for the embedded HUD font.
  static const GlyphTemplateSet& builtin();

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::map<char, std::vector<bool>>& templates() const noexcept { return templates_; }

  /// Template of `c` as an image (ink 0, background 255).
  GrayImage bitmap(char c) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::map<char, std::vector<bool>> templates_;
};

inline constexpr double kDefaultConfidenceFloor = 0.60;

/// Template matcher over a binary image whose ink is 0.
///
/// Glyphs are split at blank columns; each segment spans the text line's
/// inked row band and is resampled nearest-neighbour to template size.
/// The best-scoring character (fraction of agreeing pixels) wins; the
/// reading's confidence is the mean best score. An image without ink yields
/// an empty reading with confidence 0 (NoGlyphs).
OcrReading recognize_builtin(const GrayImage& binary, const GlyphTemplateSet& templates,
                             const std::string& label = {});

enum class Unit { None, Degrees, Meters, KmPerHour, MetersPerSecond, Percent, Volts, MilliampHours };

std::string to_string(Unit unit);

struct ParsedValue {
  double value = 0.0;
  Unit unit = Unit::None;
};

/// Either a value or the error code explaining why there is none.
struct ParseOutcome {
  std::optional<ParsedValue> value;
  ErrorCode error = ErrorCode::Empty;

  bool ok() const { return value.has_value(); }
};

/// Strips whitespace and unit suffixes, inserts the decimal point for
/// coordinate kinds when missing, converts, and range-checks. Never throws.
ParseOutcome parse_value(const roi::RoiKind& kind, const std::string& raw_text,
                         std::optional<int> int_digits = {});

}  // namespace hudtrack::ocr
