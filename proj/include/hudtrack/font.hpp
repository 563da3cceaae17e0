#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "hudtrack/image.hpp"

namespace hudtrack::font {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
/// Horizontal advance in font cells (glyph plus one blank column).
inline constexpr int kAdvance = kGlyphWidth + 1;

/// Characters the HUD renderer emits and the built-in recognizer knows.
inline constexpr std::string_view kHudCharset = "0123456789.-mkh/%V";

using Bitmap = std::array<std::array<bool, kGlyphWidth>, kGlyphHeight>;

/// Embedded 5x7 glyph. Lowercase letters outside the HUD charset fold to
/// uppercase; returns nullopt for characters the font lacks.
std::optional<Bitmap> glyph(char c);

bool has_glyph(char c);

/// Pixel width of `text` rendered at `scale` with no margin.
int text_width(std::string_view text, int scale);
int text_height(int scale);

/// Renders ink as `fg` on `bg`, surrounded by `margin` pixels of `bg`.
GrayImage render_text(std::string_view text, int scale, std::uint8_t fg, std::uint8_t bg,
                      int margin = 0);

/// Stamps glyph ink onto an existing image at (x, y); clipped at the edges.
void draw_text(GrayImage& target, int x, int y, std::string_view text, int scale,
               std::uint8_t fg);
void draw_text(RgbImage& target, int x, int y, std::string_view text, int scale, Rgb fg);

}  // namespace hudtrack::font
