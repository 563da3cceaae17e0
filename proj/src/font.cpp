#include "hudtrack/font.hpp"

#include <cctype>
#include <map>

#include "hudtrack/error.hpp"

namespace hudtrack::font {

namespace {

using Rows = std::array<std::string_view, kGlyphHeight>;

// Every glyph in kHudCharset keeps its inked columns contiguous, so a blank
// column always means a glyph boundary.
const std::map<char, Rows>& glyph_rows() {
  static const std::map<char, Rows> rows = {
      {'0', {".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."}},
      {'1', {"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."}},
      {'2', {".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"}},
      {'3', {"#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."}},
      {'4', {"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}},
      {'5', {"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}},
      {'6', {"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."}},
      {'7', {"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}},
      {'8', {".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}},
      {'9', {".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."}},
      {'.', {".....", ".....", ".....", ".....", ".....", ".....", "..#.."}},
      {'-', {".....", ".....", ".....", "#####", ".....", ".....", "....."}},
      {'m', {".....", ".....", "##.#.", "#.#.#", "#.#.#", "#.#.#", "#.#.#"}},
      {'k', {"#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."}},
      {'h', {"#....", "#....", "#.##.", "##..#", "#...#", "#...#", "#...#"}},
      {'/', {"....#", "....#", "...#.", "..#..", ".#...", "#....", "#...."}},
      {'%', {"#....", "#...#", "...#.", "..#..", ".#...", "#...#", "....#"}},
      {'V', {"#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."}},
      // Label-only glyphs (preview overlays).
      {'A', {".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
      {'B', {"####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."}},
      {'C', {".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."}},
      {'D', {"###..", "#..#.", "#...#", "#...#", "#...#", "#..#.", "###.."}},
      {'E', {"#####", "#....", "#....", "####.", "#....", "#....", "#####"}},
      {'F', {"#####", "#....", "#....", "####.", "#....", "#....", "#...."}},
      {'G', {".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"}},
      {'H', {"#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
      {'I', {".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."}},
      {'J', {"..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."}},
      {'K', {"#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"}},
      {'L', {"#....", "#....", "#....", "#....", "#....", "#....", "#####"}},
      {'M', {"#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}},
      {'N', {"#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"}},
      {'O', {".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
      {'P', {"####.", "#...#", "#...#", "####.", "#....", "#....", "#...."}},
      {'Q', {".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"}},
      {'R', {"####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"}},
      {'S', {".####", "#....", "#....", ".###.", "....#", "....#", "####."}},
      {'T', {"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}},
      {'U', {"#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
      {'W', {"#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."}},
      {'X', {"#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"}},
      {'Y', {"#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."}},
      {'Z', {"#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"}},
      {'_', {".....", ".....", ".....", ".....", ".....", ".....", "#####"}},
      {':', {".....", "..#..", ".....", ".....", ".....", "..#..", "....."}},
      {' ', {".....", ".....", ".....", ".....", ".....", ".....", "....."}},
  };
  return rows;
}

template <typename Image, typename Ink>
void stamp(Image& target, int x0, int y0, std::string_view text, int scale, Ink ink) {
  int cx = x0;
  for (char c : text) {
    const auto bm = glyph(c);
    if (!bm) throw Error(ErrorCode::LayoutError, std::string("no glyph for '") + c + "'");
    for (int gy = 0; gy < kGlyphHeight; ++gy)
      for (int gx = 0; gx < kGlyphWidth; ++gx) {
        if (!(*bm)[gy][gx]) continue;
        for (int sy = 0; sy < scale; ++sy)
          for (int sx = 0; sx < scale; ++sx) {
            const int px = cx + gx * scale + sx, py = y0 + gy * scale + sy;
            if (px >= 0 && py >= 0 && px < target.width() && py < target.height())
              target.at(px, py) = ink;
          }
      }
    cx += kAdvance * scale;
  }
}

}  // namespace

std::optional<Bitmap> glyph(char c) {
  const auto& rows = glyph_rows();
  auto it = rows.find(c);
  if (it == rows.end() && std::islower(static_cast<unsigned char>(c)))
    it = rows.find(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (it == rows.end()) return std::nullopt;
  Bitmap bm{};
  for (int y = 0; y < kGlyphHeight; ++y)
    for (int x = 0; x < kGlyphWidth; ++x) bm[y][x] = it->second[y][x] == '#';
  return bm;
}

bool has_glyph(char c) { return glyph(c).has_value(); }

int text_width(std::string_view text, int scale) {
  if (text.empty()) return 0;
  return (static_cast<int>(text.size()) * kAdvance - 1) * scale;
}

int text_height(int scale) { return kGlyphHeight * scale; }

GrayImage render_text(std::string_view text, int scale, std::uint8_t fg, std::uint8_t bg,
                      int margin) {
  if (scale < 1) throw Error(ErrorCode::LayoutError, "font scale must be >= 1");
  GrayImage out(text_width(text, scale) + 2 * margin, text_height(scale) + 2 * margin, bg);
  stamp(out, margin, margin, text, scale, fg);
  return out;
}

void draw_text(GrayImage& target, int x, int y, std::string_view text, int scale,
               std::uint8_t fg) {
  stamp(target, x, y, text, scale, fg);
}

void draw_text(RgbImage& target, int x, int y, std::string_view text, int scale, Rgb fg) {
  stamp(target, x, y, text, scale, fg);
}

}  // namespace hudtrack::font
