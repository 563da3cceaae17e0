#include "hudtrack/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "hudtrack/error.hpp"

namespace hudtrack {

namespace fs = std::filesystem;

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

struct PngReadSource {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
  if (src->offset + count > src->bytes.size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, src->bytes.data() + src->offset, count);
  src->offset += count;
}

void png_error_throw(png_structp, png_const_charp message) {
  throw Error(ErrorCode::DecodeError, std::string("PNG: ") + message);
}

void png_warning_ignore(png_structp, png_const_charp) {}

/// Decoded PNG rows normalized to 8-bit RGB.
struct RgbRows {
  int width = 0, height = 0;
  std::vector<std::uint8_t> rgb;
};

RgbRows decode_png_to_rgb(std::span<const std::uint8_t> bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw,
                                           png_warning_ignore);
  if (!png) throw Error(ErrorCode::DecodeError, "cannot allocate PNG reader");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};

  PngReadSource src{bytes, 0};
  png_set_read_fn(png, &src, png_read_from_span);
  png_read_info(png, info);

  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  RgbRows out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  const auto rowbytes = png_get_rowbytes(png, info);
  if (rowbytes != static_cast<png_size_t>(out.width) * 3)
    throw Error(ErrorCode::DecodeError, "unexpected PNG row layout");
  out.rgb.resize(rowbytes * static_cast<std::size_t>(out.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = out.rgb.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return out;
}

// Parses one whitespace/comment-delimited PNM header token.
class PnmCursor {
 public:
  explicit PnmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
      throw Error(ErrorCode::DecodeError, "malformed PGM header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000) throw Error(ErrorCode::DecodeError, "PGM value too large");
    }
    return static_cast<int>(v);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  const bool binary = bytes[1] == '5';
  PnmCursor cur(bytes);
  cur.advance(2);
  const int w = cur.next_int();
  const int h = cur.next_int();
  const int maxval = cur.next_int();
  if (w < 1 || h < 1) throw Error(ErrorCode::DecodeError, "PGM has empty dimensions");
  if (maxval < 1 || maxval > 255) throw Error(ErrorCode::DecodeError, "PGM must be 8-bit");
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::uint8_t> px(n);
  auto scale = [maxval](int v) {
    return static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
  };
  if (binary) {
    cur.advance(1);  // single whitespace after maxval
    if (cur.pos() + n > bytes.size()) throw Error(ErrorCode::DecodeError, "truncated PGM data");
    for (std::size_t i = 0; i < n; ++i) px[i] = scale(bytes[cur.pos() + i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = cur.next_int();
      if (v > maxval) throw Error(ErrorCode::DecodeError, "PGM sample exceeds maxval");
      px[i] = scale(v);
    }
  }
  return GrayImage(w, h, std::move(px));
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

std::vector<std::uint8_t> encode_png_rows(int width, int height, int color_type,
                                          const std::uint8_t* data, std::size_t rowbytes) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw,
                                            png_warning_ignore);
  if (!png) throw Error(ErrorCode::IoError, "cannot allocate PNG writer");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(data + rowbytes * static_cast<std::size_t>(y)));
  png_write_end(png, nullptr);
  return out;
}

}  // namespace

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
    RgbRows rows = decode_png_to_rgb(bytes);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(rows.width) *
                                 static_cast<std::size_t>(rows.height));
    for (std::size_t i = 0; i < px.size(); ++i)
      px[i] = luma(rows.rgb[3 * i], rows.rgb[3 * i + 1], rows.rgb[3 * i + 2]);
    return GrayImage(rows.width, rows.height, std::move(px));
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2'))
    return decode_pgm(bytes);
  throw Error(ErrorCode::DecodeError, "unrecognized image format");
}

RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngSignature, 8) != 0)
    throw Error(ErrorCode::DecodeError, "not a PNG stream");
  RgbRows rows = decode_png_to_rgb(bytes);
  RgbImage out(rows.width, rows.height);
  for (int y = 0; y < rows.height; ++y)
    for (int x = 0; x < rows.width; ++x) {
      const std::size_t i = 3 * (static_cast<std::size_t>(y) * rows.width + x);
      out.at(x, y) = Rgb{rows.rgb[i], rows.rgb[i + 1], rows.rgb[i + 2]};
    }
  return out;
}

GrayImage read_image(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::FrameMissing, path.string());
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  return encode_png_rows(img.width(), img.height(), PNG_COLOR_TYPE_GRAY, img.pixels().data(),
                         static_cast<std::size_t>(img.width()));
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  static_assert(sizeof(Rgb) == 3);
  return encode_png_rows(img.width(), img.height(), PNG_COLOR_TYPE_RGB,
                         reinterpret_cast<const std::uint8_t*>(img.pixels().data()),
                         static_cast<std::size_t>(img.width()) * 3);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  const fs::path tmp = path.string() + ".tmp" + std::to_string(rng() % 1000000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "short write to " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace hudtrack
