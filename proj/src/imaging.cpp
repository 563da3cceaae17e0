#include "hudtrack/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "hudtrack/error.hpp"

namespace hudtrack::imaging {

namespace {

std::uint8_t round_to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

void require_odd_kernel(int kernel, int minimum, const char* what) {
  if (kernel < minimum || kernel % 2 == 0)
    throw Error(ErrorCode::KernelError, std::string(what) + " must be odd and >= " +
                                            std::to_string(minimum) + ", got " +
                                            std::to_string(kernel));
}

// Tile i spans [floor(i*n/tiles), floor((i+1)*n/tiles)).
int tile_begin(int i, int n, int tiles) {
  return static_cast<int>(static_cast<long long>(i) * n / tiles);
}

std::vector<std::uint8_t> clipped_equalization_lut(const GrayImage& img, int x0, int x1, int y0,
                                                   int y1, double clip) {
  std::array<long, 256> hist{};
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) ++hist[img.at(x, y)];
  const long total = static_cast<long>(x1 - x0) * (y1 - y0);

  const long limit = std::max(1L, static_cast<long>(std::floor(clip * total / 256.0)));
  long excess = 0;
  for (auto& h : hist) {
    if (h > limit) {
      excess += h - limit;
      h = limit;
    }
  }
  const long batch = excess / 256;
  long residual = excess % 256;
  for (auto& h : hist) h += batch;
  if (residual > 0) {
    const long stride = std::max(256 / residual, 1L);
    for (long i = 0; i < 256 && residual > 0; i += stride, --residual) ++hist[i];
  }

  std::vector<std::uint8_t> lut(256);
  long cdf = 0;
  for (int v = 0; v < 256; ++v) {
    cdf += hist[v];
    lut[v] = round_to_u8(static_cast<double>(cdf) * 255.0 / static_cast<double>(total));
  }
  return lut;
}

// Horizontal then vertical pass, both in double, no intermediate rounding.
std::vector<double> separable_filter(const GrayImage& img, const std::vector<double>& k) {
  const int w = img.width(), h = img.height();
  const int r = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[static_cast<std::size_t>(i + r)] * img.clamped(x + i, y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  std::vector<double> out(tmp.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += k[static_cast<std::size_t>(i + r)] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  return out;
}

}  // namespace

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::Clahe: return "clahe";
    case Stage::Blur: return "blur";
    case Stage::Threshold: return "threshold";
    case Stage::Sobel: return "sobel";
  }
  return "unknown";
}

Stage stage_from_string(const std::string& name) {
  if (name == "clahe") return Stage::Clahe;
  if (name == "blur") return Stage::Blur;
  if (name == "threshold") return Stage::Threshold;
  if (name == "sobel") return Stage::Sobel;
  throw Error(ErrorCode::ConfigError, "unknown preprocessing stage '" + name + "'");
}

void PreprocessParams::validate() const {
  if (!(clahe_clip >= 1.0)) throw Error(ErrorCode::ConfigError, "clahe_clip must be >= 1.0");
  if (!(roi_coordinate_clip >= 1.0) || !(roi_auxiliary_clip >= 1.0))
    throw Error(ErrorCode::ConfigError, "ROI clip limits must be >= 1.0");
  if (clahe_tiles.cols < 1 || clahe_tiles.rows < 1)
    throw Error(ErrorCode::ConfigError, "clahe_tiles must be at least 1x1");
  if (blur_kernel < 1 || blur_kernel % 2 == 0)
    throw Error(ErrorCode::ConfigError, "blur_kernel must be odd and >= 1");
  if (threshold_block < 3 || threshold_block % 2 == 0)
    throw Error(ErrorCode::ConfigError, "threshold_block must be odd and >= 3");
}

double gaussian_sigma(int kernel) { return 0.3 * ((kernel - 1) * 0.5 - 1.0) + 0.8; }

std::vector<double> gaussian_kernel(int kernel) {
  require_odd_kernel(kernel, 1, "Gaussian kernel");
  const double sigma = gaussian_sigma(kernel);
  const int r = kernel / 2;
  std::vector<double> k(static_cast<std::size_t>(kernel));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + r)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

std::vector<std::vector<std::uint8_t>> clahe_lookup_tables(const GrayImage& img, double clip,
                                                           TileGrid tiles) {
  if (img.empty()) throw Error(ErrorCode::TileConfigError, "empty image");
  if (tiles.cols < 1 || tiles.rows < 1 || tiles.cols > img.width() || tiles.rows > img.height())
    throw Error(ErrorCode::TileConfigError,
                std::to_string(tiles.cols) + "x" + std::to_string(tiles.rows) +
                    " tiles do not fit a " + std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " image");
  std::vector<std::vector<std::uint8_t>> luts;
  luts.reserve(static_cast<std::size_t>(tiles.cols * tiles.rows));
  for (int ty = 0; ty < tiles.rows; ++ty)
    for (int tx = 0; tx < tiles.cols; ++tx)
      luts.push_back(clipped_equalization_lut(
          img, tile_begin(tx, img.width(), tiles.cols), tile_begin(tx + 1, img.width(), tiles.cols),
          tile_begin(ty, img.height(), tiles.rows), tile_begin(ty + 1, img.height(), tiles.rows),
          clip));
  return luts;
}

GrayImage clahe(const GrayImage& img, double clip, TileGrid tiles) {
  const auto luts = clahe_lookup_tables(img, clip, tiles);
  const int w = img.width(), h = img.height();
  const double tile_w = static_cast<double>(w) / tiles.cols;
  const double tile_h = static_cast<double>(h) / tiles.rows;

  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const double fy = (y + 0.5) / tile_h - 0.5;
    const int ty_lo = static_cast<int>(std::floor(fy));
    const double wy = fy - ty_lo;
    const int ty1 = std::clamp(ty_lo, 0, tiles.rows - 1);
    const int ty2 = std::clamp(ty_lo + 1, 0, tiles.rows - 1);
    for (int x = 0; x < w; ++x) {
      const double fx = (x + 0.5) / tile_w - 0.5;
      const int tx_lo = static_cast<int>(std::floor(fx));
      const double wx = fx - tx_lo;
      const int tx1 = std::clamp(tx_lo, 0, tiles.cols - 1);
      const int tx2 = std::clamp(tx_lo + 1, 0, tiles.cols - 1);
      const std::uint8_t v = img.at(x, y);
      auto lut = [&](int tx, int ty) {
        return static_cast<double>(luts[static_cast<std::size_t>(ty * tiles.cols + tx)][v]);
      };
      const double top = lut(tx1, ty1) * (1.0 - wx) + lut(tx2, ty1) * wx;
      const double bottom = lut(tx1, ty2) * (1.0 - wx) + lut(tx2, ty2) * wx;
      out.at(x, y) = round_to_u8(top * (1.0 - wy) + bottom * wy);
    }
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, int kernel) {
  require_odd_kernel(kernel, 1, "blur kernel");
  if (img.empty()) return img;
  const auto filtered = separable_filter(img, gaussian_kernel(kernel));
  GrayImage out(img.width(), img.height());
  auto px = out.pixels();
  for (std::size_t i = 0; i < filtered.size(); ++i) px[i] = round_to_u8(filtered[i]);
  return out;
}

std::vector<double> gaussian_mean(const GrayImage& img, int kernel) {
  return separable_filter(img, gaussian_kernel(kernel));
}

GrayImage adaptive_threshold(const GrayImage& img, int block, double bias) {
  require_odd_kernel(block, 3, "threshold block");
  if (img.empty()) return img;
  const auto mean = gaussian_mean(img, block);
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < mean.size(); ++i) dst[i] = src[i] > mean[i] - bias ? 255 : 0;
  return out;
}

GrayImage sobel_xy(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3)
    throw Error(ErrorCode::KernelError, "Sobel needs an image of at least 3x3");
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      auto p = [&](int dx, int dy) { return static_cast<int>(img.clamped(x + dx, y + dy)); };
      const int gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
      const int gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
      out.at(x, y) = static_cast<std::uint8_t>(std::min(255, std::abs(gx) + std::abs(gy)));
    }
  return out;
}

GrayImage upscale(const GrayImage& img, int factor) {
  if (factor < 1) throw Error(ErrorCode::InvalidFactor, "upscale factor must be >= 1");
  if (factor == 1) return img;
  GrayImage out(img.width() * factor, img.height() * factor);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out.at(x, y) = img.at(x / factor, y / factor);
  return out;
}

std::uint8_t border_median(const GrayImage& img) {
  std::vector<std::uint8_t> ring;
  const int w = img.width(), h = img.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) ring.push_back(img.at(x, y));
  if (ring.empty()) return 0;
  const auto mid = ring.begin() + static_cast<std::ptrdiff_t>((ring.size() - 1) / 2);
  std::nth_element(ring.begin(), mid, ring.end());
  return *mid;
}

GrayImage pad_border(const GrayImage& img, int px, std::optional<std::uint8_t> fill) {
  if (px < 0) throw Error(ErrorCode::InvalidFactor, "padding must be non-negative");
  if (px == 0) return img;
  const std::uint8_t value = fill ? *fill : border_median(img);
  GrayImage out(img.width() + 2 * px, img.height() + 2 * px, value);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x + px, y + px) = img.at(x, y);
  return out;
}

GrayImage invert(const GrayImage& img) {
  GrayImage out = img;
  for (auto& v : out.pixels()) v = static_cast<std::uint8_t>(255 - v);
  return out;
}

PreprocessedFrame preprocess_frame(const GrayImage& gray, const PreprocessParams& params) {
  PreprocessedFrame result{gray, std::nullopt};
  for (Stage stage : params.stages_enabled) {
    switch (stage) {
      case Stage::Clahe: {
        const TileGrid tiles{std::min(params.clahe_tiles.cols, gray.width()),
                             std::min(params.clahe_tiles.rows, gray.height())};
        result.image = clahe(result.image, params.clahe_clip, tiles);
        break;
      }
      case Stage::Blur:
        result.image = gaussian_blur(result.image, params.blur_kernel);
        break;
      case Stage::Threshold:
        result.image = adaptive_threshold(result.image, params.threshold_block, params.threshold_bias);
        break;
      case Stage::Sobel:
        result.edges = sobel_xy(gray);
        break;
    }
  }
  return result;
}

}  // namespace hudtrack::imaging
