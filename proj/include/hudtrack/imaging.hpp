#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hudtrack/image.hpp"

namespace hudtrack::imaging {

struct TileGrid {
  int cols = 8;
  int rows = 8;
  friend bool operator==(const TileGrid&, const TileGrid&) = default;
};

enum class Stage { Clahe, Blur, Threshold, Sobel };

std::string to_string(Stage stage);
Stage stage_from_string(const std::string& name);

struct PreprocessParams {
  double clahe_clip = 3.0;
  TileGrid clahe_tiles{8, 8};
  int blur_kernel = 5;
  int threshold_block = 19;
  double threshold_bias = 2.0;
  std::vector<Stage> stages_enabled{Stage::Clahe, Stage::Blur, Stage::Threshold};
  /// ROI enhancement clip limits (coordinate-class, auxiliary-class).
  double roi_coordinate_clip = 3.0;
  double roi_auxiliary_clip = 1.5;

  /// Throws Error{ConfigError} when a field violates its range.
  void validate() const;
};

/// sigma = 0.3 * ((kernel - 1) * 0.5 - 1) + 0.8
double gaussian_sigma(int kernel);

/// Normalized sampled Gaussian of odd length `kernel`.
std::vector<double> gaussian_kernel(int kernel);

/// Contrast limited adaptive histogram equalization. Each tile's 256-bin
/// histogram is clipped at max(1, floor(clip * tile_pixels / 256)); the
/// excess is spread over all bins (quotient to every bin, remainder one
/// count at a time at a fixed stride). Output pixels blend the four nearest
/// tile lookups bilinearly. Throws Error{TileConfigError}.
GrayImage clahe(const GrayImage& img, double clip, TileGrid tiles);

/// Per-tile lookup tables, exposed for inspection; tables[row * cols + col].
std::vector<std::vector<std::uint8_t>> clahe_lookup_tables(const GrayImage& img, double clip,
                                                           TileGrid tiles);

/// Separable Gaussian blur with replicate borders. Throws Error{KernelError}.
GrayImage gaussian_blur(const GrayImage& img, int kernel);

/// Unrounded Gaussian-weighted local mean, row-major.
std::vector<double> gaussian_mean(const GrayImage& img, int kernel);

/// 255 where src > weighted_mean - bias, else 0. Throws Error{KernelError}.
GrayImage adaptive_threshold(const GrayImage& img, int block, double bias);

/// min(255, |gx| + |gy|) with 3x3 Sobel stencils. Throws Error{KernelError}.
GrayImage sobel_xy(const GrayImage& img);

/// Nearest-neighbour block replication. Throws Error{InvalidFactor}.
GrayImage upscale(const GrayImage& img, int factor);

/// Grows each side by `px`. An empty `fill` means "auto": the median of the
/// image's one-pixel boundary ring (lower median for even counts).
GrayImage pad_border(const GrayImage& img, int px, std::optional<std::uint8_t> fill);

std::uint8_t border_median(const GrayImage& img);

GrayImage invert(const GrayImage& img);

struct PreprocessedFrame {
  GrayImage image;
  std::optional<GrayImage> edges;
};

/// Applies the enabled frame-level stages in order. Sobel, when enabled, is
/// computed on the input frame as a separate edge channel.
PreprocessedFrame preprocess_frame(const GrayImage& gray, const PreprocessParams& params);

}  // namespace hudtrack::imaging
