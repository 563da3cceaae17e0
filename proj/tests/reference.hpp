#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "hudtrack/image.hpp"

namespace reference {

// Straightforward references written from the definitions, sharing nothing
// with the library code.

inline hudtrack::GrayImage ref_clahe_single_tile(const hudtrack::GrayImage& img, double clip) {
  const long n = static_cast<long>(img.width()) * img.height();
  std::array<long, 256> hist{};
  for (auto p : img.pixels()) hist[p]++;
  long limit = static_cast<long>(clip * n / 256.0);
  if (limit < 1) limit = 1;
  long clipped = 0;
  for (int v = 0; v < 256; ++v)
    if (hist[v] > limit) {
      clipped += hist[v] - limit;
      hist[v] = limit;
    }
  for (int v = 0; v < 256; ++v) hist[v] += clipped / 256;
  long rest = clipped % 256;
  if (rest != 0) {
    long step = 256 / rest;
    if (step < 1) step = 1;
    for (long v = 0; v < 256 && rest > 0; v += step) {
      hist[v]++;
      rest--;
    }
  }
  std::array<int, 256> lut{};
  long running = 0;
  for (int v = 0; v < 256; ++v) {
    running += hist[v];
    lut[v] = std::min(255, static_cast<int>(std::floor(running * 255.0 / n + 0.5)));
  }
  hudtrack::GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = static_cast<std::uint8_t>(lut[img.at(x, y)]);
  return out;
}

inline std::vector<std::vector<double>> ref_kernel_2d(int k) {
  const double sigma = 0.3 * ((k - 1) / 2.0 - 1.0) + 0.8;
  std::vector<double> g(k);
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    const double d = i - (k - 1) / 2.0;
    g[i] = std::exp(-d * d / (2 * sigma * sigma));
    s += g[i];
  }
  std::vector<std::vector<double>> w(k, std::vector<double>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) w[i][j] = g[i] / s * g[j] / s;
  return w;
}

inline double ref_local_mean(const hudtrack::GrayImage& img, int x, int y, const std::vector<std::vector<double>>& w) {
  const int r = static_cast<int>(w.size()) / 2;
  double acc = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const int xx = std::clamp(x + dx, 0, img.width() - 1);
      const int yy = std::clamp(y + dy, 0, img.height() - 1);
      acc += w[dy + r][dx + r] * img.at(xx, yy);
    }
  return acc;
}

inline hudtrack::GrayImage ref_blur(const hudtrack::GrayImage& img, int k) {
  const auto w = ref_kernel_2d(k);
  hudtrack::GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(ref_local_mean(img, x, y, w) + 0.5), 0.0, 255.0));
  return out;
}

inline hudtrack::GrayImage ref_threshold(const hudtrack::GrayImage& img, int block, double bias) {
  const auto w = ref_kernel_2d(block);
  hudtrack::GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(x, y) > ref_local_mean(img, x, y, w) - bias ? 255 : 0;
  return out;
}


inline hudtrack::GrayImage random_image(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> px(0, 255);
  hudtrack::GrayImage img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(px(rng));
  return img;
}

struct UtmVector {
  double lat, lon;
  int zone;
  double easting, northing;
};

// tests/oracles/utm_oracle.py (complex meridian-arc quadrature, 40 digits)
inline constexpr UtmVector kOracle[] = {
    {0, 15, 33, 500000.0, 0.0},
    {47, 15, 33, 500000.0, 5205164.1101522},
    {47, 16, 33, 576025.312098933, 5205649.34774611},
    {47, 12.5, 33, 309940.197338118, 5208197.57412604},
    {46.5, 17.9, 33, 722517.608838274, 5153689.88100965},
    {52.2, 21.0, 34, 500000.0, 5783283.16149956},
    {-33.9, 18.4, 34, 259583.22166043, 6245888.04544077},
    {40.7, -74.0, 18, 584482.352282295, 4505935.86944708},
    {60.0, 9.0, 32, 500000.0, 6651411.19036272},
    {10.0, -1.5, 30, 664411.030652445, 1105786.26939743},
    {-45.0, 170.0, 59, 421184.697083289, 5016563.2316507},
    {35.0, 139.7, 54, 381369.337677126, 3873815.07469326},
};

}  // namespace reference
