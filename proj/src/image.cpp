#include "hudtrack/image.hpp"

#include <algorithm>
#include <stdexcept>

namespace hudtrack {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width),
      height_(height),
      pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image dimensions");
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("pixel buffer does not match image dimensions");
  }
}

std::uint8_t GrayImage::clamped(int x, int y) const {
  return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
}

GrayImage GrayImage::transposed() const {
  GrayImage out(height_, width_);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) out.at(y, x) = at(x, y);
  return out;
}

RgbImage::RgbImage(int width, int height, Rgb fill)
    : width_(width),
      height_(height),
      pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

RgbImage::RgbImage(const GrayImage& gray) : RgbImage(gray.width(), gray.height()) {
  auto src = gray.pixels();
  std::transform(src.begin(), src.end(), pixels_.begin(),
                 [](std::uint8_t v) { return Rgb{v, v, v}; });
}

}  // namespace hudtrack
