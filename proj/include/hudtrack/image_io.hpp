#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hudtrack/image.hpp"

namespace hudtrack {

/// Integer BT.601 luma, round-half-up.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Decodes PNG (gray, gray+alpha, RGB, RGBA, palette) or binary/ASCII PGM.
/// Color inputs are reduced to luma. Throws Error{DecodeError}.
GrayImage decode_image(std::span<const std::uint8_t> bytes);

/// Reads and decodes a file. Throws Error{FrameMissing} if absent.
GrayImage read_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const GrayImage& img);
std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

/// Decodes a PNG keeping color channels (used to inspect overlays).
RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Writes via a temporary sibling file and renames into place.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace hudtrack
