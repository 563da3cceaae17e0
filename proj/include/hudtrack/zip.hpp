#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hudtrack::zip {

struct Entry {
  std::string name;
  std::vector<std::uint8_t> data;
};

/// Deflate-compressed archive with a fixed timestamp, so identical entries
/// give identical bytes.
std::vector<std::uint8_t> write_archive(std::span<const Entry> entries);

/// Reads stored or deflated entries. Throws Error{DecodeError}.
std::vector<Entry> read_archive(std::span<const std::uint8_t> bytes);

}  // namespace hudtrack::zip
