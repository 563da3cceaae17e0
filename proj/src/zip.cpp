#include "hudtrack/zip.hpp"

#include <zlib.h>

#include <cstring>

#include "hudtrack/error.hpp"

namespace hudtrack::zip {
namespace {

// 1980-01-01 00:00
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;

void put16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put16(out, v & 0xffff);
  put16(out, v >> 16);
}

std::uint32_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 2 > b.size()) throw Error(ErrorCode::DecodeError, "zip: truncated");
  return b[at] | (b[at + 1] << 8);
}

std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at) {
  return get16(b, at) | (get16(b, at + 2) << 16);
}

std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error(ErrorCode::IoError, "zip: deflateInit2 failed");
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::IoError, "zip: deflate failed");
  out.resize(produced);
  return out;
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> data, std::size_t expected) {
  // One spare byte: zlib refuses a null output buffer, and it exposes overlong streams.
  std::vector<std::uint8_t> out(expected + 1);
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) throw Error(ErrorCode::DecodeError, "zip: inflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) throw Error(ErrorCode::DecodeError, "zip: corrupt deflate stream");
  out.resize(expected);
  return out;
}

}  // namespace

std::vector<std::uint8_t> write_archive(std::span<const Entry> entries) {
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> central;
  for (const auto& e : entries) {
    const auto crc = static_cast<std::uint32_t>(crc32(0L, e.data.data(), static_cast<uInt>(e.data.size())));
    const auto packed = deflate_raw(e.data);
    const auto offset = static_cast<std::uint32_t>(out.size());

    put32(out, 0x04034b50);
    put16(out, 20);
    put16(out, 0);
    put16(out, 8);
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, static_cast<std::uint32_t>(packed.size()));
    put32(out, static_cast<std::uint32_t>(e.data.size()));
    put16(out, static_cast<std::uint32_t>(e.name.size()));
    put16(out, 0);
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.insert(out.end(), packed.begin(), packed.end());

    put32(central, 0x02014b50);
    put16(central, 20);
    put16(central, 20);
    put16(central, 0);
    put16(central, 8);
    put16(central, kDosTime);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(packed.size()));
    put32(central, static_cast<std::uint32_t>(e.data.size()));
    put16(central, static_cast<std::uint32_t>(e.name.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0);
    put32(central, offset);
    central.insert(central.end(), e.name.begin(), e.name.end());
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint32_t>(entries.size()));
  put16(out, static_cast<std::uint32_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

std::vector<Entry> read_archive(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 22) throw Error(ErrorCode::DecodeError, "zip: too small");
  std::size_t eocd = bytes.size() - 22;
  while (get32(bytes, eocd) != 0x06054b50) {
    if (eocd == 0) throw Error(ErrorCode::DecodeError, "zip: no end of central directory");
    --eocd;
  }
  const std::size_t count = get16(bytes, eocd + 10);
  std::size_t at = get32(bytes, eocd + 16);
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < count; ++i) {
    if (get32(bytes, at) != 0x02014b50) throw Error(ErrorCode::DecodeError, "zip: bad central header");
    const auto method = get16(bytes, at + 10);
    const auto crc = get32(bytes, at + 16);
    const std::size_t packed = get32(bytes, at + 20);
    const std::size_t size = get32(bytes, at + 24);
    const std::size_t name_len = get16(bytes, at + 28);
    const std::size_t extra_len = get16(bytes, at + 30);
    const std::size_t comment_len = get16(bytes, at + 32);
    const std::size_t local = get32(bytes, at + 42);
    if (at + 46 + name_len > bytes.size()) throw Error(ErrorCode::DecodeError, "zip: truncated name");
    Entry e;
    e.name.assign(reinterpret_cast<const char*>(bytes.data() + at + 46), name_len);
    if (get32(bytes, local) != 0x04034b50) throw Error(ErrorCode::DecodeError, "zip: bad local header");
    const std::size_t data_at = local + 30 + get16(bytes, local + 26) + get16(bytes, local + 28);
    if (data_at + packed > bytes.size()) throw Error(ErrorCode::DecodeError, "zip: truncated data");
    const auto payload = bytes.subspan(data_at, packed);
    if (method == 0)
      e.data.assign(payload.begin(), payload.end());
    else if (method == 8)
      e.data = inflate_raw(payload, size);
    else
      throw Error(ErrorCode::DecodeError, "zip: unsupported method " + std::to_string(method));
    if (crc32(0L, e.data.data(), static_cast<uInt>(e.data.size())) != crc)
      throw Error(ErrorCode::DecodeError, "zip: crc mismatch for " + e.name);
    entries.push_back(std::move(e));
    at += 46 + name_len + extra_len + comment_len;
  }
  return entries;
}

}  // namespace hudtrack::zip
