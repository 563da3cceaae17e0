#pragma once

#include <string>
#include <sys/types.h>

#include "hudtrack/image.hpp"
#include "hudtrack/ocr.hpp"
#include "hudtrack/roi.hpp"

namespace hudtrack::ocr {

enum class RecognizerKind { Builtin, External };

struct RecognizerSpec {
  RecognizerKind kind = RecognizerKind::Builtin;
  std::string command;  // run through /bin/sh -c
  int timeout_ms = 10000;
  double confidence_floor = kDefaultConfidenceFloor;

  /// Throws Error{ConfigError}.
  void validate() const;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Request line sent to the engine, without the trailing newline:
/// {"id": <int>, "kind": "<roi kind>", "image_png_base64": "<...>"}
std::string format_request(long id, const roi::RoiKind& kind, const GrayImage& img);

/// Validates one response line against the expected id.
/// Throws Error{ProtocolError}.
OcrReading parse_response(const std::string& line, long expected_id);

/// One long-lived engine process speaking the newline-delimited protocol on
/// its stdin/stdout. Requests are strictly serialized; not thread-safe, so
/// each worker owns its own instance. Any failure kills the engine; the
/// next call respawns it.
class ExternalRecognizer {
 public:
  explicit ExternalRecognizer(RecognizerSpec spec);
  ~ExternalRecognizer();

  ExternalRecognizer(const ExternalRecognizer&) = delete;
  ExternalRecognizer& operator=(const ExternalRecognizer&) = delete;

  /// Throws Error{EngineTimeout}, Error{ProtocolError}, Error{EngineCrashed}.
  OcrReading recognize(const GrayImage& img, const roi::RoiKind& kind,
                       const std::string& label = {});

 private:
  void spawn();
  void shutdown();
  [[noreturn]] void fail(ErrorCode code, const std::string& message);
  std::string read_line(int timeout_ms);
  int reap_exit_status();

  RecognizerSpec spec_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  long next_id_ = 1;
};

/// Convenience for one-shot use: spawns, sends one request, shuts down.
OcrReading recognize_external(const GrayImage& img, const roi::RoiKind& kind,
                              const RecognizerSpec& spec);

}  // namespace hudtrack::ocr
