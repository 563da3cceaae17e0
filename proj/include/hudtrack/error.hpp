#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hudtrack {

enum class ErrorCode {
  InvalidInterval,
  FrameMissing,
  DecodeError,
  TileConfigError,
  KernelError,
  InvalidFactor,
  OutOfBounds,
  ValidationFailed,
  NoGlyphs,
  EngineTimeout,
  ProtocolError,
  EngineCrashed,
  CharInvalid,
  RangeInvalid,
  Empty,
  EmptyTrack,
  DuplicateFrame,
  OutOfZone,
  TooShort,
  TimeOrderError,
  NoAlignment,
  EmptyInput,
  NoAltitudeData,
  LayoutError,
  NothingToRender,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code logic) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hudtrack
