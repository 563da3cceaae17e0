#include "hudtrack/error.hpp"

namespace hudtrack {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::FrameMissing: return "FrameMissing";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::TileConfigError: return "TileConfigError";
    case ErrorCode::KernelError: return "KernelError";
    case ErrorCode::InvalidFactor: return "InvalidFactor";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::NoGlyphs: return "NoGlyphs";
    case ErrorCode::EngineTimeout: return "EngineTimeout";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::EngineCrashed: return "EngineCrashed";
    case ErrorCode::CharInvalid: return "CharInvalid";
    case ErrorCode::RangeInvalid: return "RangeInvalid";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::EmptyTrack: return "EmptyTrack";
    case ErrorCode::DuplicateFrame: return "DuplicateFrame";
    case ErrorCode::OutOfZone: return "OutOfZone";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::TimeOrderError: return "TimeOrderError";
    case ErrorCode::NoAlignment: return "NoAlignment";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NoAltitudeData: return "NoAltitudeData";
    case ErrorCode::LayoutError: return "LayoutError";
    case ErrorCode::NothingToRender: return "NothingToRender";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace hudtrack
