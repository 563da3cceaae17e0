#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hudtrack/analysis.hpp"
#include "hudtrack/config.hpp"
#include "hudtrack/external_recognizer.hpp"
#include "hudtrack/ingest.hpp"
#include "hudtrack/trajectory.hpp"

namespace hudtrack::pipeline {

inline constexpr const char* kVersion = "0.1.0";

/// Builtin matcher or a private external engine; one per worker.
class RoiRecognizer {
 public:
  explicit RoiRecognizer(const ocr::RecognizerSpec& spec);

  /// Engine failures are reported in FieldReading::engine_error.
  trajectory::FieldReading read(const GrayImage& frame, const roi::RoiSpec& spec,
                                const imaging::PreprocessParams& params);

 private:
  ocr::RecognizerSpec spec_;
  std::unique_ptr<ocr::ExternalRecognizer> engine_;
};

struct UnreadableRoi {
  int frame_index = 0;
  std::string field;
  std::string code;
};

struct IntervalRun {
  int interval_s = 1;
  ingest::SamplingPlan plan;
  trajectory::AssembledTrack assembled;
  trajectory::TwoStageResult filtered;
  std::optional<std::string> error;  // set when no track could be produced
};

struct PipelineResult {
  std::vector<IntervalRun> intervals;
  analysis::SamplingReport report;
  std::vector<analysis::MethodReport> methods;
  std::vector<UnreadableRoi> unreadable;
  std::size_t frames_recognized = 0;
  std::vector<std::string> outputs;  // relative to the output directory
  int exit_code = 0;                 // 0 complete, 2 partial
};

/// ingest -> ROI OCR -> assemble -> filter -> analyze -> export.
/// Throws Error when no interval yields a track (the caller maps it to 1).
PipelineResult run(const config::RunConfig& cfg, std::ostream& log);

}  // namespace hudtrack::pipeline
