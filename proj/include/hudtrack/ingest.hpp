#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "hudtrack/image.hpp"

namespace hudtrack::ingest {

enum class SourceKind { ImageSequenceDirectory, FileList };

/// An ordered image sequence standing in for a decoded video.
///
/// Frames are either discovered from a directory of `frame_%06d.png` (or
/// `.pgm`) files, or given explicitly. `duration_s` defaults to
/// (frame_count - 1) / fps.
class FrameSource {
 public:
  static FrameSource from_directory(const std::filesystem::path& dir, double fps,
                                    std::optional<double> duration_override = {});
  static FrameSource from_files(std::vector<std::filesystem::path> files, double fps,
                                std::optional<double> duration_override = {});

  SourceKind kind() const noexcept { return kind_; }
  double fps() const noexcept { return fps_; }
  int frame_count() const noexcept { return static_cast<int>(files_.size()); }
  double duration_s() const noexcept;
  const std::filesystem::path& file(int index) const;

 private:
  FrameSource() = default;
  void check() const;

  SourceKind kind_ = SourceKind::FileList;
  double fps_ = 1.0;
  std::optional<double> duration_override_;
  std::vector<std::filesystem::path> files_;
};

struct SamplingPlan {
  int interval_s = 1;
  std::vector<double> timestamps;
  /// Filled by select_frames; parallel to frame_times after dedup.
  std::vector<int> frame_indices;
  std::vector<double> frame_times;
};

/// Whole-second sampling inclusive of t = 0. Throws Error{InvalidInterval}.
SamplingPlan plan_sampling(double duration_s, int interval_s);

/// Maps each timestamp to round(t * fps), clamped into [0, frame_count - 1],
/// dropping repeats while keeping the first timestamp that produced an index.
std::vector<int> select_frames(SamplingPlan& plan, double fps, int frame_count);

/// Throws Error{FrameMissing} or Error{DecodeError}.
GrayImage load_frame(const FrameSource& source, int index);

std::string frame_filename(int index, std::string_view extension = ".png");

}  // namespace hudtrack::ingest
