#include "hudtrack/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <regex>
#include <set>

#include "hudtrack/error.hpp"
#include "hudtrack/image_io.hpp"

namespace hudtrack::ingest {

namespace fs = std::filesystem;

FrameSource FrameSource::from_directory(const fs::path& dir, double fps,
                                        std::optional<double> duration_override) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::FrameMissing, "no frame directory " + dir.string());
  static const std::regex pattern(R"(frame_(\d{6,})\.(png|pgm))");
  std::map<long, fs::path> by_index;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || !std::regex_match(name, m, pattern)) continue;
    const long idx = std::stol(m[1].str());
    if (!by_index.emplace(idx, entry.path()).second)
      throw Error(ErrorCode::ConfigError, "frame index " + m[1].str() + " present twice in " + dir.string());
  }
  if (by_index.empty()) throw Error(ErrorCode::FrameMissing, "no frame_%06d images in " + dir.string());
  long expected = 0;
  for (const auto& [idx, path] : by_index) {
    if (idx != expected) throw Error(ErrorCode::FrameMissing, dir.string() + "/" + frame_filename(static_cast<int>(expected)));
    ++expected;
  }
  FrameSource src;
  src.kind_ = SourceKind::ImageSequenceDirectory;
  src.fps_ = fps;
  src.duration_override_ = duration_override;
  for (auto& [idx, path] : by_index) src.files_.push_back(std::move(path));
  src.check();
  return src;
}

FrameSource FrameSource::from_files(std::vector<fs::path> files, double fps,
                                    std::optional<double> duration_override) {
  FrameSource src;
  src.kind_ = SourceKind::FileList;
  src.fps_ = fps;
  src.duration_override_ = duration_override;
  src.files_ = std::move(files);
  src.check();
  return src;
}

void FrameSource::check() const {
  if (!(fps_ > 0.0)) throw Error(ErrorCode::ConfigError, "fps must be positive");
  if (files_.empty()) throw Error(ErrorCode::ConfigError, "frame source needs at least one frame");
  if (duration_override_ && *duration_override_ < 0.0)
    throw Error(ErrorCode::ConfigError, "duration override must be non-negative");
}

double FrameSource::duration_s() const noexcept {
  if (duration_override_) return *duration_override_;
  return static_cast<double>(frame_count() - 1) / fps_;
}

const fs::path& FrameSource::file(int index) const {
  if (index < 0 || index >= frame_count())
    throw Error(ErrorCode::FrameMissing, "frame index " + std::to_string(index) + " out of range");
  return files_[static_cast<std::size_t>(index)];
}

SamplingPlan plan_sampling(double duration_s, int interval_s) {
  if (interval_s < 1) throw Error(ErrorCode::InvalidInterval, "interval must be a positive whole number of seconds");
  if (!(duration_s >= 0.0)) throw Error(ErrorCode::InvalidInterval, "duration must be non-negative");
  SamplingPlan plan;
  plan.interval_s = interval_s;
  // Guard against 120.99999 style durations from fps division.
  const auto steps = static_cast<long>(std::floor(duration_s / interval_s + 1e-9));
  plan.timestamps.reserve(static_cast<std::size_t>(steps + 1));
  for (long k = 0; k <= steps; ++k) plan.timestamps.push_back(static_cast<double>(k * interval_s));
  return plan;
}

std::vector<int> select_frames(SamplingPlan& plan, double fps, int frame_count) {
  if (!(fps > 0.0)) throw Error(ErrorCode::ConfigError, "fps must be positive");
  plan.frame_indices.clear();
  plan.frame_times.clear();
  std::set<int> seen;
  for (double t : plan.timestamps) {
    const auto raw = static_cast<long long>(std::llround(t * fps));
    const int idx = static_cast<int>(std::clamp<long long>(raw, 0, std::max(frame_count - 1, 0)));
    if (seen.insert(idx).second) {
      plan.frame_indices.push_back(idx);
      plan.frame_times.push_back(t);
    }
  }
  return plan.frame_indices;
}

GrayImage load_frame(const FrameSource& source, int index) {
  return read_image(source.file(index));
}

std::string frame_filename(int index, std::string_view extension) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d", index);
  return std::string(buf) + std::string(extension);
}

}  // namespace hudtrack::ingest
