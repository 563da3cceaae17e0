#include "hudtrack/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "hudtrack/error.hpp"
#include "hudtrack/export.hpp"
#include "hudtrack/image_io.hpp"
#include "hudtrack/ocr.hpp"

namespace hudtrack::pipeline {

RoiRecognizer::RoiRecognizer(const ocr::RecognizerSpec& spec) : spec_(spec) {
  if (spec_.kind == ocr::RecognizerKind::External) engine_ = std::make_unique<ocr::ExternalRecognizer>(spec_);
}

trajectory::FieldReading RoiRecognizer::read(const GrayImage& frame, const roi::RoiSpec& spec,
                                             const imaging::PreprocessParams& params) {
  trajectory::FieldReading f{spec.label, spec.kind, spec.int_digits, {spec.label, {}, 0.0}, std::nullopt};
  const GrayImage enhanced = roi::enhance_roi(roi::crop_roi(frame, spec), spec.kind, params);
  if (!engine_) {
    f.reading = ocr::recognize_builtin(enhanced, ocr::GlyphTemplateSet::builtin(), spec.label);
    return f;
  }
  try {
    f.reading = engine_->recognize(enhanced, spec.kind, spec.label);
  } catch (const Error& e) {
    f.engine_error = e.code();
  }
  return f;
}

namespace {

std::string interval_stem(int interval) { return "interval_" + std::to_string(interval) + "s"; }

void note_tile_clamps(const roi::RoiConfig& rois, const imaging::PreprocessParams& params, std::ostream& log) {
  for (const auto& spec : rois.rois) {
    const auto p = roi::enhance_profile(spec.kind, params);
    const int w = (spec.rect.w + 2 * p.pad_px) * p.scale;
    const int h = (spec.rect.h + 2 * p.pad_px) * p.scale;
    if (params.clahe_tiles.cols > w || params.clahe_tiles.rows > h)
      log << "roi " << spec.label << ": CLAHE tiles clamped to " << std::min(params.clahe_tiles.cols, w) << "x"
          << std::min(params.clahe_tiles.rows, h) << "\n";
  }
}

}  // namespace

PipelineResult run(const config::RunConfig& cfg, std::ostream& log) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  const auto rois = config::load_roi_config(cfg.roi_config);
  const auto validation = roi::validate_config(rois);
  for (const auto& w : validation.warnings) log << "roi config warning: " << w.message << "\n";
  if (!validation.ok()) {
    std::string msg = cfg.roi_config.string() + " failed validation:";
    for (const auto& e : validation.errors) msg += " [" + e.label + "] " + e.message + ";";
    throw Error(ErrorCode::ValidationFailed, msg);
  }
  note_tile_clamps(rois, cfg.preprocess, log);

  const auto source = ingest::FrameSource::from_directory(cfg.frames_dir, cfg.fps, cfg.duration_s);
  log << "ingest: " << source.frame_count() << " frames, " << source.duration_s() << " s at " << cfg.fps << " fps\n";

  PipelineResult result;
  std::vector<int> intervals = cfg.intervals;
  std::sort(intervals.begin(), intervals.end());
  intervals.erase(std::unique(intervals.begin(), intervals.end()), intervals.end());

  std::set<int> wanted;
  for (int interval : intervals) {
    IntervalRun run;
    run.interval_s = interval;
    run.plan = ingest::plan_sampling(source.duration_s(), interval);
    ingest::select_frames(run.plan, source.fps(), source.frame_count());
    wanted.insert(run.plan.frame_indices.begin(), run.plan.frame_indices.end());
    result.intervals.push_back(std::move(run));
  }

  // Recognize every needed frame once; results land in fixed slots so the
  // outcome is independent of scheduling.
  const std::vector<int> frames(wanted.begin(), wanted.end());
  std::vector<trajectory::FrameReadings> readings(frames.size());
  std::vector<std::string> frame_errors(frames.size());
  const auto pre_dir = cfg.output_dir / "preprocessed";
  if (cfg.exports.preprocessed_frames) std::filesystem::create_directories(pre_dir);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    RoiRecognizer recognizer(cfg.recognizer);
    for (std::size_t i = next++; i < frames.size(); i = next++) {
      const int index = frames[i];
      readings[i].frame_index = index;
      try {
        const GrayImage frame = ingest::load_frame(source, index);
        if (frame.width() != rois.frame_width || frame.height() != rois.frame_height)
          throw Error(ErrorCode::OutOfBounds, "frame is " + std::to_string(frame.width()) + "x" +
                                                  std::to_string(frame.height()) + ", ROI config expects " +
                                                  std::to_string(rois.frame_width) + "x" +
                                                  std::to_string(rois.frame_height));
        if (cfg.exports.preprocessed_frames) {
          const auto pre = imaging::preprocess_frame(frame, cfg.preprocess);
          write_file_atomic(pre_dir / ingest::frame_filename(index), encode_png(pre.image));
          if (pre.edges) write_file_atomic(pre_dir / ingest::frame_filename(index, "_edges.png"), encode_png(*pre.edges));
        }
        for (const auto& spec : rois.rois) readings[i].fields.push_back(recognizer.read(frame, spec, cfg.preprocess));
      } catch (const Error& e) {
        frame_errors[i] = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(frames.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::map<int, std::size_t> slot;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    slot[frames[i]] = i;
    if (!frame_errors[i].empty()) {
      log << "frame " << frames[i] << ": " << frame_errors[i] << "\n";
      result.unreadable.push_back({frames[i], "frame", frame_errors[i]});
    } else {
      ++result.frames_recognized;
    }
  }
  log << "ocr: " << result.frames_recognized << "/" << frames.size() << " frames recognized\n";

  std::map<std::pair<int, std::string>, std::string> issues;
  std::vector<analysis::IntervalTracks> tracks;
  for (auto& run : result.intervals) {
    std::vector<trajectory::FrameReadings> these;
    for (int index : run.plan.frame_indices) {
      const auto i = slot.at(index);
      if (frame_errors[i].empty()) these.push_back(readings[i]);
      else run.assembled.dropped.push_back({index, -1.0, "FrameUnreadable"});
    }
    try {
      auto dropped = std::move(run.assembled.dropped);
      run.assembled = trajectory::assemble_track(these, run.plan, cfg.recognizer.confidence_floor);
      run.assembled.dropped.insert(run.assembled.dropped.begin(), dropped.begin(), dropped.end());
      run.filtered = trajectory::two_stage_filter(run.assembled.track, cfg.filter);
      tracks.push_back({run.interval_s, run.assembled.track, run.filtered.clean});
    } catch (const Error& e) {
      run.error = e.what();
      log << "interval " << run.interval_s << " s: " << e.what() << "\n";
      continue;
    }
    for (const auto& r : run.assembled.track.records)
      for (const auto& fi : r.field_status) issues[{r.frame_index, fi.field}] = fi.code;
    for (const auto& d : run.assembled.dropped) {
      try {
        for (const auto& fi : parse_status(d.reason)) issues[{d.frame_index, fi.field}] = fi.code;
      } catch (const Error&) {
      }
    }
    log << "interval " << run.interval_s << " s: " << run.assembled.track.size() << " raw, "
        << run.filtered.clean.size() << " clean (" << run.filtered.stage1.removed.size() << " median, "
        << run.filtered.stage2.removed.size() << " buffer), " << run.assembled.dropped.size() << " dropped\n";
  }
  for (const auto& [key, code] : issues) result.unreadable.push_back({key.first, key.second, code});
  std::sort(result.unreadable.begin(), result.unreadable.end(), [](const auto& a, const auto& b) {
    return std::tie(a.frame_index, a.field) < std::tie(b.frame_index, b.field);
  });
  if (tracks.empty()) throw Error(ErrorCode::EmptyTrack, "no sampling interval produced a track");

  result.report = analysis::build_sampling_report(tracks, cfg.constants, cfg.histogram_bin_kmh);
  for (const auto& t : tracks) {
    if (t.clean.size() < 2) continue;
    result.methods.push_back(analysis::summarize_methods(t.clean, t.interval_s, cfg.constants));
  }

  // exports
  const auto& out = cfg.output_dir;
  std::filesystem::create_directories(out / "tracks");
  auto record = [&](const std::filesystem::path& rel) { result.outputs.push_back(rel.generic_string()); };
  for (const auto& run : result.intervals) {
    if (run.error) continue;
    const std::string stem = interval_stem(run.interval_s);
    const auto& clean = run.filtered.clean;
    try {
      if (cfg.exports.csv) {
        exporter::write_track_csv(run.assembled.track, out / "tracks" / (stem + "_raw.csv"));
        record(std::filesystem::path("tracks") / (stem + "_raw.csv"));
        if (!clean.empty()) {
          exporter::write_track_csv(clean, out / "tracks" / (stem + "_clean.csv"));
          record(std::filesystem::path("tracks") / (stem + "_clean.csv"));
        }
      }
      if (cfg.exports.kmz && clean.size() >= 2) {
        exporter::write_kmz(clean, out / "tracks" / (stem + ".kmz"), {cfg.run_id + " " + stem, cfg.exports.extrude});
        record(std::filesystem::path("tracks") / (stem + ".kmz"));
      }
      if (cfg.exports.geojson && !clean.empty()) {
        exporter::write_geojson(clean, out / "tracks" / (stem + ".geojson"));
        record(std::filesystem::path("tracks") / (stem + ".geojson"));
      }
    } catch (const Error& e) {
      log << "export " << stem << ": " << e.what() << "\n";
    }
  }
  if (cfg.exports.charts) {
    exporter::write_charts(exporter::render_charts(result.report), out / "charts");
    for (const char* name : {"counts.svg", "speeds.svg", "methods.svg"}) record(std::filesystem::path("charts") / name);
  }

  nlohmann::json intervals_doc = nlohmann::json::array();
  for (const auto& run : result.intervals) {
    nlohmann::json item = {{"interval_s", run.interval_s},
                           {"planned_timestamps", run.plan.timestamps.size()},
                           {"frames", run.plan.frame_indices},
                           {"dropped", exporter::to_json(run.assembled.dropped)}};
    if (run.error) item["error"] = *run.error;
    else item["filter"] = exporter::to_json(run.filtered);
    intervals_doc.push_back(std::move(item));
  }
  nlohmann::json unreadable = nlohmann::json::array();
  for (const auto& u : result.unreadable) unreadable.push_back({{"frame", u.frame_index}, {"field", u.field}, {"code", u.code}});
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : result.methods) methods.push_back(exporter::to_json(m));

  result.exit_code = result.unreadable.empty() && std::none_of(result.intervals.begin(), result.intervals.end(),
                                                               [](const auto& r) { return r.error.has_value(); })
                         ? 0
                         : 2;
  const nlohmann::json report = {{"run_id", cfg.run_id},
                                 {"status", result.exit_code == 0 ? "complete" : "partial"},
                                 {"frames_sampled", frames.size()},
                                 {"frames_recognized", result.frames_recognized},
                                 {"sampling", exporter::to_json(result.report)},
                                 {"intervals", intervals_doc},
                                 {"unreadable", unreadable},
                                 {"methods", methods}};
  exporter::write_json(out / "report.json", report);
  record("report.json");

  // Worker count and output location do not affect results, so they are
  // left out of the echo.
  auto echo = config::to_json(cfg);
  echo.erase("workers");
  echo.erase("output_dir");
  const nlohmann::json manifest = {{"tool", "hudtrack"},
                                   {"version", kVersion},
                                   {"config", echo},
                                   {"roi_config", config::to_json(rois)},
                                   {"frame_count", source.frame_count()},
                                   {"outputs", result.outputs}};
  exporter::write_json(out / "manifest.json", manifest);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  log << "pipeline finished in " << secs << " s, status " << (result.exit_code == 0 ? "complete" : "partial") << "\n";
  return result;
}

}  // namespace hudtrack::pipeline
