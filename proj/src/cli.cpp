#include "hudtrack/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cmath>
#include <thread>

#include "hudtrack/analysis.hpp"
#include "hudtrack/annotator_server.hpp"
#include "hudtrack/config.hpp"
#include "hudtrack/error.hpp"
#include "hudtrack/export.hpp"
#include "hudtrack/image_io.hpp"
#include "hudtrack/ingest.hpp"
#include "hudtrack/pipeline.hpp"
#include "hudtrack/synth.hpp"

namespace hudtrack::cli {
namespace {

namespace fs = std::filesystem;

struct SynthArgs {
  fs::path out;
  synth::FlightSimParams flight;
  double noise = 0.0;
  double contrast = 1.0;
  std::uint64_t noise_seed = 7;
  std::string format = "png";
  int scale = 2;
};

struct PipelineArgs {
  std::string config, frames, rois, out, intervals, run_id, recognizer, recognizer_cmd, stages;
  std::optional<double> fps, duration, confidence_floor, clahe_clip, buffer_m, mad_multiplier, mad_floor;
  std::optional<int> workers, timeout_ms, utm_zone, median_window;
  bool revalidate = false, no_csv = false, no_kmz = false, no_geojson = false, no_charts = false,
       no_extrude = false, save_preprocessed = false;
};

struct PreviewArgs {
  std::string config, frames, rois;
  double fps = 1.0;
  int frame = 0;
  fs::path out = "preview.png";
};

struct ServeArgs {
  std::string config, frames, rois, static_dir, host = "127.0.0.1";
  double fps = 1.0;
  int port = 8765;
};

struct CompareArgs {
  fs::path track, out = "compare";
  std::string intervals = "1,5,10,15,20";
  bool filter = false;
  std::optional<double> earth_radius, meters_per_degree;
  std::optional<int> utm_zone;
};

struct ExportArgs {
  fs::path track, out = "export";
  std::string formats = "csv,kmz,geojson";
  std::string run_id = "hudtrack";
  bool no_extrude = false;
};

int count_int_digits(double value) {
  const auto whole = static_cast<long long>(std::floor(std::abs(value)));
  return static_cast<int>(std::to_string(whole).size());
}

int do_synth(const SynthArgs& a, std::ostream& out) {
  synth::DatasetSpec spec;
  spec.flight = a.flight;
  spec.style = synth::default_style(count_int_digits(a.flight.start.lon));
  spec.style.scale = a.scale;
  spec.noise_sigma = a.noise;
  spec.contrast = a.contrast;
  spec.noise_seed = a.noise_seed;
  if (a.format != "png" && a.format != "pgm") throw Error(ErrorCode::ConfigError, "--format must be png or pgm");
  spec.extension = "." + a.format;
  if (a.scale != 2) {
    // scale anchors with the glyph size so fields keep their relative layout
    for (auto& f : spec.style.layout) {
      f.x = f.x * a.scale / 2;
      f.y = f.y * a.scale / 2;
    }
    spec.style.width = spec.style.width * a.scale / 2;
    spec.style.height = spec.style.height * a.scale / 2;
  }
  const auto ds = synth::write_dataset(spec, a.out);
  out << "wrote " << ds.truth.size() << " frames, truth.csv, rois.json and run.json to " << a.out.string() << "\n";
  return 0;
}

config::RunConfig pipeline_config(const PipelineArgs& a) {
  config::RunConfig cfg;
  if (!a.config.empty()) cfg = config::load_run_config(a.config);
  else cfg.output_dir = "out";
  if (!a.frames.empty()) cfg.frames_dir = a.frames;
  if (!a.rois.empty()) cfg.roi_config = a.rois;
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (!a.intervals.empty()) cfg.intervals = config::parse_interval_list(a.intervals);
  if (!a.run_id.empty()) cfg.run_id = a.run_id;
  if (a.fps) cfg.fps = *a.fps;
  if (a.duration) cfg.duration_s = *a.duration;
  if (a.workers) cfg.workers = *a.workers;
  if (!a.recognizer.empty()) {
    if (a.recognizer == "builtin") cfg.recognizer.kind = ocr::RecognizerKind::Builtin;
    else if (a.recognizer == "external") cfg.recognizer.kind = ocr::RecognizerKind::External;
    else throw Error(ErrorCode::ConfigError, "--recognizer must be builtin or external");
  }
  if (!a.recognizer_cmd.empty()) {
    cfg.recognizer.command = a.recognizer_cmd;
    if (a.recognizer.empty()) cfg.recognizer.kind = ocr::RecognizerKind::External;
  }
  if (a.timeout_ms) cfg.recognizer.timeout_ms = *a.timeout_ms;
  if (a.confidence_floor) cfg.recognizer.confidence_floor = *a.confidence_floor;
  if (!a.stages.empty()) {
    cfg.preprocess.stages_enabled.clear();
    if (a.stages != "none") {
      std::stringstream ss(a.stages);
      for (std::string s; std::getline(ss, s, ',');) cfg.preprocess.stages_enabled.push_back(imaging::stage_from_string(s));
    }
  }
  if (a.clahe_clip) cfg.preprocess.clahe_clip = *a.clahe_clip;
  if (a.buffer_m) cfg.filter.buffer_m = *a.buffer_m;
  if (a.mad_multiplier) cfg.filter.mad_multiplier = *a.mad_multiplier;
  if (a.mad_floor) cfg.filter.mad_floor_deg = *a.mad_floor;
  if (a.median_window) cfg.filter.median_window = *a.median_window;
  if (a.utm_zone) {
    cfg.filter.utm_zone = *a.utm_zone;
    cfg.constants.utm_zone = *a.utm_zone;
  }
  if (a.revalidate) cfg.filter.revalidate_rejected = true;
  if (a.no_csv) cfg.exports.csv = false;
  if (a.no_kmz) cfg.exports.kmz = false;
  if (a.no_geojson) cfg.exports.geojson = false;
  if (a.no_charts) cfg.exports.charts = false;
  if (a.no_extrude) cfg.exports.extrude = false;
  if (a.save_preprocessed) cfg.exports.preprocessed_frames = true;
  return cfg;
}

int do_pipeline(const PipelineArgs& a, std::ostream& out, std::ostream& err) {
  const auto cfg = pipeline_config(a);
  const auto result = pipeline::run(cfg, err);
  out << "interval_s,raw,clean,retention_pct,mean_speed_kmh\n";
  for (const auto& r : result.report.intervals) {
    double mean = 0.0;
    for (const auto& s : r.speeds)
      if (s.method == "haversine") mean = s.mean;
    out << r.interval_s << ',' << r.raw_count << ',' << r.clean_count << ','
        << exporter::format_fixed(r.retention.retention_pct, 1) << ',' << exporter::format_fixed(mean, 2) << "\n";
  }
  if (result.exit_code == 2)
    err << result.unreadable.size() << " unreadable ROI readings; see " << (cfg.output_dir / "report.json").string() << "\n";
  return result.exit_code;
}

void print_report(const roi::ValidationReport& report, std::ostream& os) {
  for (const auto& e : report.errors)
    os << "error " << roi::to_string(e.code) << (e.label.empty() ? "" : " [" + e.label + "]") << ": " << e.message << "\n";
  for (const auto& w : report.warnings)
    os << "warning " << roi::to_string(w.code) << (w.label.empty() ? "" : " [" + w.label + "]") << ": " << w.message << "\n";
  if (report.ok()) os << "roi config ok\n";
}

int do_preview(const PreviewArgs& a, std::ostream& out) {
  fs::path frames = a.frames, rois = a.rois;
  double fps = a.fps;
  if (!a.config.empty()) {
    const auto cfg = config::load_run_config(a.config);
    if (frames.empty()) frames = cfg.frames_dir;
    if (rois.empty()) rois = cfg.roi_config;
    fps = cfg.fps;
  }
  if (rois.empty()) throw Error(ErrorCode::ConfigError, "no ROI config given (--rois or --config)");
  if (frames.empty()) throw Error(ErrorCode::ConfigError, "no frame directory given (--frames or --config)");
  const auto cfg = config::load_roi_config(rois);
  const auto report = roi::validate_config(cfg);
  print_report(report, out);
  if (!report.ok()) return 1;
  const auto source = ingest::FrameSource::from_directory(frames, fps);
  const auto frame = ingest::load_frame(source, a.frame);
  write_file_atomic(a.out, encode_png(roi::render_preview(frame, cfg)));
  out << "wrote " << a.out.string() << "\n";
  return 0;
}

int do_serve(const ServeArgs& a, std::ostream& out) {
  annotator::ServerOptions opt;
  opt.frames_dir = a.frames;
  opt.roi_path = a.rois;
  opt.fps = a.fps;
  if (!a.config.empty()) {
    const auto cfg = config::load_run_config(a.config);
    if (a.frames.empty()) opt.frames_dir = cfg.frames_dir;
    if (a.rois.empty()) opt.roi_path = cfg.roi_config;
    opt.fps = cfg.fps;
    opt.params = cfg.preprocess;
  }
  if (opt.frames_dir.empty() || opt.roi_path.empty())
    throw Error(ErrorCode::ConfigError, "serve-annotator needs --frames and --rois (or --config)");
  if (!a.static_dir.empty()) opt.static_dir = a.static_dir;
  opt.host = a.host;
  opt.port = a.port;

  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  annotator::AnnotatorServer server(opt);
  const int port = server.bind();
  out << "serving on http://" << opt.host << ":" << port << "/\n" << std::flush;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.serve();
  // serve() also returns if the listener fails; wake the waiter either way
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

int do_compare(const CompareArgs& a, std::ostream& out) {
  const auto track = exporter::read_track_csv(a.track);
  track.validate();
  geodesy::MethodConstants constants;
  if (a.earth_radius) constants.earth_radius_m = *a.earth_radius;
  if (a.meters_per_degree) constants.meters_per_degree = *a.meters_per_degree;
  constants.utm_zone = a.utm_zone;
  const auto intervals = config::parse_interval_list(a.intervals);
  std::optional<trajectory::FilterParams> filter;
  if (a.filter) filter = trajectory::FilterParams{};
  const auto reports = analysis::compare_methods(track, intervals, constants, filter);

  std::vector<analysis::IntervalTracks> tracks;
  for (int i : intervals) {
    auto sampled = analysis::resample(track, i);
    auto clean = filter ? trajectory::two_stage_filter(sampled, *filter).clean : sampled;
    tracks.push_back({i, std::move(sampled), std::move(clean)});
  }
  const auto sampling = analysis::build_sampling_report(tracks, constants);

  fs::create_directories(a.out);
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : reports) doc.push_back(exporter::to_json(r));
  exporter::write_json(a.out / "methods.json", doc);
  write_file_atomic(a.out / "methods.svg", exporter::render_charts(sampling).methods_svg);

  out << "interval_s,method,distance_km,mean_speed_kmh,max_speed_kmh,distance_pct_vs_utm\n";
  for (const auto& r : reports)
    for (std::size_t m = 0; m < r.methods.size(); ++m)
      out << r.interval_s << ',' << r.methods[m].method << ',' << exporter::format_fixed(r.methods[m].distance_km, 4) << ','
          << exporter::format_fixed(r.methods[m].mean_speed_kmh, 3) << ','
          << exporter::format_fixed(r.methods[m].max_speed_kmh, 3) << ','
          << exporter::format_fixed(r.distance_pct_vs_utm[m], 4) << "\n";
  return 0;
}

int do_export(const ExportArgs& a, std::ostream& out) {
  const auto track = exporter::read_track_csv(a.track);
  track.validate();
  fs::create_directories(a.out);
  const std::string stem = a.track.stem().string();
  std::stringstream ss(a.formats);
  for (std::string f; std::getline(ss, f, ',');) {
    if (f == "csv") exporter::write_track_csv(track, a.out / (stem + ".csv"));
    else if (f == "kmz") exporter::write_kmz(track, a.out / (stem + ".kmz"), {a.run_id, !a.no_extrude});
    else if (f == "geojson") exporter::write_geojson(track, a.out / (stem + ".geojson"));
    else throw Error(ErrorCode::ConfigError, "unknown export format '" + f + "'");
    out << "wrote " << (a.out / (stem + "." + f)).string() << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hudtrack: HUD telemetry extraction and flight-path analysis"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic HUD flight with ground truth");
  synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth_args.flight.seed, "Flight seed");
  synth_cmd->add_option("--duration", synth_args.flight.duration_s, "Flight duration in seconds");
  synth_cmd->add_option("--lat", synth_args.flight.start.lat, "Start latitude");
  synth_cmd->add_option("--lon", synth_args.flight.start.lon, "Start longitude");
  synth_cmd->add_option("--speed-min", synth_args.flight.speed_min_kmh, "km/h");
  synth_cmd->add_option("--speed-max", synth_args.flight.speed_max_kmh, "km/h");
  synth_cmd->add_option("--alt-min", synth_args.flight.altitude_min_m, "m");
  synth_cmd->add_option("--alt-max", synth_args.flight.altitude_max_m, "m");
  synth_cmd->add_option("--heading-volatility", synth_args.flight.heading_volatility_deg_s, "deg/s");
  synth_cmd->add_option("--noise", synth_args.noise, "Gaussian noise sigma (intensity levels)");
  synth_cmd->add_option("--contrast", synth_args.contrast, "Contrast factor");
  synth_cmd->add_option("--noise-seed", synth_args.noise_seed, "Corruption seed");
  synth_cmd->add_option("--format", synth_args.format, "png or pgm");
  synth_cmd->add_option("--scale", synth_args.scale, "Font scale");

  PipelineArgs p;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Extract, filter, analyze and export a flight");
  pipe_cmd->add_option("--config", p.config, "Run config (JSON)");
  pipe_cmd->add_option("--frames", p.frames, "Frame directory");
  pipe_cmd->add_option("--rois", p.rois, "ROI config");
  pipe_cmd->add_option("--out", p.out, "Output directory");
  pipe_cmd->add_option("--intervals", p.intervals, "Comma-separated sampling intervals in seconds");
  pipe_cmd->add_option("--run-id", p.run_id, "Run identifier");
  pipe_cmd->add_option("--fps", p.fps, "Frame rate of the frame sequence");
  pipe_cmd->add_option("--duration", p.duration, "Video duration override in seconds");
  pipe_cmd->add_option("--workers", p.workers, "Parallel OCR workers");
  pipe_cmd->add_option("--recognizer", p.recognizer, "builtin or external");
  pipe_cmd->add_option("--recognizer-cmd", p.recognizer_cmd, "External engine command");
  pipe_cmd->add_option("--timeout-ms", p.timeout_ms, "External engine timeout per request");
  pipe_cmd->add_option("--confidence-floor", p.confidence_floor, "Minimum OCR confidence");
  pipe_cmd->add_option("--stages", p.stages, "Frame-level stages, e.g. clahe,blur,threshold,sobel or none");
  pipe_cmd->add_option("--clahe-clip", p.clahe_clip, "Frame-level CLAHE clip limit");
  pipe_cmd->add_option("--median-window", p.median_window, "Outlier filter window");
  pipe_cmd->add_option("--mad-multiplier", p.mad_multiplier, "Outlier filter MAD multiplier");
  pipe_cmd->add_option("--mad-floor", p.mad_floor, "Outlier filter floor in degrees");
  pipe_cmd->add_option("--buffer-m", p.buffer_m, "UTM buffer in metres");
  pipe_cmd->add_option("--utm-zone", p.utm_zone, "UTM zone override");
  pipe_cmd->add_flag("--revalidate-rejected", p.revalidate, "Let the buffer stage readmit median rejects");
  pipe_cmd->add_flag("--no-csv", p.no_csv);
  pipe_cmd->add_flag("--no-kmz", p.no_kmz);
  pipe_cmd->add_flag("--no-geojson", p.no_geojson);
  pipe_cmd->add_flag("--no-charts", p.no_charts);
  pipe_cmd->add_flag("--no-extrude", p.no_extrude);
  pipe_cmd->add_flag("--save-preprocessed", p.save_preprocessed, "Write frames after the frame-level stages");

  PreviewArgs pv;
  auto* roi_cmd = app.add_subcommand("roi", "ROI tools");
  roi_cmd->require_subcommand(1);
  auto* preview_cmd = roi_cmd->add_subcommand("preview", "Draw the ROI config over one frame");
  preview_cmd->add_option("--config", pv.config, "Run config");
  preview_cmd->add_option("--frames", pv.frames, "Frame directory");
  preview_cmd->add_option("--rois", pv.rois, "ROI config");
  preview_cmd->add_option("--fps", pv.fps, "Frame rate");
  preview_cmd->add_option("--frame", pv.frame, "Frame index");
  preview_cmd->add_option("--out", pv.out, "Output PNG");

  ServeArgs sv;
  auto* serve_cmd = app.add_subcommand("serve-annotator", "Serve the ROI annotator HTTP API");
  serve_cmd->add_option("--config", sv.config, "Run config");
  serve_cmd->add_option("--frames", sv.frames, "Frame directory");
  serve_cmd->add_option("--rois", sv.rois, "ROI config file (created on first save)");
  serve_cmd->add_option("--fps", sv.fps, "Frame rate");
  serve_cmd->add_option("--host", sv.host, "Listen address");
  serve_cmd->add_option("--port", sv.port, "Listen port");
  serve_cmd->add_option("--static", sv.static_dir, "Directory with the annotator web app");

  CompareArgs cp;
  auto* compare_cmd = app.add_subcommand("compare", "Compare UTM, Haversine and raw-degree distances");
  compare_cmd->add_option("--track", cp.track, "Track CSV")->required();
  compare_cmd->add_option("--out", cp.out, "Output directory");
  compare_cmd->add_option("--intervals", cp.intervals, "Comma-separated sampling intervals");
  compare_cmd->add_flag("--filter", cp.filter, "Apply the two-stage filter after resampling");
  compare_cmd->add_option("--earth-radius", cp.earth_radius, "Haversine radius in metres");
  compare_cmd->add_option("--meters-per-degree", cp.meters_per_degree, "Raw-degree scale");
  compare_cmd->add_option("--utm-zone", cp.utm_zone, "UTM zone override");

  ExportArgs ex;
  auto* export_cmd = app.add_subcommand("export", "Convert a track CSV to other formats");
  export_cmd->add_option("--track", ex.track, "Track CSV")->required();
  export_cmd->add_option("--out", ex.out, "Output directory");
  export_cmd->add_option("--formats", ex.formats, "Comma-separated: csv,kmz,geojson");
  export_cmd->add_option("--run-id", ex.run_id, "Document name inside the KMZ");
  export_cmd->add_flag("--no-extrude", ex.no_extrude);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth_cmd->parsed()) return do_synth(synth_args, out);
    if (pipe_cmd->parsed()) return do_pipeline(p, out, err);
    if (preview_cmd->parsed()) return do_preview(pv, out);
    if (serve_cmd->parsed()) return do_serve(sv, out);
    if (compare_cmd->parsed()) return do_compare(cp, out);
    if (export_cmd->parsed()) return do_export(ex, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace hudtrack::cli
