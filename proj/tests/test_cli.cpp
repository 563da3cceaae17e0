#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "hudtrack/cli.hpp"
#include "hudtrack/config.hpp"
#include "hudtrack/image_io.hpp"
#include "hudtrack/ingest.hpp"

using namespace hudtrack;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run_cli(const testing::TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(HUDTRACK_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// In-process variant for quick argument checks.
Run run_inline(std::vector<std::string> args) {
  args.insert(args.begin(), "hudtrack");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("help and bad arguments") {
  CHECK(run_inline({"--help"}).code == 0);
  CHECK(run_inline({"pipeline", "--bogus"}).code == 1);
  CHECK(run_inline({}).code == 1);
}

TEST_CASE("synth then pipeline end to end") {
  testing::TempDir dir("cli_e2e");
  auto r = run_cli(dir, "synth --out " + (dir / "ds").string() + " --duration 20 --seed 3");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "ds/run.json"));
  r = run_cli(dir, "pipeline --config " + (dir / "ds/run.json").string() + " --out " + (dir / "out").string());
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("interval_s,raw,clean") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir / "out/report.json"));
  CHECK(report.at("status") == "complete");
  const auto& intervals = report.at("sampling").at("intervals");
  REQUIRE(intervals.size() == 5);
  const int expected[] = {21, 5, 3, 2, 2};
  for (std::size_t i = 0; i < 5; ++i) CHECK(intervals[i].at("raw_count") == expected[i]);
  for (const char* f : {"tracks/interval_1s_raw.csv", "tracks/interval_1s_clean.csv", "tracks/interval_5s.kmz",
                        "tracks/interval_1s.geojson", "charts/counts.svg", "charts/speeds.svg",
                        "charts/methods.svg", "manifest.json"})
    CHECK_MESSAGE(fs::exists(dir / "out" / f), f);
  const auto manifest = nlohmann::json::parse(slurp(dir / "out/manifest.json"));
  CHECK_FALSE(manifest.at("config").contains("workers"));
}

TEST_CASE("pipeline output does not depend on the worker count") {
  testing::TempDir dir("cli_workers");
  REQUIRE(run_cli(dir, "synth --out " + (dir / "ds").string() + " --duration 15 --seed 5 --noise 6").code == 0);
  const auto cfg = (dir / "ds/run.json").string();
  REQUIRE(run_cli(dir, "pipeline --config " + cfg + " --workers 1 --no-charts --out " + (dir / "a").string()).code <= 2);
  REQUIRE(run_cli(dir, "pipeline --config " + cfg + " --workers 3 --no-charts --out " + (dir / "b").string()).code <= 2);
  CHECK(slurp(dir / "a/report.json") == slurp(dir / "b/report.json"));
  CHECK(slurp(dir / "a/tracks/interval_1s_clean.csv") == slurp(dir / "b/tracks/interval_1s_clean.csv"));
  CHECK(slurp(dir / "a/manifest.json") == slurp(dir / "b/manifest.json"));
}

TEST_CASE("missing ROI config is fatal and names the path") {
  testing::TempDir dir("cli_missing");
  REQUIRE(run_cli(dir, "synth --out " + (dir / "ds").string() + " --duration 3").code == 0);
  const auto missing = (dir / "nowhere/rois.json").string();
  const auto r = run_cli(dir, "pipeline --frames " + (dir / "ds/frames").string() + " --rois " + missing + " --out " +
                                  (dir / "out").string());
  CHECK(r.code == 1);
  CHECK(r.err.find(missing) != std::string::npos);
}

TEST_CASE("unreadable ROIs give a partial run") {
  testing::TempDir dir("cli_partial");
  REQUIRE(run_cli(dir, "synth --out " + (dir / "ds").string() + " --duration 19").code == 0);
  const auto rois = config::load_roi_config(dir / "ds/rois.json");
  const auto* lon = rois.find("lon");
  REQUIRE(lon != nullptr);
  // blank the longitude field in 2 of 20 frames
  for (int f : {4, 11}) {
    const auto path = dir / ("ds/frames/" + ingest::frame_filename(f));
    auto img = read_image(path);
    for (int y = lon->rect.y; y < lon->rect.y + lon->rect.h; ++y)
      for (int x = lon->rect.x; x < lon->rect.x + lon->rect.w; ++x) img.at(x, y) = 30;
    write_file_atomic(path, encode_png(img));
  }
  const auto r = run_cli(dir, "pipeline --config " + (dir / "ds/run.json").string() + " --no-charts");
  CHECK(r.code == 2);
  const auto report = nlohmann::json::parse(slurp(dir / "ds/out/report.json"));
  CHECK(report.at("status") == "partial");
  std::vector<int> frames;
  for (const auto& u : report.at("unreadable")) frames.push_back(u.at("frame").get<int>());
  CHECK(frames == std::vector<int>{4, 11});
  const auto& dropped = report.at("intervals")[0].at("dropped");
  REQUIRE(dropped.size() == 2);
  CHECK(dropped[0].at("reason") == "longitude:NoGlyphs");
  CHECK(report.at("sampling").at("intervals")[0].at("raw_count") == 18);
}

TEST_CASE("roi preview") {
  testing::TempDir dir("cli_preview");
  REQUIRE(run_cli(dir, "synth --out " + (dir / "ds").string() + " --duration 2").code == 0);
  auto r = run_cli(dir, "roi preview --config " + (dir / "ds/run.json").string() + " --frame 1 --out " +
                            (dir / "p.png").string());
  CHECK(r.code == 0);
  CHECK(r.out.find("roi config ok") != std::string::npos);
  const auto img = decode_png_rgb(read_file_bytes(dir / "p.png"));
  CHECK(img.width() == 640);

  auto cfg = config::load_roi_config(dir / "ds/rois.json");
  cfg.rois[0].rect.x = 630;
  config::save_roi_config(cfg, dir / "bad.json");
  r = run_cli(dir, "roi preview --frames " + (dir / "ds/frames").string() + " --rois " + (dir / "bad.json").string() +
                       " --out " + (dir / "q.png").string());
  CHECK(r.code == 1);
  CHECK(r.out.find("OutOfBounds") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "q.png"));
  r = run_cli(dir, "roi preview --frames " + (dir / "ds/frames").string() + " --out " + (dir / "q.png").string());
  CHECK(r.code == 1);
}

TEST_CASE("compare and export") {
  testing::TempDir dir("cli_compare");
  REQUIRE(run_cli(dir, "synth --out " + (dir / "ds").string() + " --duration 40").code == 0);
  const auto truth = (dir / "ds/truth.csv").string();
  auto r = run_cli(dir, "compare --track " + truth + " --intervals 1,5 --out " + (dir / "cmp").string());
  CHECK_MESSAGE(r.code == 0, r.err);
  const auto methods = nlohmann::json::parse(slurp(dir / "cmp/methods.json"));
  CHECK(methods.size() == 2);
  CHECK(fs::exists(dir / "cmp/methods.svg"));
  CHECK(r.out.find(",haversine,") != std::string::npos);

  r = run_cli(dir, "export --track " + truth + " --formats kmz,geojson --out " + (dir / "ex").string());
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(fs::exists(dir / "ex/truth.kmz"));
  CHECK(fs::exists(dir / "ex/truth.geojson"));
  r = run_cli(dir, "export --track " + truth + " --formats svg --out " + (dir / "ex").string());
  CHECK(r.code == 1);
  r = run_cli(dir, "export --track " + (dir / "nope.csv").string());
  CHECK(r.code == 1);
  CHECK(r.err.find("nope.csv") != std::string::npos);
}
