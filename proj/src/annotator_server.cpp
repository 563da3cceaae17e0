#include "hudtrack/annotator_server.hpp"

#include <httplib.h>

#include <mutex>

#include "hudtrack/config.hpp"
#include "hudtrack/error.hpp"
#include "hudtrack/image_io.hpp"
#include "hudtrack/ingest.hpp"
#include "hudtrack/roi.hpp"

namespace hudtrack::annotator {

using nlohmann::json;

struct AnnotatorServer::Impl {
  ServerOptions options;
  ingest::FrameSource source;
  httplib::Server server;
  std::mutex mutex;
  roi::RoiConfig current;
  int frame_width = 0;
  int frame_height = 0;

  explicit Impl(ServerOptions o)
      : options(std::move(o)), source(ingest::FrameSource::from_directory(options.frames_dir, options.fps)) {
    const GrayImage first = ingest::load_frame(source, 0);
    frame_width = first.width();
    frame_height = first.height();
    if (std::filesystem::exists(options.roi_path)) {
      current = config::load_roi_config(options.roi_path);
    } else {
      current.version = 0;
      current.frame_width = frame_width;
      current.frame_height = frame_height;
    }
    // httplib's default also sets SO_REUSEPORT, which would let a second
    // server share a busy port.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    routes();
  }

  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
  }

  static void send_png(httplib::Response& res, const std::vector<std::uint8_t>& png) {
    res.status = 200;
    res.set_content(std::string(png.begin(), png.end()), "image/png");
  }

  /// Frame by index, or nullopt after answering 404.
  std::optional<GrayImage> frame_or_404(const std::string& text, httplib::Response& res) {
    const long index = std::stol(text);
    if (index < 0 || index >= source.frame_count()) {
      send_error(res, 404, "no frame " + text);
      return std::nullopt;
    }
    return ingest::load_frame(source, static_cast<int>(index));
  }

  void routes() {
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    });

    server.Get("/api/frames", [this](const httplib::Request&, httplib::Response& res) {
      json indices = json::array();
      for (int i = 0; i < source.frame_count(); ++i) indices.push_back(i);
      send_json(res, 200,
                {{"count", source.frame_count()},
                 {"indices", indices},
                 {"width", frame_width},
                 {"height", frame_height},
                 {"fps", source.fps()}});
    });

    server.Get(R"(/api/frames/(\d+)\.png)", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto frame = frame_or_404(req.matches[1], res)) send_png(res, encode_png(*frame));
    });

    server.Get("/api/roi-config", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mutex);
      send_json(res, 200, config::to_json(current));
    });

    server.Put("/api/roi-config", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        send_error(res, 400, std::string("body is not JSON: ") + e.what());
        return;
      }
      roi::RoiConfig incoming;
      try {
        incoming = config::roi_config_from_json(body);
      } catch (const Error& e) {
        send_json(res, 422,
                  {{"ok", false},
                   {"errors", json::array({{{"label", ""}, {"code", "Schema"}, {"message", e.what()}}})},
                   {"warnings", json::array()}});
        return;
      }
      std::lock_guard lock(mutex);
      if (incoming.version != current.version) {
        send_json(res, 409, {{"error", "stale version"}, {"current_version", current.version}});
        return;
      }
      auto report = roi::validate_config(incoming);
      if (incoming.frame_width != frame_width || incoming.frame_height != frame_height)
        report.errors.push_back({"", roi::IssueCode::BadFrameDimensions,
                                 "frames are " + std::to_string(frame_width) + "x" + std::to_string(frame_height)});
      if (!report.ok()) {
        send_json(res, 422, config::to_json(report));
        return;
      }
      incoming.version = current.version + 1;
      config::save_roi_config(incoming, options.roi_path);
      current = incoming;
      auto doc = config::to_json(current);
      doc["warnings"] = config::to_json(report)["warnings"];
      send_json(res, 200, doc);
    });

    server.Get(R"(/api/preview/(\d+)\.png)", [this](const httplib::Request& req, httplib::Response& res) {
      auto frame = frame_or_404(req.matches[1], res);
      if (!frame) return;
      roi::RoiConfig cfg;
      {
        std::lock_guard lock(mutex);
        cfg = current;
      }
      try {
        send_png(res, encode_png(roi::render_preview(*frame, cfg)));
      } catch (const Error& e) {
        send_error(res, 422, e.what());
      }
    });

    server.Get(R"(/api/enhanced/([^/]+)/(\d+)\.png)", [this](const httplib::Request& req, httplib::Response& res) {
      std::optional<roi::RoiSpec> spec;
      {
        std::lock_guard lock(mutex);
        if (const auto* s = current.find(req.matches[1])) spec = *s;
      }
      if (!spec) {
        send_error(res, 404, "no saved ROI labelled '" + std::string(req.matches[1]) + "'");
        return;
      }
      auto frame = frame_or_404(req.matches[2], res);
      if (!frame) return;
      try {
        send_png(res, encode_png(roi::enhance_roi(roi::crop_roi(*frame, *spec), spec->kind, options.params)));
      } catch (const Error& e) {
        send_error(res, 422, e.what());
      }
    });

    if (options.static_dir && !server.set_mount_point("/", options.static_dir->string()))
      throw Error(ErrorCode::IoError, "static directory not found: " + options.static_dir->string());
  }
};

AnnotatorServer::AnnotatorServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

AnnotatorServer::~AnnotatorServer() { stop(); }

int AnnotatorServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    const int port = impl_->server.bind_to_any_port(o.host);
    if (port < 0) throw Error(ErrorCode::IoError, "cannot bind " + o.host);
    o.port = port;
  } else if (!impl_->server.bind_to_port(o.host, o.port)) {
    throw Error(ErrorCode::IoError, "port " + std::to_string(o.port) + " on " + o.host + " is not available");
  }
  return o.port;
}

void AnnotatorServer::serve() { impl_->server.listen_after_bind(); }

void AnnotatorServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace hudtrack::annotator
