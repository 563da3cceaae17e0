#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hudtrack/imaging.hpp"

namespace hudtrack::annotator {

struct ServerOptions {
  std::filesystem::path frames_dir;
  double fps = 1.0;
  std::filesystem::path roi_path;
  std::optional<std::filesystem::path> static_dir;
  imaging::PreprocessParams params;
  std::string host = "127.0.0.1";
  int port = 8765;  // 0 picks a free port
};

/// Local HTTP API behind the ROI annotator:
///   GET /api/frames                      index list and frame size
///   GET /api/frames/{i}.png              decoded frame
///   GET /api/roi-config                  current document
///   PUT /api/roi-config                  validated save (422 report, 409 stale version)
///   GET /api/preview/{i}.png             frame with the current ROIs drawn
///   GET /api/enhanced/{label}/{i}.png    enhanced crop of a saved ROI
class AnnotatorServer {
 public:
  explicit AnnotatorServer(ServerOptions options);
  ~AnnotatorServer();

  /// Binds the socket and returns the port. Throws Error{IoError}.
  int bind();
  /// Blocks until stop().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hudtrack::annotator
