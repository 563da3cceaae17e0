#pragma once

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "hudtrack/error.hpp"
#include "hudtrack/image.hpp"
#include "reference.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hudtrack_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

using reference::random_image;

template <typename F>
hudtrack::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const hudtrack::Error& e) {
    return e.code();
  }
  FAIL("expected an hudtrack::Error");
  return hudtrack::ErrorCode::IoError;
}

}  // namespace testing
