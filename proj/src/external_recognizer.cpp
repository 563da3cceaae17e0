#include "hudtrack/external_recognizer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <json.hpp>

#include "hudtrack/error.hpp"
#include "hudtrack/image_io.hpp"

namespace hudtrack::ocr {

using nlohmann::json;

void RecognizerSpec::validate() const {
  if (kind == RecognizerKind::External) {
    if (command.empty()) throw Error(ErrorCode::ConfigError, "external recognizer needs a command");
    if (timeout_ms <= 0) throw Error(ErrorCode::ConfigError, "recognizer timeout must be positive");
  }
  if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0))
    throw Error(ErrorCode::ConfigError, "confidence floor must lie in [0,1]");
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (const std::size_t rest = bytes.size() - i; rest > 0) {
    const unsigned v = (bytes[i] << 16) | (rest == 2 ? bytes[i + 1] << 8 : 0);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string format_request(long id, const roi::RoiKind& kind, const GrayImage& img) {
  return "{\"id\": " + std::to_string(id) + ", \"kind\": " + json(roi::to_string(kind)).dump() +
         ", \"image_png_base64\": \"" + base64_encode(encode_png(img)) + "\"}";
}

OcrReading parse_response(const std::string& line, long expected_id) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception&) {
    throw Error(ErrorCode::ProtocolError, "response is not a JSON object: " + line.substr(0, 120));
  }
  if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_number_integer() ||
      !doc.contains("text") || !doc["text"].is_string() || !doc.contains("confidence") ||
      !doc["confidence"].is_number())
    throw Error(ErrorCode::ProtocolError, "response lacks id/text/confidence: " + line.substr(0, 120));
  const long id = doc["id"].get<long>();
  if (id != expected_id)
    throw Error(ErrorCode::ProtocolError, "response id " + std::to_string(id) + " does not match request " +
                                              std::to_string(expected_id));
  OcrReading reading;
  reading.raw_text = doc["text"].get<std::string>();
  reading.confidence = doc["confidence"].get<double>();
  if (!(reading.confidence >= 0.0 && reading.confidence <= 1.0))
    throw Error(ErrorCode::ProtocolError, "confidence outside [0,1]");
  if (reading.raw_text.empty() && reading.confidence != 0.0)
    throw Error(ErrorCode::ProtocolError, "empty text must carry confidence 0");
  return reading;
}

ExternalRecognizer::ExternalRecognizer(RecognizerSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

ExternalRecognizer::~ExternalRecognizer() { shutdown(); }

void ExternalRecognizer::spawn() {
  // A dead engine must surface as EPIPE on write, not kill the process.
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { signal(SIGPIPE, SIG_IGN); });
  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::EngineCrashed, "pipe failed");
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(ErrorCode::EngineCrashed, "pipe failed");
  }
  const pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    throw Error(ErrorCode::EngineCrashed, "fork failed");
  }
  if (pid == 0) {
    // Own process group, so a kill reaches whatever the shell started.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", spec_.command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
}

void ExternalRecognizer::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
  buffer_.clear();
}

void ExternalRecognizer::fail(ErrorCode code, const std::string& message) {
  shutdown();
  throw Error(code, message);
}

int ExternalRecognizer::reap_exit_status() {
  int status = 0;
  if (pid_ > 0 && waitpid(pid_, &status, 0) == pid_) {
    pid_ = -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  }
  return -1;
}

std::string ExternalRecognizer::read_line(int timeout_ms) {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) fail(ErrorCode::EngineTimeout, "no response within " + std::to_string(timeout_ms) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) fail(ErrorCode::EngineTimeout, "no response within " + std::to_string(timeout_ms) + " ms");
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n > 0) {
      buffer_.append(chunk, static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    // EOF: the engine went away.
    close(from_child_);
    from_child_ = -1;
    const int code = reap_exit_status();
    if (code != 0)
      fail(ErrorCode::EngineCrashed, "engine exited with status " + std::to_string(code));
    fail(ErrorCode::ProtocolError, "engine closed its output without responding");
  }
}

OcrReading ExternalRecognizer::recognize(const GrayImage& img, const roi::RoiKind& kind,
                                         const std::string& label) {
  if (pid_ < 0) spawn();
  const long id = next_id_++;
  const std::string request = format_request(id, kind, img) + "\n";
  std::size_t written = 0;
  while (written < request.size()) {
    const ssize_t n = write(to_child_, request.data() + written, request.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      close(to_child_);
      to_child_ = -1;
      const int code = reap_exit_status();
      fail(ErrorCode::EngineCrashed, "engine stopped reading requests (status " + std::to_string(code) + ")");
    }
    written += static_cast<std::size_t>(n);
  }

  const std::string line = read_line(spec_.timeout_ms);
  try {
    OcrReading reading = parse_response(line, id);
    reading.label = label;
    return reading;
  } catch (const Error& e) {
    fail(e.code(), e.what());
  }
}

OcrReading recognize_external(const GrayImage& img, const roi::RoiKind& kind,
                              const RecognizerSpec& spec) {
  ExternalRecognizer engine(spec);
  return engine.recognize(img, kind);
}

}  // namespace hudtrack::ocr
