#include <json.hpp>

#include <chrono>

#include "helpers.hpp"
#include "hudtrack/external_recognizer.hpp"
#include "hudtrack/font.hpp"

using namespace hudtrack;
using testing::error_code_of;

namespace {

ocr::RecognizerSpec stub(const std::string& mode, int timeout_ms = 5000) {
  ocr::RecognizerSpec spec;
  spec.kind = ocr::RecognizerKind::External;
  spec.command = std::string(HUDTRACK_STUB_ENGINE) + " " + mode;
  spec.timeout_ms = timeout_ms;
  return spec;
}

const roi::RoiKind kAlt{roi::Kind::Altitude, {}};

}  // namespace

TEST_CASE("base64 matches the standard alphabet and padding") {
  auto enc = [](std::string s) {
    return ocr::base64_encode({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  };
  CHECK(enc("") == "");
  CHECK(enc("f") == "Zg==");
  CHECK(enc("fo") == "Zm8=");
  CHECK(enc("foo") == "Zm9v");
  CHECK(enc("foobar") == "Zm9vYmFy");
}

TEST_CASE("request lines follow the wire format") {
  const auto line = ocr::format_request(7, {roi::Kind::Latitude, {}}, GrayImage(3, 2, 255));
  CHECK(line.find('\n') == std::string::npos);
  const auto doc = nlohmann::json::parse(line);
  CHECK(doc.at("id") == 7);
  CHECK(doc.at("kind") == "latitude");
  CHECK(doc.at("image_png_base64").get<std::string>().rfind("iVBORw0KGgo", 0) == 0);
  CHECK(doc.size() == 3);
}

TEST_CASE("response parsing validates id and fields") {
  const auto r = ocr::parse_response(R"({"id": 4, "text": "1501m", "confidence": 0.93})", 4);
  CHECK(r.raw_text == "1501m");
  CHECK(r.confidence == doctest::Approx(0.93));
  CHECK(error_code_of([] { ocr::parse_response(R"({"id": 5, "text": "1", "confidence": 1})", 4); }) ==
        ErrorCode::ProtocolError);
  CHECK(error_code_of([] { ocr::parse_response("not json", 1); }) == ErrorCode::ProtocolError);
  CHECK(error_code_of([] { ocr::parse_response(R"({"id": 1, "text": "1"})", 1); }) == ErrorCode::ProtocolError);
  CHECK(error_code_of([] { ocr::parse_response(R"({"id": 1, "text": 3, "confidence": 1})", 1); }) ==
        ErrorCode::ProtocolError);
  CHECK(error_code_of([] { ocr::parse_response(R"({"id": 1, "text": "1", "confidence": 1.5})", 1); }) ==
        ErrorCode::ProtocolError);
}

TEST_CASE("spec validation") {
  ocr::RecognizerSpec spec = stub("ok");
  CHECK_NOTHROW(spec.validate());
  spec.command.clear();
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::ConfigError);
  spec = stub("ok", 0);
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::ConfigError);
  spec = stub("ok");
  spec.confidence_floor = 1.5;
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::ConfigError);
}

TEST_CASE("a well-behaved engine returns readings verbatim") {
  ocr::ExternalRecognizer engine(stub("ok"));
  for (const char* text : {"1501m", "46.123456", "87%"}) {
    const auto r = engine.recognize(font::render_text(text, 2, 0, 255, 2), kAlt, "alt");
    CHECK(r.raw_text == text);
    CHECK(r.confidence == doctest::Approx(1.0));
    CHECK(r.label == "alt");
  }
  const auto low = ocr::recognize_external(font::render_text("12", 2, 0, 255, 2), kAlt, stub("lowconf"));
  CHECK(low.raw_text == "12");
  CHECK(low.confidence == doctest::Approx(0.3));
}

TEST_CASE("engine failures map to typed errors") {
  const auto img = font::render_text("5", 2, 0, 255, 2);
  CHECK(error_code_of([&] { ocr::recognize_external(img, kAlt, stub("crash")); }) == ErrorCode::EngineCrashed);
  CHECK(error_code_of([&] { ocr::recognize_external(img, kAlt, stub("garbage")); }) == ErrorCode::ProtocolError);
  CHECK(error_code_of([&] { ocr::recognize_external(img, kAlt, stub("wrongid")); }) == ErrorCode::ProtocolError);
  const auto start = std::chrono::steady_clock::now();
  CHECK(error_code_of([&] { ocr::recognize_external(img, kAlt, stub("hang", 300)); }) == ErrorCode::EngineTimeout);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
  ocr::RecognizerSpec missing = stub("ok");
  missing.command = "/nonexistent/engine-binary";
  CHECK(error_code_of([&] { ocr::recognize_external(img, kAlt, missing); }) == ErrorCode::EngineCrashed);
}

TEST_CASE("a crashed engine is respawned on the next request") {
  ocr::ExternalRecognizer engine(stub("crash-after-2"));
  const auto img = font::render_text("42", 2, 0, 255, 2);
  CHECK(engine.recognize(img, kAlt).raw_text == "42");
  CHECK(engine.recognize(img, kAlt).raw_text == "42");
  CHECK(error_code_of([&] { engine.recognize(img, kAlt); }) == ErrorCode::EngineCrashed);
  CHECK(engine.recognize(img, kAlt).raw_text == "42");
}
