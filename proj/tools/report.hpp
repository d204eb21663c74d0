#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fgscan/dataset.hpp"
#include "json.hpp"

namespace fgscan::cli {

using Json = nlohmann::ordered_json;

/// Self-describing run record: command echo, input digest, result, timings,
/// tool version and seeds.
class RunReport {
 public:
  RunReport(std::string command, std::vector<std::string> argv);

  void set_input(const Dataset& ds, const std::string& source);
  void set_seed(const std::string& name, std::uint64_t value);
  Json& result() { return body_["result"]; }
  void add_warning(const std::string& message);

  /// Times `fn` under `phase` in the timings block.
  template <class Fn>
  auto timed(const std::string& phase, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(phase, start);
    } else {
      auto value = fn();
      record(phase, start);
      return value;
    }
  }

  const Json& json() const { return body_; }
  /// Pretty JSON to `path`, or to stdout when empty.
  void write(const std::optional<std::filesystem::path>& path) const;

 private:
  void record(const std::string& phase, std::chrono::steady_clock::time_point start);
  Json body_;
};

Json error_body(const std::string& command, const std::string& kind, const std::string& message);

/// Comma/whitespace separated numbers; "@path" reads them from a file.
std::vector<double> parse_vector(const std::string& text, const std::string& flag);

std::string version_string();

/// Writes `text` to `path`, throwing Error(io) on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fgscan::cli
