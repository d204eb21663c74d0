#include "report.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fgscan/error.hpp"

namespace fgscan::cli {

RunReport::RunReport(std::string command, std::vector<std::string> argv) {
  body_["command"] = std::move(command);
  body_["echo"] = std::move(argv);
  body_["version"] = FGSCAN_VERSION;
  body_["notes_hash"] = FGSCAN_NOTES_HASH;
  body_["input"] = nullptr;
  body_["seeds"] = Json::object();
  body_["result"] = Json::object();
  body_["warnings"] = Json::array();
  body_["timings"] = Json::object();
}

void RunReport::set_input(const Dataset& ds, const std::string& source) {
  const auto& c = ds.counts();
  body_["input"] = {{"source", source},
                    {"rows", ds.size()},
                    {"p", ds.dim()},
                    {"status_counts", {{"censored", c.censored}, {"cause1", c.cause1}, {"cause2", c.cause2}}}};
}

void RunReport::set_seed(const std::string& name, std::uint64_t value) { body_["seeds"][name] = value; }

void RunReport::add_warning(const std::string& message) { body_["warnings"].push_back(message); }

void RunReport::record(const std::string& phase, std::chrono::steady_clock::time_point start) {
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  body_["timings"][phase] = elapsed.count();
}

void RunReport::write(const std::optional<std::filesystem::path>& path) const {
  const std::string text = body_.dump(2) + "\n";
  if (path) {
    write_text(*path, text);
  } else {
    std::cout << text;
  }
}

Json error_body(const std::string& command, const std::string& kind, const std::string& message) {
  Json j;
  j["command"] = command;
  j["version"] = FGSCAN_VERSION;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j;
}

std::vector<double> parse_vector(const std::string& text, const std::string& flag) {
  std::string source = text;
  if (!text.empty() && text.front() == '@') {
    std::ifstream in(text.substr(1));
    if (!in) fail(ErrorKind::io, "cannot read " + flag + " file '" + text.substr(1) + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    source = ss.str();
  }
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    double v = 0.0;
    const char* first = token.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
      fail(ErrorKind::usage, flag + ": '" + token + "' is not a finite number");
    }
    out.push_back(v);
    token.clear();
  };
  for (const char ch : source) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      token.push_back(ch);
    }
  }
  flush();
  if (out.empty()) fail(ErrorKind::usage, flag + " needs at least one value");
  return out;
}

std::string version_string() {
  return std::string("fgscan ") + FGSCAN_VERSION + " (algorithm notes " + FGSCAN_NOTES_HASH + ")";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::io, "write failed for '" + path.string() + "'");
}

}  // namespace fgscan::cli
