#include "fgscan/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fgscan/error.hpp"

namespace fgscan {

namespace {

int tie_priority(Status s) {
  switch (s) {
    case Status::cause1: return 0;
    case Status::cause2: return 1;
    case Status::censored: return 2;
  }
  return 3;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string location(std::string_view source, Index row, std::string_view column) {
  std::ostringstream os;
  os << source << ": row " << row << ", column '" << column << "'";
  return os.str();
}

double parse_number(std::string_view cell, std::string_view source, Index row,
                    std::string_view column) {
  double value = 0.0;
  // from_chars rejects a leading '+'; accept it for friendliness.
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    fail(ErrorKind::data, "non-numeric cell '" + std::string(cell) + "' at " +
                              location(source, row, column));
  }
  return value;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

Subject Dataset::subject(Index pos) const {
  Subject s;
  s.time = time(pos);
  s.status = status(pos);
  s.covariates.resize(static_cast<std::size_t>(dim()));
  for (Index j = 0; j < dim(); ++j) s.covariates[static_cast<std::size_t>(j)] = covariates_(pos, j);
  return s;
}

std::vector<Subject> Dataset::subjects() const {
  std::vector<Subject> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (Index pos = 0; pos < size(); ++pos) out.push_back(subject(pos));
  return out;
}

std::vector<Subject> Dataset::subjects_in_input_order() const {
  std::vector<Subject> out(static_cast<std::size_t>(size()));
  for (Index pos = 0; pos < size(); ++pos) {
    out[static_cast<std::size_t>(input_index_[static_cast<std::size_t>(pos)])] = subject(pos);
  }
  return out;
}

void validate_subject(const Subject& s, Index row) {
  if (!std::isfinite(s.time)) {
    fail(ErrorKind::data, "non-finite time at row " + std::to_string(row));
  }
  if (s.time <= 0.0) fail(ErrorKind::data, "non-positive time at row " + std::to_string(row));
  const auto code = static_cast<int>(s.status);
  if (code < 0 || code > 2) {
    fail(ErrorKind::data, "status outside {0,1,2} at row " + std::to_string(row));
  }
  for (std::size_t j = 0; j < s.covariates.size(); ++j) {
    if (!std::isfinite(s.covariates[j])) {
      fail(ErrorKind::data, "non-finite covariate z" + std::to_string(j + 1) + " at row " +
                                std::to_string(row));
    }
  }
}

Dataset canonicalize(std::vector<Subject> raw, const CanonicalizeOptions& opts,
                     std::vector<std::string> names) {
  if (raw.empty()) fail(ErrorKind::data, "empty dataset");
  const std::size_t p = raw.front().covariates.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].covariates.size() != p) {
      fail(ErrorKind::data, "inconsistent covariate count at row " + std::to_string(i + 1));
    }
    validate_subject(raw[i], static_cast<Index>(i + 1));
  }
  if (names.empty()) {
    for (std::size_t j = 0; j < p; ++j) names.push_back("z" + std::to_string(j + 1));
  } else if (names.size() != p) {
    fail(ErrorKind::data, "covariate name count does not match the covariate dimension");
  }

  std::vector<Index> order(raw.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Subject& sa = raw[static_cast<std::size_t>(a)];
    const Subject& sb = raw[static_cast<std::size_t>(b)];
    if (sa.time != sb.time) return sa.time > sb.time;
    return tie_priority(sa.status) < tie_priority(sb.status);
  });

  Dataset ds;
  const auto n = static_cast<Index>(raw.size());
  ds.times_.resize(raw.size());
  ds.status_.resize(raw.size());
  ds.covariates_.resize(n, static_cast<Index>(p));
  ds.input_index_ = order;
  ds.names_ = std::move(names);
  for (Index pos = 0; pos < n; ++pos) {
    const Subject& s = raw[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];
    ds.times_[static_cast<std::size_t>(pos)] = s.time;
    ds.status_[static_cast<std::size_t>(pos)] = s.status;
    for (std::size_t j = 0; j < p; ++j) ds.covariates_(pos, static_cast<Index>(j)) = s.covariates[j];
    switch (s.status) {
      case Status::censored: ++ds.counts_.censored; break;
      case Status::cause1: ++ds.counts_.cause1; break;
      case Status::cause2: ++ds.counts_.cause2; break;
    }
  }

  ds.group_end_.resize(raw.size());
  for (Index pos = n - 1; pos >= 0; --pos) {
    const auto u = static_cast<std::size_t>(pos);
    ds.group_end_[u] = (pos + 1 < n && ds.times_[u + 1] == ds.times_[u]) ? ds.group_end_[u + 1] : pos;
  }

  if (opts.require_primary_event && ds.counts_.cause1 == 0) {
    fail(ErrorKind::model, "no primary events (status = 1) in data");
  }
  return ds;
}

Dataset parse_csv(std::istream& in, std::string_view source, const CanonicalizeOptions& opts) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::data, std::string(source) + ": missing header row");
  const auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "ftime" || header[1] != "fstatus") {
    fail(ErrorKind::data, std::string(source) + ": malformed header, expected ftime,fstatus,z1,...,zp");
  }
  std::vector<std::string> names;
  for (std::size_t j = 2; j < header.size(); ++j) {
    const std::string expected = "z" + std::to_string(j - 1);
    if (header[j] != expected) {
      fail(ErrorKind::data, std::string(source) + ": malformed header, column " +
                                std::to_string(j + 1) + " should be '" + expected + "'");
    }
    names.push_back(expected);
  }

  std::vector<Subject> raw;
  Index row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_fields(line);
    if (cells.size() != header.size()) {
      fail(ErrorKind::data, std::string(source) + ": row " + std::to_string(row) + " has " +
                                std::to_string(cells.size()) + " columns, header has " +
                                std::to_string(header.size()));
    }
    Subject s;
    s.time = parse_number(cells[0], source, row, "ftime");
    if (!(s.time > 0.0) || !std::isfinite(s.time)) {
      fail(ErrorKind::data, "non-positive time at row " + std::to_string(row) + " (" +
                                location(source, row, "ftime") + ")");
    }
    const double code = parse_number(cells[1], source, row, "fstatus");
    if (code != 0.0 && code != 1.0 && code != 2.0) {
      fail(ErrorKind::data, "status outside {0,1,2} at " + location(source, row, "fstatus"));
    }
    s.status = static_cast<Status>(static_cast<int>(code));
    s.covariates.reserve(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      s.covariates.push_back(parse_number(cells[j + 2], source, row, names[j]));
    }
    validate_subject(s, row);
    raw.push_back(std::move(s));
  }
  if (raw.size() < 2) {
    fail(ErrorKind::data, std::string(source) + ": at least two data rows are required");
  }
  return canonicalize(std::move(raw), opts, std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const CanonicalizeOptions& opts) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open data file '" + path.string() + "'");
  return parse_csv(in, path.string(), opts);
}

void write_csv(const Dataset& ds, std::ostream& out, RowOrder order) {
  out << "ftime,fstatus";
  for (const auto& name : ds.covariate_names()) out << ',' << name;
  out << '\n';
  std::vector<Index> positions(static_cast<std::size_t>(ds.size()));
  if (order == RowOrder::canonical) {
    std::iota(positions.begin(), positions.end(), Index{0});
  } else {
    for (Index pos = 0; pos < ds.size(); ++pos) {
      positions[static_cast<std::size_t>(ds.input_index()[static_cast<std::size_t>(pos)])] = pos;
    }
  }
  std::string buffer;
  for (const Index pos : positions) {
    buffer.clear();
    buffer += format_double(ds.time(pos));
    buffer += ',';
    buffer += std::to_string(static_cast<int>(ds.status(pos)));
    for (Index j = 0; j < ds.dim(); ++j) {
      buffer += ',';
      buffer += format_double(ds.covariates()(pos, j));
    }
    buffer += '\n';
    out << buffer;
  }
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, RowOrder order) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  write_csv(ds, out, order);
  if (!out) fail(ErrorKind::io, "write failed for '" + path.string() + "'");
}

}  // namespace fgscan
