#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fgscan {

using Index = Eigen::Index;

enum class Status : std::uint8_t { censored = 0, cause1 = 1, cause2 = 2 };

/// One observed record (X_i, delta_i * eps_i, z_i).
struct Subject {
  double time = 0.0;
  Status status = Status::censored;
  std::vector<double> covariates;

  friend bool operator==(const Subject&, const Subject&) = default;
};

struct StatusCounts {
  Index censored = 0;
  Index cause1 = 0;
  Index cause2 = 0;
};

struct CanonicalizeOptions {
  /// Reject samples without a cause-1 event (fitting is undefined for them).
  bool require_primary_event = true;
};

/// Validated competing-risks sample in canonical order: strictly descending by the
/// key (time desc, status priority cause1 < cause2 < censored, input index).
///
/// Immutable once built; every scan relies on this ordering.
class Dataset {
 public:
  Index size() const { return static_cast<Index>(times_.size()); }
  Index dim() const { return covariates_.cols(); }

  std::span<const double> times() const { return times_; }
  std::span<const Status> status() const { return status_; }
  double time(Index pos) const { return times_[static_cast<std::size_t>(pos)]; }
  Status status(Index pos) const { return status_[static_cast<std::size_t>(pos)]; }

  /// n x p, column-major, rows in canonical order.
  const Eigen::MatrixXd& covariates() const { return covariates_; }

  /// Input row of each canonical position (the tie-break key).
  std::span<const Index> input_index() const { return input_index_; }

  /// Last canonical position sharing this position's time. Positions
  /// [0, tie_group_end(pos)] are exactly the subjects with time >= time(pos).
  std::span<const Index> tie_group_end() const { return group_end_; }

  const std::vector<std::string>& covariate_names() const { return names_; }
  const StatusCounts& counts() const { return counts_; }

  Subject subject(Index pos) const;
  /// Subjects in canonical order.
  std::vector<Subject> subjects() const;
  /// Subjects in the order they were supplied to canonicalize().
  std::vector<Subject> subjects_in_input_order() const;

 private:
  friend Dataset canonicalize(std::vector<Subject>, const CanonicalizeOptions&,
                              std::vector<std::string>);

  std::vector<double> times_;
  std::vector<Status> status_;
  Eigen::MatrixXd covariates_;
  std::vector<Index> input_index_;
  std::vector<Index> group_end_;
  std::vector<std::string> names_;
  StatusCounts counts_;
};

/// Throws Error(data) naming `row` (1-based data row) when a Subject invariant fails.
void validate_subject(const Subject& s, Index row);

/// Sorts and validates. `names` defaults to z1..zp.
Dataset canonicalize(std::vector<Subject> raw, const CanonicalizeOptions& opts = {},
                     std::vector<std::string> names = {});

/// Reads `ftime,fstatus,z1,...,zp`. Requires at least two data rows.
Dataset load_csv(const std::filesystem::path& path, const CanonicalizeOptions& opts = {});
Dataset parse_csv(std::istream& in, std::string_view source = "<stream>",
                  const CanonicalizeOptions& opts = {});

enum class RowOrder { input, canonical };

/// Shortest round-trip decimal formatting, so write/load is bit-exact.
void write_csv(const Dataset& ds, std::ostream& out, RowOrder order = RowOrder::input);
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               RowOrder order = RowOrder::input);

std::string format_double(double x);

}  // namespace fgscan
