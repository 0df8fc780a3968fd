#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sweepout {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed something outside an operation's domain.
class invalid_argument : public error {
 public:
  using error::error;
};

class index_too_small : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

class dimension_mismatch : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

class sequence_error : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

/// An interval enclosure could not separate a value from the decision
/// boundary before the precision cap was reached.
class precision_exhausted : public error {
 public:
  using error::error;
};

/// A log log bound was requested where it is not defined and strict domain
/// checking is on.
class undefined_bound : public error {
 public:
  undefined_bound(const std::string& what, long long index) : error(what), index_(index) {}
  long long index() const noexcept { return index_; }

 private:
  long long index_;
};

/// Consecutive constraint multipliers do not grow by more than 2Q.
/// `position` is the zero-based position j of the offending pair (a_j, a_{j+1});
/// `coordinate` is set when the error came out of a grid solve.
class ratio_too_small : public error {
 public:
  ratio_too_small(const std::string& what, std::size_t position, std::size_t coordinate = 0)
      : error(what), position_(position), coordinate_(coordinate) {}
  std::size_t position() const noexcept { return position_; }
  std::size_t coordinate() const noexcept { return coordinate_; }

 private:
  std::size_t position_;
  std::size_t coordinate_;
};

/// Raised only if the nested-interval solver loses every candidate cell.
/// Under the ratio hypothesis this is an internal bug.
class infeasible : public error {
 public:
  infeasible(const std::string& what, std::size_t position) : error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class infeasible_parameters : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

class not_enough_indices : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

class empty_block : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

class threshold_out_of_range : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

class grid_coverage_error : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

/// Malformed input file or string.
class parse_error : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

}  // namespace sweepout
