#pragma once

// Exact arithmetic on the circle R/Z and the K-torus.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sweepout/errors.hpp"
#include "sweepout/rational.hpp"

namespace sweepout {

inline Rational mod_one(Rational x) {
  x.canonicalize();
  return x - floor_of(x);
}

/// A point of R/Z stored as its representative in [0, 1).
class UnitRational {
 public:
  UnitRational() = default;
  explicit UnitRational(const Rational& x) : value_(mod_one(x)) {}
  UnitRational(long num, unsigned long den) : UnitRational(make_rational(num, den)) {}

  const Rational& value() const noexcept { return value_; }

  friend bool operator==(const UnitRational& a, const UnitRational& b) { return a.value_ == b.value_; }

 private:
  Rational value_{0};
};

/// Open interval (lo, hi) with 0 <= lo < hi <= 1.
class ModOneInterval {
 public:
  ModOneInterval(const Rational& lo, const Rational& hi) : lo_(lo), hi_(hi) {
    if (!(0 <= lo_ && lo_ < hi_ && hi_ <= 1)) {
      throw invalid_argument("interval (" + to_fraction_string(lo_) + ", " + to_fraction_string(hi_) +
                             ") is not inside [0, 1] with lo < hi");
    }
  }

  /// Zero-indexed bin (p/Q, (p+1)/Q).
  static ModOneInterval bin(std::uint64_t p, std::uint64_t q_bins) {
    if (q_bins < 1 || p >= q_bins) throw invalid_argument("bin index out of range");
    return {make_rational(p, q_bins), make_rational(p + 1, q_bins)};
  }

  const Rational& lo() const noexcept { return lo_; }
  const Rational& hi() const noexcept { return hi_; }
  Rational length() const { return hi_ - lo_; }

 private:
  Rational lo_;
  Rational hi_;
};

inline bool interval_contains(const ModOneInterval& interval, const UnitRational& v) {
  return interval.lo() < v.value() && v.value() < interval.hi();
}

/// Index p with p/Q < v < (p+1)/Q, or std::nullopt when v*Q is an integer
/// (v sits on a bin boundary).
inline std::optional<std::uint64_t> bin_of(const UnitRational& v, std::uint64_t q_bins) {
  if (q_bins < 2) throw invalid_argument("bin count Q must be at least 2");
  const Rational scaled = v.value() * Integer(static_cast<unsigned long>(q_bins));
  if (is_integer(scaled)) return std::nullopt;
  return floor_of(scaled).get_ui();
}

/// Point of the K-torus; also used for rotation vectors (r_1, ..., r_K).
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<UnitRational> coords) : coords_(std::move(coords)) {}

  std::size_t dimension() const noexcept { return coords_.size(); }
  const UnitRational& operator[](std::size_t k) const { return coords_.at(k); }
  const std::vector<UnitRational>& coords() const noexcept { return coords_; }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  std::vector<UnitRational> coords_;
};

using RotationVector = TorusPoint;

/// T^a x: coordinate k becomes x_k + r_k * a (mod 1).
inline TorusPoint rotate(const TorusPoint& x, const RotationVector& r, const Integer& a) {
  if (x.dimension() != r.dimension()) {
    throw dimension_mismatch("point has dimension " + std::to_string(x.dimension()) + ", rotation has " +
                             std::to_string(r.dimension()));
  }
  std::vector<UnitRational> out;
  out.reserve(x.dimension());
  for (std::size_t k = 0; k < x.dimension(); ++k) out.emplace_back(x[k].value() + r[k].value() * a);
  return TorusPoint(std::move(out));
}

}  // namespace sweepout
