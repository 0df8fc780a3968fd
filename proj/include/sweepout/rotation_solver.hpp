#pragma once

// Nested-interval construction of a rotation number r such that r*a_j mod 1
// falls in a prescribed open bin for every constraint (a_j, p_j), valid
// whenever a_{j+1} > 2Q a_j.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sweepout/errors.hpp"
#include "sweepout/rational.hpp"
#include "sweepout/torus.hpp"

namespace sweepout {

struct BinConstraint {
  Integer a;
  std::uint64_t target = 0;

  friend bool operator==(const BinConstraint&, const BinConstraint&) = default;
};

/// Closed interval [lo, hi]; every r in its interior meets all constraints
/// processed so far.
struct FeasibleInterval {
  Rational lo;
  Rational hi;
};

struct SolverStep {
  std::size_t position = 0;
  Integer a;
  std::uint64_t target = 0;
  Integer m;  // chosen period cell ((m + p/Q)/a, (m + (p+1)/Q)/a)
  Rational cell_lo;
  Rational cell_hi;
};

struct RotationSolution {
  UnitRational r;
  /// intervals[0] = [0, 1]; intervals[j+1] is the state after constraint j.
  std::vector<FeasibleInterval> intervals;
  std::vector<SolverStep> steps;
};

inline void validate_constraints(const std::vector<BinConstraint>& constraints, std::uint64_t q_bins) {
  if (q_bins < 2) throw invalid_argument("bin count Q must be at least 2");
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    if (constraints[j].a < 1) throw invalid_argument("constraint " + std::to_string(j) + " has a < 1");
    if (constraints[j].target >= q_bins) {
      throw invalid_argument("constraint " + std::to_string(j) + " targets bin " +
                             std::to_string(constraints[j].target) + " >= Q");
    }
  }
}

/// Throws ratio_too_small(j) for the first j with a_{j+1} <= 2Q a_j.
inline void check_ratio_hypothesis(const std::vector<BinConstraint>& constraints, std::uint64_t q_bins) {
  const Integer two_q(static_cast<unsigned long>(2 * q_bins));
  for (std::size_t j = 0; j + 1 < constraints.size(); ++j) {
    if (constraints[j + 1].a <= two_q * constraints[j].a) {
      throw ratio_too_small("a_{j+1}/a_j = " + constraints[j + 1].a.get_str() + "/" + constraints[j].a.get_str() +
                                " is not > 2Q = " + two_q.get_str() + " at position " + std::to_string(j),
                            j);
    }
  }
}

inline bool verify_rotation(const UnitRational& r, const std::vector<BinConstraint>& constraints,
                            std::uint64_t q_bins) {
  for (const auto& c : constraints) {
    const auto bin = bin_of(UnitRational(r.value() * c.a), q_bins);
    if (!bin || *bin != c.target) return false;
  }
  return true;
}

/// Full solve with the per-step feasible intervals and chosen cells.
///
/// Each step picks, among the period cells of the next constraint lying
/// inside the current closed interval S, the one whose center is nearest the
/// center of S (ties to the smaller m), and S becomes that closed cell. The
/// answer is the midpoint of the final S, which lies in the interior of every
/// nested cell and therefore inside every open target bin.
inline RotationSolution solve_rotation_traced(const std::vector<BinConstraint>& constraints, std::uint64_t q_bins) {
  validate_constraints(constraints, q_bins);
  check_ratio_hypothesis(constraints, q_bins);

  const Integer q_int(static_cast<unsigned long>(q_bins));
  RotationSolution sol;
  FeasibleInterval s{Rational(0), Rational(1)};
  sol.intervals.push_back(s);

  for (std::size_t j = 0; j < constraints.size(); ++j) {
    const auto& [a, p] = constraints[j];
    const Rational p_lo = make_rational(Integer(static_cast<unsigned long>(p)), q_int);
    const Rational p_hi = make_rational(Integer(static_cast<unsigned long>(p + 1)), q_int);

    // Cell m is ((m + p_lo)/a, (m + p_hi)/a); it fits in S iff m_min <= m <= m_max.
    const Integer m_min = ceil_of(s.lo * a - p_lo);
    const Integer m_max = floor_of(s.hi * a - p_hi);
    if (m_min > m_max) {
      throw infeasible("no full cell of constraint " + std::to_string(j) + " fits in [" + to_fraction_string(s.lo) +
                           ", " + to_fraction_string(s.hi) + "]",
                       j);
    }

    const Rational ideal = (s.lo + s.hi) / 2 * a - (p_lo + p_hi) / 2;
    auto clamp = [&](const Integer& m) { return m < m_min ? m_min : (m > m_max ? m_max : m); };
    const Integer below = clamp(floor_of(ideal));
    const Integer above = clamp(floor_of(ideal) + 1);
    const Rational d_below = abs(Rational(below) - ideal);
    const Rational d_above = abs(Rational(above) - ideal);
    const Integer m = (d_above < d_below) ? above : below;

    s = FeasibleInterval{(m + p_lo) / a, (m + p_hi) / a};
    sol.intervals.push_back(s);
    sol.steps.push_back(SolverStep{j, a, p, m, s.lo, s.hi});
  }

  sol.r = UnitRational((s.lo + s.hi) / 2);
  if (!verify_rotation(sol.r, constraints, q_bins)) {
    throw std::logic_error("rotation solver produced r = " + to_fraction_string(sol.r.value()) +
                           " that fails exact verification");
  }
  return sol;
}

inline UnitRational solve_rotation(const std::vector<BinConstraint>& constraints, std::uint64_t q_bins) {
  return solve_rotation_traced(constraints, q_bins).r;
}

/// One line per constraint: position, a, target, chosen m, cell endpoints.
inline std::string format_trace(const RotationSolution& sol) {
  std::ostringstream out;
  for (const auto& st : sol.steps) {
    out << "j=" << st.position << " a=" << st.a.get_str() << " target=" << st.target << " m=" << st.m.get_str()
        << " cell=(" << to_fraction_string(st.cell_lo) << ", " << to_fraction_string(st.cell_hi) << ")\n";
  }
  out << "r=" << to_fraction_string(sol.r.value()) << "\n";
  return out.str();
}

}  // namespace sweepout
