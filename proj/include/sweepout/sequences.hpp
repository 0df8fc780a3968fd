#pragma once

// Integer sequences with prescribed ratio growth: generators and exact
// verification of growth bounds.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sweepout/enclosure.hpp"
#include "sweepout/errors.hpp"
#include "sweepout/rational.hpp"
#include "sweepout/weights.hpp"

namespace sweepout {

/// Strictly increasing positive integers a_n, addressed by absolute index
/// n in [start_index, start_index + size - 1].
class IntegerSequence {
 public:
  IntegerSequence() = default;
  IntegerSequence(std::uint64_t start_index, std::vector<Integer> terms)
      : start_index_(start_index), terms_(std::move(terms)) {
    if (start_index_ < 1) throw sequence_error("start index must be at least 1");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (terms_[i] < 1) {
        throw sequence_error("term " + std::to_string(start_index_ + i) + " is not positive");
      }
      if (i > 0 && terms_[i] <= terms_[i - 1]) {
        throw sequence_error("sequence is not strictly increasing at index " + std::to_string(start_index_ + i));
      }
    }
  }

  std::uint64_t start_index() const noexcept { return start_index_; }
  std::uint64_t last_index() const noexcept { return start_index_ + terms_.size() - 1; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  bool has_index(std::uint64_t n) const noexcept {
    return !terms_.empty() && n >= start_index_ && n <= last_index();
  }

  const Integer& term(std::uint64_t n) const {
    if (!has_index(n)) throw invalid_argument("sequence index " + std::to_string(n) + " out of range");
    return terms_[n - start_index_];
  }
  const std::vector<Integer>& terms() const noexcept { return terms_; }

  friend bool operator==(const IntegerSequence&, const IntegerSequence&) = default;

 private:
  std::uint64_t start_index_ = 1;
  std::vector<Integer> terms_;
};

enum class GrowthKind { log_log_deterministic, log_log_weighted, fixed_ratio, lacunary };

/// Ratio lower bound that a_{n+1}/a_n must exceed (strictly):
///  - fixed_ratio:            rho
///  - lacunary:               1 + eta
///  - log_log_deterministic:  1 + 1/(log log n)^(1-eta)
///  - log_log_weighted:       1 + 1/(log log G(n))^(1-eta),  G(n) = w(1)+...+w(n)
struct GrowthSpec {
  GrowthKind kind = GrowthKind::fixed_ratio;
  Rational eta{0};
  Rational rho{0};
  std::optional<WeightSequence> weights;

  static GrowthSpec fixed_ratio(const Rational& rho) {
    if (rho <= 1) throw invalid_argument("fixed ratio bound needs rho > 1");
    return {GrowthKind::fixed_ratio, 0, rho, std::nullopt};
  }
  static GrowthSpec lacunary(const Rational& eta) {
    if (eta <= 0) throw invalid_argument("lacunary bound needs eta > 0");
    return {GrowthKind::lacunary, eta, 0, std::nullopt};
  }
  static GrowthSpec log_log(const Rational& eta) {
    if (eta <= 0) throw invalid_argument("log log bound needs eta > 0");
    return {GrowthKind::log_log_deterministic, eta, 0, std::nullopt};
  }
  static GrowthSpec log_log_weighted(const Rational& eta, WeightSequence w) {
    if (eta <= 0) throw invalid_argument("log log bound needs eta > 0");
    return {GrowthKind::log_log_weighted, eta, 0, std::move(w)};
  }
};

struct GrowthOptions {
  /// When set, an index where log log of the bound's argument is not positive
  /// raises undefined_bound instead of being skipped.
  bool strict_domain = false;
  PrecisionPolicy precision{};
};

struct GrowthReport {
  bool holds = true;
  /// Least index n whose ratio a_{n+1}/a_n fails the bound.
  std::optional<std::uint64_t> first_violation;
  std::uint64_t checked = 0;
  std::uint64_t skipped = 0;
};

namespace detail {

// Is log log x > 0, i.e. x > e?
inline bool log_log_positive(const Rational& x, const PrecisionPolicy& policy) {
  if (x <= 1) return false;
  return refine(
      [&](mpfr_prec_t bits) -> std::optional<bool> {
        Interval l = log(Interval::of(x, bits));
        auto s = sign_of(log(l));
        if (!s) return std::nullopt;
        return *s > 0;
      },
      policy, "log log sign of " + to_fraction_string(x));
}

// Decides ratio > 1 + 1/(log log x)^(1-eta), assuming log log x > 0.
inline bool exceeds_log_log_bound(const Rational& ratio, const Rational& x, const Rational& eta,
                                  const PrecisionPolicy& policy) {
  return refine(
      [&](mpfr_prec_t bits) -> std::optional<bool> {
        Interval one = Interval::of(1L, bits);
        Interval bound = one + one / pow(log_log(Interval::of(x, bits)), Interval::of(Rational(1 - eta), bits));
        auto c = compare(ratio, bound);
        if (!c) return std::nullopt;
        return *c > 0;
      },
      policy, "log log growth bound comparison");
}

}  // namespace detail

/// a_n = floor(exp(n / (log log n)^(1-eta))) for n = n0, ..., n0 + count - 1.
/// Each floor is decided by enclosure refinement, never by rounding.
inline IntegerSequence generate_paper_example(const Rational& eta, std::uint64_t n0, std::uint64_t count,
                                              const PrecisionPolicy& policy = {}) {
  if (n0 < 3) throw index_too_small("n0 must be at least 3 so that log log n0 > 0");
  if (count < 1) throw invalid_argument("count must be at least 1");
  if (eta <= 0) throw invalid_argument("eta must be positive");
  const Rational exponent = 1 - eta;
  std::vector<Integer> terms;
  terms.reserve(count);
  for (std::uint64_t n = n0; n < n0 + count; ++n) {
    const Integer idx(static_cast<unsigned long>(n));
    terms.push_back(refine(
        [&](mpfr_prec_t bits) {
          Interval arg = Interval::of(idx, bits) / pow(log_log(idx, bits), Interval::of(exponent, bits));
          return floor_if_decided(exp(arg));
        },
        policy, "floor of exp(n/(log log n)^(1-eta)) at n=" + std::to_string(n)));
  }
  return IntegerSequence(n0, std::move(terms));
}

/// a_1 = a_start, a_{n+1} = floor(rho * a_n) + 1, so a_{n+1}/a_n > rho.
inline IntegerSequence generate_ratio_sequence(const Rational& rho, const Integer& a_start, std::uint64_t count) {
  if (rho <= 1) throw invalid_argument("rho must exceed 1");
  if (a_start < 1) throw invalid_argument("a_start must be at least 1");
  if (count < 1) throw invalid_argument("count must be at least 1");
  std::vector<Integer> terms;
  terms.reserve(count);
  terms.push_back(a_start);
  while (terms.size() < count) terms.push_back(floor_of(rho * terms.back()) + 1);
  return IntegerSequence(1, std::move(terms));
}

/// Checks every consecutive ratio against the bound, strictly.
inline GrowthReport verify_growth(const IntegerSequence& seq, const GrowthSpec& spec,
                                  const GrowthOptions& options = {}) {
  if (seq.empty()) throw invalid_argument("cannot verify growth of an empty sequence");
  GrowthReport report;
  std::vector<Rational> g;
  if (spec.kind == GrowthKind::log_log_weighted) {
    if (!spec.weights) throw invalid_argument("weighted growth spec without weights");
    g = prefix_sums(*spec.weights, seq.last_index());
  }

  for (std::uint64_t n = seq.start_index(); n < seq.last_index(); ++n) {
    const Rational ratio = make_rational(seq.term(n + 1), seq.term(n));
    bool ok = true;
    switch (spec.kind) {
      case GrowthKind::fixed_ratio:
        ok = ratio > spec.rho;
        break;
      case GrowthKind::lacunary:
        ok = ratio > 1 + spec.eta;
        break;
      case GrowthKind::log_log_deterministic:
      case GrowthKind::log_log_weighted: {
        const Rational arg =
            spec.kind == GrowthKind::log_log_deterministic ? Rational(Integer(static_cast<unsigned long>(n))) : g[n];
        if (!detail::log_log_positive(arg, options.precision)) {
          if (options.strict_domain) {
            throw undefined_bound("log log bound undefined at index " + std::to_string(n),
                                  static_cast<long long>(n));
          }
          ++report.skipped;
          continue;
        }
        ok = detail::exceeds_log_log_bound(ratio, arg, spec.eta, options.precision);
        break;
      }
    }
    ++report.checked;
    if (!ok) {
      report.holds = false;
      report.first_violation = n;
      return report;
    }
  }
  return report;
}

/// A(t) = #{n : a_n <= t}.
inline std::uint64_t counting_function(const IntegerSequence& seq, const Integer& t) {
  const auto& terms = seq.terms();
  return static_cast<std::uint64_t>(std::upper_bound(terms.begin(), terms.end(), t) - terms.begin());
}

}  // namespace sweepout
