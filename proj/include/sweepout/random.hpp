#pragma once

// Random sequences with P(n in A) = sigma_n, the threshold grid
// v_m = exp(m (log log m)^(-1 + eta/2)), and the thinning A -> B that keeps
// at most one element per grid interval and never two adjacent intervals.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sweepout/enclosure.hpp"
#include "sweepout/errors.hpp"
#include "sweepout/parallel.hpp"
#include "sweepout/rational.hpp"

namespace sweepout {

/// sigma_n = min(1, max(0, (log log log n)^(1-eta) / n)) for n >= n_start,
/// 0 below. log log log n > 0 exactly when n >= 16 (e^e ~ 15.154).
/// The constant kind (sigma_n = p for n >= n_start) exists for degenerate
/// test profiles.
struct ProbabilityProfile {
  enum class Kind { log_log_log, constant };

  Kind kind = Kind::log_log_log;
  Rational eta{1, 2};
  std::uint64_t n_start = 16;
  Rational constant_p{0};

  static ProbabilityProfile log_log_log(const Rational& eta, std::uint64_t n_start = 16) {
    if (eta <= 0) throw invalid_argument("eta must be positive");
    return {Kind::log_log_log, eta, n_start, 0};
  }
  static ProbabilityProfile constant(const Rational& p, std::uint64_t n_start) {
    if (p < 0 || p > 1) throw invalid_argument("constant probability must lie in [0, 1]");
    return {Kind::constant, 0, n_start, p};
  }

  friend bool operator==(const ProbabilityProfile&, const ProbabilityProfile&) = default;
};

/// Enclosure of sigma_n at the given precision.
inline Interval sigma_enclosure(const ProbabilityProfile& profile, std::uint64_t n, mpfr_prec_t bits) {
  if (n < profile.n_start) return Interval::of(0L, bits);
  if (profile.kind == ProbabilityProfile::Kind::constant) return Interval::of(profile.constant_p, bits);
  if (n < 16) return Interval::of(0L, bits);
  const Integer ni(static_cast<unsigned long>(n));
  Interval l3 = log_log_log(ni, bits);
  if (mpfr_sgn(l3.hi().get()) <= 0) return Interval::of(0L, bits);
  Interval v = pow(l3, Interval::of(Rational(1 - profile.eta), bits)) / Interval::of(ni, bits);
  // min(1, max(0, .)) is monotone, so clamping the endpoints clamps the enclosure.
  for (BigFloat* end : {&v.lo(), &v.hi()}) {
    if (mpfr_sgn(end->get()) < 0) mpfr_set_zero(end->get(), 1);
    if (mpfr_cmp_ui(end->get(), 1) > 0) mpfr_set_ui(end->get(), 1, MPFR_RNDN);
  }
  return v;
}

namespace detail {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based uniform 64-bit value for index n: a pure function of
/// (seed, n) built from the SplitMix64 finalizer.
inline std::uint64_t index_uniform(std::uint64_t seed, std::uint64_t n) {
  constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  return detail::splitmix64_mix(detail::splitmix64_mix(seed + golden) ^ (n * golden + golden));
}

struct RandomDraw {
  std::uint64_t seed = 0;
  ProbabilityProfile profile;
  std::uint64_t t_max = 0;
  std::vector<std::uint64_t> selected;

  friend bool operator==(const RandomDraw&, const RandomDraw&) = default;
};

namespace detail {

// floor(e^(e^e)) = 3814279: below it log log log n < 1, so with eta <= 1 the
// log-log-log profile has sigma_n <= 1/n, which rejects most indices without
// evaluating any logarithm.
inline std::uint64_t triple_exp_floor(const PrecisionPolicy& policy) {
  static const std::uint64_t value = refine(
                                         [](mpfr_prec_t bits) {
                                           Interval one = Interval::of(1L, bits);
                                           return floor_if_decided(exp(exp(exp(one))));
                                         },
                                         policy, "floor(e^(e^e))")
                                         .get_ui();
  return value;
}

inline bool include_index(const ProbabilityProfile& profile, std::uint64_t seed, std::uint64_t n, bool cheap_bound,
                          std::uint64_t cheap_limit, const PrecisionPolicy& policy) {
  if (n < profile.n_start) return false;
  const std::uint64_t u = index_uniform(seed, n);
  if (cheap_bound && n >= 16 && n <= cheap_limit) {
    // u / 2^64 >= 1/n >= sigma_n  =>  excluded.
    const unsigned __int128 prod = static_cast<unsigned __int128>(u) * n;
    if ((prod >> 64) != 0) return false;
  }
  const Rational uniform = make_rational(Integer(static_cast<unsigned long>(u)), Integer(1) << 64);
  return refine(
      [&](mpfr_prec_t bits) -> std::optional<bool> {
        auto c = compare(uniform, sigma_enclosure(profile, n, bits));
        if (!c) return std::nullopt;
        return *c < 0;
      },
      policy, "Bernoulli decision at index " + std::to_string(n));
}

}  // namespace detail

/// Includes each n in [n_start, t_max] independently with probability
/// sigma_n: n is selected iff index_uniform(seed, n) / 2^64 < sigma_n, decided
/// exactly. The result does not depend on `threads`.
inline RandomDraw sample_sequence(const ProbabilityProfile& profile, std::uint64_t t_max, std::uint64_t seed,
                                  unsigned threads = 1, const PrecisionPolicy& policy = {}) {
  RandomDraw draw{seed, profile, t_max, {}};
  if (t_max < profile.n_start) return draw;
  const bool cheap = profile.kind == ProbabilityProfile::Kind::log_log_log && profile.eta <= 1;
  const std::uint64_t cheap_limit = cheap ? detail::triple_exp_floor(policy) : 0;

  const std::uint64_t first = profile.n_start;
  const std::uint64_t total = t_max - first + 1;
  const std::uint64_t chunks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(total, 64));
  std::vector<std::vector<std::uint64_t>> parts(chunks);
  detail::parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t lo = first + total * c / chunks;
    const std::uint64_t hi = first + total * (c + 1) / chunks;
    for (std::uint64_t n = lo; n < hi; ++n)
      if (detail::include_index(profile, seed, n, cheap, cheap_limit, policy)) parts[c].push_back(n);
  });
  for (auto& p : parts) draw.selected.insert(draw.selected.end(), p.begin(), p.end());
  return draw;
}

/// I_m = [v_m, v_{m+1}) intersected with the integers, as [lo, hi).
struct GridInterval {
  std::uint64_t m = 0;
  Integer lo;
  Integer hi;
};

/// Thresholds v_m = exp(m (log log m)^(-1 + eta/2)), m >= 3, tracked through
/// their exact ceilings: an integer x lies in I_m iff ceil(v_m) <= x < ceil(v_{m+1}).
///
/// v_m first decreases and then increases in m, so the leading intervals are
/// empty; the nonempty ones tile [ceil(min v), infinity).
class IntervalGrid {
 public:
  IntervalGrid(const Rational& eta, std::uint64_t t_max, const PrecisionPolicy& policy = {})
      : eta_(eta), t_max_(t_max), policy_(policy) {
    if (eta <= 0) throw invalid_argument("eta must be positive");
    // f(m) = m (log log m)^(-c) is increasing once log m log log m > c; c < 1 <= that for m >= 8.
    for (std::uint64_t m = 3;; ++m) {
      ceilings_.push_back(threshold_ceiling(m));
      if (m >= 8 && ceilings_.back() > t_max_) break;
    }
    for (std::uint64_t m = 3; m + 1 < 3 + ceilings_.size(); ++m) {
      const Integer& lo = ceiling(m);
      const Integer& hi = ceiling(m + 1);
      if (lo < hi) intervals_.push_back({m, lo, hi});
    }
    if (intervals_.empty()) throw grid_coverage_error("threshold grid has no nonempty interval");
    for (std::size_t i = 1; i < intervals_.size(); ++i) {
      if (intervals_[i].lo != intervals_[i - 1].hi || intervals_[i].m != intervals_[i - 1].m + 1) {
        throw std::logic_error("threshold intervals do not tile the covered range");
      }
    }
    if (coverage_start() > t_max_) {
      throw grid_coverage_error("t_max = " + std::to_string(t_max_) + " is below the first threshold ceil(v_" +
                                std::to_string(intervals_.front().m) + ") = " + coverage_start().get_str());
    }
  }

  const Rational& eta() const noexcept { return eta_; }
  std::uint64_t t_max() const noexcept { return t_max_; }
  const PrecisionPolicy& precision() const noexcept { return policy_; }

  /// Nonempty intervals in increasing order; the last one extends past t_max.
  const std::vector<GridInterval>& intervals() const noexcept { return intervals_; }
  std::uint64_t first_m() const { return intervals_.front().m; }
  std::uint64_t last_m() const { return intervals_.back().m; }
  const Integer& coverage_start() const { return intervals_.front().lo; }

  /// ceil(v_m) for 3 <= m <= last_m() + 1.
  const Integer& ceiling(std::uint64_t m) const { return ceilings_.at(m - 3); }

  /// Index m of the interval containing x, if x >= coverage_start() and x is
  /// inside the computed range.
  std::optional<std::uint64_t> interval_of(const Integer& x) const {
    if (x < coverage_start() || x >= intervals_.back().hi) return std::nullopt;
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                               [](const Integer& v, const GridInterval& iv) { return v < iv.lo; });
    return std::prev(it)->m;
  }

  /// Whether every integer of I_m is <= t_max.
  bool fully_covered(std::uint64_t m) const {
    if (m < first_m() || m > last_m()) return false;
    return ceiling(m + 1) - 1 <= t_max_;
  }

  /// Enclosure of log v_m = m (log log m)^(-(1 - eta/2)).
  Interval log_threshold(std::uint64_t m, mpfr_prec_t bits) const {
    const Integer mi(static_cast<unsigned long>(m));
    return Interval::of(mi, bits) * pow(log_log(mi, bits), Interval::of(Rational(eta_ / 2 - 1), bits));
  }

 private:
  Integer threshold_ceiling(std::uint64_t m) const {
    return refine([&](mpfr_prec_t bits) { return ceil_if_decided(exp(log_threshold(m, bits))); }, policy_,
                  "ceiling of threshold v_" + std::to_string(m));
  }

  Rational eta_;
  std::uint64_t t_max_;
  PrecisionPolicy policy_;
  std::vector<Integer> ceilings_;
  std::vector<GridInterval> intervals_;
};

inline IntervalGrid build_interval_grid(const Rational& eta, std::uint64_t t_max, const PrecisionPolicy& policy = {}) {
  return IntervalGrid(eta, t_max, policy);
}

struct ThresholdRatioCheck {
  std::uint64_t m = 0;
  bool holds = false;
};

/// Decides v_{m+1}/v_m >= exp(1/(log log m)^(1 - eta/2)) for every m from
/// the first nonempty interval up to last_m() - 1.
inline std::vector<ThresholdRatioCheck> check_threshold_ratios(const IntervalGrid& grid) {
  std::vector<ThresholdRatioCheck> out;
  const Rational c = 1 - grid.eta() / 2;
  for (std::uint64_t m = grid.first_m(); m < grid.last_m(); ++m) {
    const bool holds = refine(
        [&](mpfr_prec_t bits) -> std::optional<bool> {
          Interval gap = grid.log_threshold(m + 1, bits) - grid.log_threshold(m, bits);
          Interval bound = Interval::of(1L, bits) /
                           pow(log_log(Integer(static_cast<unsigned long>(m)), bits), Interval::of(c, bits));
          auto s = compare(gap, bound);
          if (!s) return std::nullopt;
          return *s >= 0;
        },
        grid.precision(), "threshold ratio at m=" + std::to_string(m));
    out.push_back({m, holds});
  }
  return out;
}

/// Partition of a draw: B survives; D had an occupied successor interval;
/// E shared its interval with another element (E wins over D). `pending`
/// holds singletons whose successor interval is cut off by t_max and shows
/// no element, so D-or-B cannot be decided; `uncovered` lies below the grid.
struct ThinningResult {
  std::vector<std::uint64_t> B;
  std::vector<std::uint64_t> D;
  std::vector<std::uint64_t> E;
  std::vector<std::uint64_t> pending;
  std::vector<std::uint64_t> uncovered;
  std::map<std::uint64_t, std::uint64_t> occupancy;  // m -> #(B in I_m), every m holding a draw element
  std::vector<std::uint64_t> flagged_intervals;

  friend bool operator==(const ThinningResult&, const ThinningResult&) = default;
};

inline ThinningResult thin(const RandomDraw& draw, const IntervalGrid& grid) {
  if (draw.profile.kind == ProbabilityProfile::Kind::log_log_log && draw.profile.eta != grid.eta()) {
    throw grid_coverage_error("grid built for eta = " + to_fraction_string(grid.eta()) + " but draw has eta = " +
                              to_fraction_string(draw.profile.eta));
  }
  if (grid.t_max() < draw.t_max) {
    throw grid_coverage_error("grid horizon " + std::to_string(grid.t_max()) + " is below the draw horizon " +
                              std::to_string(draw.t_max));
  }

  ThinningResult out;
  std::map<std::uint64_t, std::vector<std::uint64_t>> by_interval;
  for (std::uint64_t x : draw.selected) {
    if (auto m = grid.interval_of(Integer(static_cast<unsigned long>(x)))) {
      by_interval[*m].push_back(x);
    } else {
      out.uncovered.push_back(x);
    }
  }

  for (const auto& [m, members] : by_interval) {
    out.occupancy[m] = 0;
    if (members.size() >= 2) {
      out.E.insert(out.E.end(), members.begin(), members.end());
      continue;
    }
    const bool successor_occupied = by_interval.count(m + 1) != 0;
    if (successor_occupied) {
      out.D.push_back(members.front());
    } else if (grid.fully_covered(m + 1)) {
      out.B.push_back(members.front());
      out.occupancy[m] = 1;
    } else {
      out.pending.push_back(members.front());
      out.flagged_intervals.push_back(m);
    }
  }
  for (auto* v : {&out.B, &out.D, &out.E, &out.pending, &out.uncovered}) std::sort(v->begin(), v->end());
  return out;
}

struct ThinningReport {
  bool occupancy_ok = true;
  bool gap_rule_ok = true;
  bool pair_ratio_ok = true;
  bool partition_ok = true;
  std::uint64_t pairs_checked = 0;
  std::vector<std::string> violations;

  bool passed() const { return occupancy_ok && gap_rule_ok && pair_ratio_ok && partition_ok; }
};

/// Checks occupancy <= 1, the gap rule (occupied m forces m+1 empty), and for
/// consecutive b < b' of B with b in I_m, b' in I_m': m' >= m + 2 and
/// b'/b >= v_{m+2}/v_{m+1} by enclosure. With `draw`, also checks that the
/// five classes partition it.
inline ThinningReport verify_thinning(const ThinningResult& result, const IntervalGrid& grid,
                                      const RandomDraw* draw = nullptr) {
  ThinningReport rep;
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    rep.violations.push_back(std::move(msg));
  };

  std::map<std::uint64_t, std::uint64_t> counts;
  std::vector<std::uint64_t> b_interval;
  for (std::uint64_t b : result.B) {
    auto m = grid.interval_of(Integer(static_cast<unsigned long>(b)));
    if (!m) {
      fail(rep.partition_ok, "B element " + std::to_string(b) + " lies outside the grid");
      b_interval.push_back(0);
      continue;
    }
    ++counts[*m];
    b_interval.push_back(*m);
  }
  for (const auto& [m, c] : counts) {
    if (c > 1) fail(rep.occupancy_ok, "interval " + std::to_string(m) + " holds " + std::to_string(c) + " B elements");
    if (counts.count(m + 1)) {
      fail(rep.gap_rule_ok, "intervals " + std::to_string(m) + " and " + std::to_string(m + 1) + " both hold B elements");
    }
  }
  for (const auto& [m, c] : result.occupancy) {
    const auto it = counts.find(m);
    if ((it == counts.end() ? 0 : it->second) != c) {
      fail(rep.occupancy_ok, "recorded occupancy of interval " + std::to_string(m) + " disagrees with B");
    }
  }

  for (std::size_t i = 0; i + 1 < result.B.size(); ++i) {
    const std::uint64_t b = result.B[i], b2 = result.B[i + 1];
    const std::uint64_t m = b_interval[i], m2 = b_interval[i + 1];
    if (m == 0 || m2 == 0) continue;
    ++rep.pairs_checked;
    if (m2 < m + 2) {
      fail(rep.pair_ratio_ok, "B pair (" + std::to_string(b) + ", " + std::to_string(b2) + ") sits in intervals " +
                                  std::to_string(m) + ", " + std::to_string(m2));
      continue;
    }
    const Rational ratio = make_rational(Integer(static_cast<unsigned long>(b2)), Integer(static_cast<unsigned long>(b)));
    const bool ok = refine(
        [&](mpfr_prec_t bits) -> std::optional<bool> {
          auto c = compare(ratio, exp(grid.log_threshold(m + 2, bits) - grid.log_threshold(m + 1, bits)));
          if (!c) return std::nullopt;
          return *c >= 0;
        },
        grid.precision(), "B pair ratio comparison");
    if (!ok) {
      fail(rep.pair_ratio_ok, "B pair (" + std::to_string(b) + ", " + std::to_string(b2) + ") has ratio below v_" +
                                  std::to_string(m + 2) + "/v_" + std::to_string(m + 1));
    }
  }

  std::set<std::uint64_t> seen;
  std::uint64_t total = 0;
  for (const auto* v : {&result.B, &result.D, &result.E, &result.pending, &result.uncovered}) {
    for (std::uint64_t x : *v) {
      ++total;
      if (!seen.insert(x).second) fail(rep.partition_ok, "element " + std::to_string(x) + " is in two classes");
    }
  }
  if (draw) {
    const std::set<std::uint64_t> all(draw->selected.begin(), draw->selected.end());
    if (all != seen || total != draw->selected.size()) {
      fail(rep.partition_ok, "B, D, E, pending and uncovered do not partition the draw");
    }
  }
  return rep;
}

struct DensityRow {
  std::uint64_t t = 0;
  std::uint64_t a_count = 0;
  std::uint64_t b_count = 0;
  std::optional<Rational> ratio;  // B(t)/A(t); empty when A(t) = 0
};

inline std::vector<DensityRow> density_report(const RandomDraw& draw, const ThinningResult& result,
                                              const std::vector<std::uint64_t>& checkpoints) {
  std::vector<DensityRow> rows;
  for (std::uint64_t t : checkpoints) {
    if (t > draw.t_max) throw invalid_argument("checkpoint " + std::to_string(t) + " exceeds t_max");
    DensityRow row;
    row.t = t;
    row.a_count = static_cast<std::uint64_t>(std::upper_bound(draw.selected.begin(), draw.selected.end(), t) -
                                             draw.selected.begin());
    row.b_count =
        static_cast<std::uint64_t>(std::upper_bound(result.B.begin(), result.B.end(), t) - result.B.begin());
    if (row.a_count > 0) {
      row.ratio = make_rational(Integer(static_cast<unsigned long>(row.b_count)),
                                Integer(static_cast<unsigned long>(row.a_count)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct SigmaDiagnostics {
  std::uint64_t n = 0;
  std::string partial_sum;  // enclosure of sum_{k <= n} sigma_k
  std::uint64_t u_n = 0;    // min{t : sum_{k <= t} sigma_k >= n}
  std::optional<std::string> comparator;  // exp(n (log log n)^(-1+eta)), n >= 3, log-log-log profile only
};

/// Partial sums of sigma, scanned with interval sums; a scan that cannot
/// settle a comparison restarts at higher precision.
inline SigmaDiagnostics sigma_diagnostics(const ProbabilityProfile& profile, std::uint64_t n,
                                          const PrecisionPolicy& policy = {}, std::uint64_t t_limit = 100'000'000) {
  if (n < 1) throw invalid_argument("n must be at least 1");
  SigmaDiagnostics d;
  d.n = n;
  const Integer target(static_cast<unsigned long>(n));
  d.u_n = refine(
      [&](mpfr_prec_t bits) -> std::optional<std::uint64_t> {
        Interval sum = Interval::of(0L, bits);
        for (std::uint64_t t = 1; t <= t_limit; ++t) {
          sum = sum + sigma_enclosure(profile, t, bits);
          auto c = compare(Rational(target), sum);
          if (!c) return std::nullopt;
          if (*c <= 0) return t;
        }
        throw invalid_argument("u_" + std::to_string(n) + " exceeds the scan limit " + std::to_string(t_limit));
      },
      policy, "u_n scan");

  const mpfr_prec_t bits = std::max<mpfr_prec_t>(policy.initial_bits, 128);
  Interval sum = Interval::of(0L, bits);
  for (std::uint64_t t = 1; t <= n; ++t) sum = sum + sigma_enclosure(profile, t, bits);
  d.partial_sum = sum.to_string(15);

  if (profile.kind == ProbabilityProfile::Kind::log_log_log && n >= 3) {
    const Integer ni(static_cast<unsigned long>(n));
    Interval comp = exp(Interval::of(ni, bits) * pow(log_log(ni, bits), Interval::of(Rational(profile.eta - 1), bits)));
    d.comparator = comp.to_string(15);
  }
  return d;
}

}  // namespace sweepout
