#pragma once

// The torus grid construction: Q^K cubes matched with Q^K index blocks, one
// rotation number per coordinate, and a bad set of K slabs of width 2/Q that
// every orbit segment from a cube lands in during the cube's block.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sweepout/enclosure.hpp"
#include "sweepout/errors.hpp"
#include "sweepout/parallel.hpp"
#include "sweepout/rational.hpp"
#include "sweepout/rotation_solver.hpp"
#include "sweepout/sequences.hpp"
#include "sweepout/torus.hpp"
#include "sweepout/weights.hpp"

namespace sweepout {

enum class GridMode { demo, full };

inline std::string to_string(GridMode m) { return m == GridMode::demo ? "demo" : "full"; }

namespace detail {

inline std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exponent) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return std::nullopt;
    r *= base;
  }
  return r;
}

}  // namespace detail

struct GridParameters {
  Rational eta{1};
  Rational epsilon{1, 2};
  Rational C{1};
  std::uint64_t Q = 3;
  std::uint64_t K = 1;
  GridMode mode = GridMode::demo;
  std::uint64_t block_length = 1;  // demo mode
  std::uint64_t N1 = 0;            // full mode dyadic offset

  /// Q^K; throws if it does not fit in 64 bits.
  std::uint64_t cube_count() const {
    auto c = detail::checked_pow(Q, K);
    if (!c) throw invalid_argument("Q^K overflows 64 bits");
    return *c;
  }

  /// The bookkeeping horizon N = 2^(Q^K), kept symbolic.
  std::string horizon_symbolic() const {
    return "2^(" + std::to_string(Q) + "^" + std::to_string(K) + ")";
  }

  Rational measure_budget() const {
    Rational inv_c = 1 / C;
    return epsilon < inv_c ? epsilon : inv_c;
  }
};

struct PlanOverrides {
  std::optional<std::uint64_t> Q;
  std::optional<std::uint64_t> K;
  std::optional<std::uint64_t> block_length;
  std::uint64_t N1 = 0;
  std::uint64_t q_limit = 1'000'000;
  PrecisionPolicy precision{};
};

/// Least integer K with K > (log Q)^(2/eta), decided by enclosure refinement.
inline std::uint64_t minimal_dimension(std::uint64_t q, const Rational& eta, const PrecisionPolicy& policy = {}) {
  const Integer qi(static_cast<unsigned long>(q));
  const Rational exponent = 2 / eta;
  Integer f = refine(
      [&](mpfr_prec_t bits) {
        return floor_if_decided(pow(log(Interval::of(qi, bits)), Interval::of(exponent, bits)));
      },
      policy, "floor of (log Q)^(2/eta)");
  if (!f.fits_ulong_p()) throw infeasible_parameters("(log Q)^(2/eta) is too large");
  return f.get_ui() + 1;
}

inline GridParameters plan_parameters(const Rational& eta, const Rational& epsilon, const Rational& C, GridMode mode,
                                      const PlanOverrides& overrides = {}) {
  if (eta <= 0) throw invalid_argument("eta must be positive");
  if (!(0 < epsilon && epsilon < 1)) throw invalid_argument("epsilon must lie in (0, 1)");
  if (C < 1) throw invalid_argument("C must be at least 1");

  GridParameters p;
  p.eta = eta;
  p.epsilon = epsilon;
  p.C = C;
  p.mode = mode;
  p.N1 = overrides.N1;
  const Rational budget = p.measure_budget();
  auto fits_budget = [&](std::uint64_t q, std::uint64_t k) {
    return make_rational(Integer(static_cast<unsigned long>(2 * k)), Integer(static_cast<unsigned long>(q))) < budget;
  };

  if (mode == GridMode::demo) {
    if (!overrides.Q || !overrides.K) throw invalid_argument("demo mode needs explicit Q and K");
    p.Q = *overrides.Q;
    p.K = *overrides.K;
    if (p.Q < 3) throw invalid_argument("Q must be at least 3");
    if (p.K < 1) throw invalid_argument("K must be at least 1");
    p.block_length = overrides.block_length.value_or(p.K);
    if (p.block_length < p.K) throw invalid_argument("block length must be at least K");
    if (!fits_budget(p.Q, p.K)) {
      throw infeasible_parameters("2K/Q = " + std::to_string(2 * p.K) + "/" + std::to_string(p.Q) +
                                  " is not < min(epsilon, 1/C) = " + to_fraction_string(budget));
    }
    p.cube_count();
    return p;
  }

  for (std::uint64_t q = std::max<std::uint64_t>(overrides.Q.value_or(3), 3); q <= overrides.q_limit; ++q) {
    const std::uint64_t k_min = minimal_dimension(q, eta, overrides.precision);
    const std::uint64_t k = overrides.K ? *overrides.K : k_min;
    if (k < k_min) continue;
    if (!fits_budget(q, k)) continue;
    p.Q = q;
    p.K = k;
    p.block_length = 0;
    return p;
  }
  throw infeasible_parameters("no Q <= " + std::to_string(overrides.q_limit) + " satisfies the constraints");
}

/// Inclusive index range [lo, hi].
struct IndexBlock {
  std::uint64_t lo = 1;
  std::uint64_t hi = 0;

  std::uint64_t size() const noexcept { return hi >= lo ? hi - lo + 1 : 0; }
  bool contains(std::uint64_t n) const noexcept { return lo <= n && n <= hi; }
  friend bool operator==(const IndexBlock&, const IndexBlock&) = default;
};

/// Residue classes N_k = {n <= n_total : n = k mod K} are implicit: index n
/// belongs to coordinate (n - 1) mod K (zero-based), i.e. class k = that + 1.
struct IndexPartition {
  std::uint64_t n_total = 0;
  std::uint64_t K = 1;
  std::vector<IndexBlock> blocks;

  std::size_t coordinate_of(std::uint64_t n) const noexcept { return static_cast<std::size_t>((n - 1) % K); }

  /// Sorted indices of N_{c+1} within [1, n_total].
  std::vector<std::uint64_t> class_indices(std::size_t c) const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = c + 1; n <= n_total; n += K) out.push_back(n);
    return out;
  }
};

inline IndexPartition partition_indices(const GridParameters& params, std::uint64_t n_total) {
  IndexPartition part;
  part.n_total = n_total;
  part.K = params.K;
  const std::uint64_t cubes = params.cube_count();

  if (params.mode == GridMode::demo) {
    if (params.block_length < params.K) {
      throw not_enough_indices("block length " + std::to_string(params.block_length) +
                               " cannot meet all K = " + std::to_string(params.K) + " residue classes");
    }
    if (params.block_length != 0 && cubes > n_total / params.block_length) {
      throw not_enough_indices("need Q^K * block_length = " + std::to_string(cubes) + " * " +
                               std::to_string(params.block_length) + " indices, have " + std::to_string(n_total));
    }
    part.blocks.reserve(cubes);
    for (std::uint64_t i = 0; i < cubes; ++i) {
      part.blocks.push_back({i * params.block_length + 1, (i + 1) * params.block_length});
    }
    return part;
  }

  // Full mode: J_i = (2^(N1+i), 2^(N1+i+1)], i = 1..Q^K.
  if (params.N1 + cubes + 1 > 63 || (std::uint64_t{1} << (params.N1 + cubes + 1)) > n_total) {
    throw not_enough_indices("dyadic blocks need 2^(N1+Q^K+1) <= N_total");
  }
  for (std::uint64_t i = 1; i <= cubes; ++i) {
    const std::uint64_t lo = std::uint64_t{1} << (params.N1 + i);
    if (lo < params.K) throw not_enough_indices("dyadic block " + std::to_string(i) + " is shorter than K");
    part.blocks.push_back({lo + 1, lo << 1});
  }
  return part;
}

/// Mixed-radix enumeration of cubes, coordinate 1 fastest: cube i has
/// q_c = floor(i / Q^c) mod Q for zero-based coordinate c. Bins are
/// zero-indexed, I'_q = (q/Q, (q+1)/Q).
struct CubeAssignment {
  std::uint64_t Q = 3;
  std::uint64_t K = 1;

  std::uint64_t count() const {
    auto c = detail::checked_pow(Q, K);
    if (!c) throw invalid_argument("Q^K overflows 64 bits");
    return *c;
  }

  std::vector<std::uint64_t> q_vector(std::uint64_t cube) const {
    std::vector<std::uint64_t> q(K);
    for (std::uint64_t c = 0; c < K; ++c) {
      q[c] = cube % Q;
      cube /= Q;
    }
    return q;
  }

  std::uint64_t cube_of(const std::vector<std::uint64_t>& q) const {
    std::uint64_t i = 0;
    for (std::uint64_t c = K; c-- > 0;) i = i * Q + q.at(c);
    return i;
  }

  /// Target bin for r_c * a_n when n is in the block of `cube`: (Q - q_c) mod Q.
  std::uint64_t target(std::uint64_t cube, std::size_t c) const { return (Q - q_vector(cube)[c]) % Q; }
};

struct IndexTarget {
  std::uint64_t n = 0;
  std::uint64_t target = 0;
};

struct TargetAssignment {
  CubeAssignment cubes;
  /// Per zero-based coordinate: (n, target) for every n in some block's
  /// share of that residue class, increasing in n.
  std::vector<std::vector<IndexTarget>> per_coordinate;
};

inline TargetAssignment assign_targets(const IndexPartition& partition, const GridParameters& params) {
  TargetAssignment out;
  out.cubes = CubeAssignment{params.Q, params.K};
  out.per_coordinate.assign(params.K, {});
  if (partition.blocks.size() != out.cubes.count()) {
    throw invalid_argument("partition has " + std::to_string(partition.blocks.size()) + " blocks for " +
                           std::to_string(out.cubes.count()) + " cubes");
  }
  for (std::uint64_t i = 0; i < partition.blocks.size(); ++i) {
    const auto q = out.cubes.q_vector(i);
    const auto& block = partition.blocks[i];
    for (std::uint64_t n = block.lo; n <= block.hi; ++n) {
      const std::size_t c = partition.coordinate_of(n);
      out.per_coordinate[c].push_back({n, (params.Q - q[c]) % params.Q});
    }
  }
  return out;
}

/// The index sets N_{k,q}: indices of class k whose block's cube has q_k = q.
/// Result is indexed [coordinate][q].
inline std::vector<std::vector<std::vector<std::uint64_t>>> class_bin_partition(const IndexPartition& partition,
                                                                                const CubeAssignment& cubes) {
  std::vector<std::vector<std::vector<std::uint64_t>>> out(cubes.K,
                                                           std::vector<std::vector<std::uint64_t>>(cubes.Q));
  for (std::uint64_t i = 0; i < partition.blocks.size(); ++i) {
    const auto q = cubes.q_vector(i);
    for (std::uint64_t n = partition.blocks[i].lo; n <= partition.blocks[i].hi; ++n) {
      const std::size_t c = partition.coordinate_of(n);
      out[c][q[c]].push_back(n);
    }
  }
  return out;
}

/// Builds coordinate c's constraint list (a_n, target) from the assignment.
inline std::vector<BinConstraint> coordinate_constraints(const IntegerSequence& seq, const TargetAssignment& assignment,
                                                         std::size_t c) {
  std::vector<BinConstraint> out;
  out.reserve(assignment.per_coordinate.at(c).size());
  for (const auto& it : assignment.per_coordinate[c]) out.push_back({seq.term(it.n), it.target});
  return out;
}

/// One rotation solve per coordinate. A ratio failure is rethrown with the
/// zero-based coordinate and the sequence index n of the lower term.
inline RotationVector solve_all_rotations(const IntegerSequence& seq, const TargetAssignment& assignment,
                                          const GridParameters& params, unsigned threads = 1) {
  std::vector<UnitRational> r(params.K);
  detail::parallel_for(params.K, threads, [&](std::size_t c) {
    const auto constraints = coordinate_constraints(seq, assignment, c);
    try {
      r[c] = solve_rotation(constraints, params.Q);
    } catch (const ratio_too_small& e) {
      const std::uint64_t n = assignment.per_coordinate[c][e.position()].n;
      throw ratio_too_small("coordinate " + std::to_string(c + 1) + ", sequence index " + std::to_string(n) + ": " +
                                e.what(),
                            static_cast<std::size_t>(n), c);
    }
  });
  return RotationVector(std::move(r));
}

/// E = union over k of {x : x_k in (0, 2/Q)}.
struct BadSet {
  std::uint64_t K = 1;
  std::uint64_t Q = 3;

  Rational slab_width() const { return make_rational(2, Integer(static_cast<unsigned long>(Q))); }
};

/// Exact Haar measure 1 - (1 - 2/Q)^K of the bad set.
inline Rational bad_set_measure(std::uint64_t K, std::uint64_t Q) {
  if (Q < 3) throw invalid_argument("Q must be at least 3");
  if (K < 1) throw invalid_argument("K must be at least 1");
  const Rational keep = 1 - make_rational(2, Integer(static_cast<unsigned long>(Q)));
  Rational m = 1 - pow_rational(keep, static_cast<unsigned long>(K));
  if (m > make_rational(Integer(static_cast<unsigned long>(2 * K)), Integer(static_cast<unsigned long>(Q)))) {
    throw std::logic_error("bad set measure exceeds the union bound 2K/Q");
  }
  return m;
}

inline bool in_bad_set(const TorusPoint& x, const BadSet& bad) {
  if (x.dimension() != bad.K) {
    throw dimension_mismatch("point has dimension " + std::to_string(x.dimension()) + ", bad set has K = " +
                             std::to_string(bad.K));
  }
  const Rational width = bad.slab_width();
  for (const auto& coord : x.coords()) {
    if (0 < coord.value() && coord.value() < width) return true;
  }
  return false;
}

inline std::uint64_t count_hits(const TorusPoint& x, const IndexBlock& block, const IntegerSequence& seq,
                                const RotationVector& r, const BadSet& bad) {
  std::uint64_t hits = 0;
  for (std::uint64_t n = block.lo; n <= block.hi; ++n) hits += in_bad_set(rotate(x, r, seq.term(n)), bad) ? 1 : 0;
  return hits;
}

/// (1/#J) #{n in J : T^{a_n} x in E}.
inline Rational block_average(const TorusPoint& x, const IndexBlock& block, const IntegerSequence& seq,
                              const RotationVector& r, const BadSet& bad) {
  if (block.size() == 0) throw empty_block("block average over an empty block");
  return make_rational(Integer(static_cast<unsigned long>(count_hits(x, block, seq, r, bad))),
                       Integer(static_cast<unsigned long>(block.size())));
}

struct SweepoutWitness {
  std::uint64_t coordinate = 0;  // 1-based k
  std::uint64_t n = 0;
  std::uint64_t expected_bin = 0;
  std::optional<std::uint64_t> found_bin;  // nullopt: on a bin boundary
};

struct CubeResult {
  std::uint64_t cube_index = 0;
  std::vector<std::uint64_t> q;
  IndexBlock block;
  bool certificate_pass = true;
  std::optional<SweepoutWitness> witness;
  std::vector<TorusPoint> sample_points;
  std::vector<Rational> sample_averages;
  bool samples_pass = true;
  bool pass = true;
};

struct SweepoutReport {
  GridParameters params;
  std::vector<CubeResult> cubes;
  Rational bad_set_measure{0};
  bool measure_within_budget = false;
  std::uint64_t cubes_passed = 0;
  bool full_cover = false;

  std::optional<std::uint64_t> first_failing_cube() const {
    for (const auto& c : cubes)
      if (!c.pass) return c.cube_index;
    return std::nullopt;
  }
};

struct SweepoutOptions {
  std::uint64_t samples_per_cube = 3;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

namespace detail {

// Uniform rational in the open bin (q/Q, (q+1)/Q) with denominator 2^32.
// Raw engine output reduced mod the range keeps the stream identical across
// standard library implementations.
inline UnitRational sample_in_bin(std::uint64_t q, std::uint64_t q_bins, std::mt19937_64& rng) {
  const Integer den = Integer(1) << 32;
  const Integer qi(static_cast<unsigned long>(q_bins));
  const Integer lo = floor_of(make_rational(den * static_cast<unsigned long>(q), qi)) + 1;
  const Integer hi = ceil_of(make_rational(den * static_cast<unsigned long>(q + 1), qi)) - 1;
  if (hi < lo) throw invalid_argument("bin too narrow to sample with denominator 2^32");
  const Integer span = hi - lo + 1;
  const Integer offset = Integer(static_cast<unsigned long>(rng())) % span;
  return UnitRational(make_rational(lo + offset, den));
}

}  // namespace detail

/// Exact per-cube certificate plus direct evaluation at sampled points.
///
/// The certificate checks bin_of(r_k a_n mod 1) = (Q - q_i(k)) mod Q for
/// every n in J_i of class k. With x_k in (q/Q, (q+1)/Q) that places
/// x_k + r_k a_n mod 1 in (0, 2/Q), so the block average over J_i is 1 on the
/// whole open cube i.
inline SweepoutReport verify_sweepout(const IntegerSequence& seq, const GridParameters& params,
                                      const IndexPartition& partition, const TargetAssignment& assignment,
                                      const RotationVector& r, const BadSet& bad, const SweepoutOptions& options = {}) {
  if (r.dimension() != params.K || bad.K != params.K || bad.Q != params.Q || assignment.cubes.Q != params.Q ||
      assignment.cubes.K != params.K || partition.K != params.K) {
    throw dimension_mismatch("grid artifacts disagree on Q or K");
  }
  const std::uint64_t cubes = assignment.cubes.count();
  if (partition.blocks.size() != cubes) throw invalid_argument("partition and cube enumeration disagree");

  SweepoutReport report;
  report.params = params;
  report.bad_set_measure = bad_set_measure(params.K, params.Q);
  report.measure_within_budget = report.bad_set_measure < params.measure_budget();
  report.cubes.resize(cubes);

  detail::parallel_for(cubes, options.threads, [&](std::size_t i) {
    CubeResult& res = report.cubes[i];
    res.cube_index = i;
    res.q = assignment.cubes.q_vector(i);
    res.block = partition.blocks[i];

    for (std::uint64_t n = res.block.lo; n <= res.block.hi && res.certificate_pass; ++n) {
      const std::size_t c = partition.coordinate_of(n);
      const std::uint64_t expected = (params.Q - res.q[c]) % params.Q;
      const auto found = bin_of(UnitRational(r[c].value() * seq.term(n)), params.Q);
      if (!found || *found != expected) {
        res.certificate_pass = false;
        res.witness = SweepoutWitness{c + 1, n, expected, found};
      }
    }

    std::seed_seq sseq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                       static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(sseq);
    for (std::uint64_t s = 0; s < options.samples_per_cube; ++s) {
      std::vector<UnitRational> coords;
      coords.reserve(params.K);
      for (std::uint64_t c = 0; c < params.K; ++c) coords.push_back(detail::sample_in_bin(res.q[c], params.Q, rng));
      TorusPoint x(std::move(coords));
      Rational avg = block_average(x, res.block, seq, r, bad);
      if (avg != 1) res.samples_pass = false;
      res.sample_points.push_back(std::move(x));
      res.sample_averages.push_back(std::move(avg));
    }
    res.pass = res.certificate_pass && res.samples_pass;
  });

  for (const auto& c : report.cubes) report.cubes_passed += c.pass ? 1 : 0;
  report.full_cover = report.cubes_passed == cubes;
  return report;
}

struct SegmentMaximum {
  std::uint64_t best_n = 1;
  Rational best_value{0};
};

/// max over N in [n_min, n_max] of (1/N) #{n <= N : T^{a_n} x in E}, first
/// maximizer on ties. Indices 1..n_max must exist in `seq`.
inline SegmentMaximum max_initial_segment_average(const TorusPoint& x, const IntegerSequence& seq,
                                                  const RotationVector& r, const BadSet& bad, std::uint64_t n_max,
                                                  std::uint64_t n_min = 1) {
  if (n_min < 1 || n_min > n_max) throw invalid_argument("need 1 <= n_min <= n_max");
  if (seq.start_index() != 1 || !seq.has_index(n_max)) {
    throw invalid_argument("initial segment averages need indices 1.." + std::to_string(n_max));
  }
  SegmentMaximum best;
  bool have = false;
  std::uint64_t hits = 0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    hits += in_bad_set(rotate(x, r, seq.term(n)), bad) ? 1 : 0;
    if (n < n_min) continue;
    Rational v = make_rational(Integer(static_cast<unsigned long>(hits)), Integer(static_cast<unsigned long>(n)));
    if (!have || v > best.best_value) {
      best = {n, std::move(v)};
      have = true;
    }
  }
  return best;
}

/// G^{-1}(y) = min{n : G(n) >= y} over exact prefix sums (g[0] = 0).
inline std::optional<std::uint64_t> inverse_prefix(const std::vector<Rational>& g, const Rational& y) {
  auto it = std::lower_bound(g.begin(), g.end(), y);
  if (it == g.end()) return std::nullopt;
  return static_cast<std::uint64_t>(it - g.begin());
}

/// J_i = (G^{-1}(2^(N1+i)), G^{-1}(2^(N1+i+1))], i = 1..count.
inline std::vector<IndexBlock> weighted_block_intervals(const WeightSequence& w, std::uint64_t n1, std::uint64_t count,
                                                        std::uint64_t n_total) {
  if (count < 1) throw invalid_argument("need at least one block");
  const auto g = prefix_sums(w, n_total);
  const Rational top(Integer(1) << static_cast<unsigned long>(n1 + count + 1));
  if (top > g.back()) {
    throw threshold_out_of_range("G(" + std::to_string(n_total) + ") = " + to_fraction_string(g.back()) +
                                 " < 2^(N1+count+1) = " + top.get_num().get_str());
  }
  std::vector<IndexBlock> blocks;
  for (std::uint64_t i = 1; i <= count; ++i) {
    const Rational lo_y(Integer(1) << static_cast<unsigned long>(n1 + i));
    const Rational hi_y(Integer(1) << static_cast<unsigned long>(n1 + i + 1));
    const std::uint64_t lo = *inverse_prefix(g, lo_y);
    const std::uint64_t hi = *inverse_prefix(g, hi_y);
    if (hi <= lo) throw empty_block("weighted block " + std::to_string(i) + " is empty");
    blocks.push_back({lo + 1, hi});
  }
  return blocks;
}

/// sum_{n in J} w(n) 1_E(T^{a_n} x) / sum_{n in J} w(n).
inline Rational weighted_average(const TorusPoint& x, const IndexBlock& block, const WeightSequence& w,
                                 const IntegerSequence& seq, const RotationVector& r, const BadSet& bad) {
  if (block.size() == 0) throw empty_block("weighted average over an empty block");
  Rational num(0), den(0);
  for (std::uint64_t n = block.lo; n <= block.hi; ++n) {
    const Rational wn = w(n);
    den += wn;
    if (in_bad_set(rotate(x, r, seq.term(n)), bad)) num += wn;
  }
  return num / den;
}

}  // namespace sweepout
