#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sweepout/errors.hpp"
#include "sweepout/rational.hpp"

namespace sweepout {

/// Weight sequence w(n), n >= 1, with values in (0, 1].
struct WeightSequence {
  std::function<Rational(std::uint64_t)> fn;
  std::string name;

  Rational operator()(std::uint64_t n) const {
    Rational w = fn(n);
    if (w <= 0 || w > 1) {
      throw invalid_argument("weight " + name + "(" + std::to_string(n) + ") = " + to_fraction_string(w) +
                             " is outside (0, 1]");
    }
    return w;
  }

  static WeightSequence constant(Rational c) {
    c.canonicalize();
    return {[c](std::uint64_t) { return c; }, "const(" + to_fraction_string(c) + ")"};
  }
  static WeightSequence harmonic() {
    return {[](std::uint64_t n) { return Rational(1, static_cast<unsigned long>(n)); }, "1/n"};
  }
};

/// Prefix sums G(n) = w(1) + ... + w(n), with G(0) = 0.
inline std::vector<Rational> prefix_sums(const WeightSequence& w, std::uint64_t n_max) {
  std::vector<Rational> g;
  g.reserve(n_max + 1);
  g.emplace_back(0);
  for (std::uint64_t n = 1; n <= n_max; ++n) g.push_back(g.back() + w(n));
  return g;
}

}  // namespace sweepout
