#pragma once

// Outward-rounded interval arithmetic over MPFR, plus the precision-doubling
// driver used wherever a transcendental quantity has to be compared with an
// exact rational or integer.

#include <mpfr.h>

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "sweepout/errors.hpp"
#include "sweepout/rational.hpp"

namespace sweepout {

struct PrecisionPolicy {
  mpfr_prec_t initial_bits = 64;
  mpfr_prec_t cap_bits = 4096;
};

/// Thrown by enclosure operations when the current precision cannot settle a
/// branch (for example a logarithm whose argument enclosure straddles zero).
/// `refine` treats it as "try again with more bits".
class undecided : public error {
 public:
  undecided() : error("enclosure too wide to decide") {}
};

/// Owning wrapper around an mpfr_t.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  BigFloat(const BigFloat& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  BigFloat& operator=(BigFloat other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

  std::string to_decimal(int digits = 20) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", digits, v_);
    std::string s = buf ? buf : "";
    mpfr_free_str(buf);
    return s;
  }

 private:
  mpfr_t v_;
};

/// Closed interval [lo, hi] guaranteed to contain the quantity it encloses.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec) : lo_(prec), hi_(prec) {
    mpfr_set_zero(lo_.get(), 1);
    mpfr_set_zero(hi_.get(), 1);
  }

  static Interval of(const Rational& x, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_q(r.lo_.get(), x.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.get(), x.get_mpq_t(), MPFR_RNDU);
    return r;
  }
  static Interval of(const Integer& x, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_z(r.lo_.get(), x.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_.get(), x.get_mpz_t(), MPFR_RNDU);
    return r;
  }
  static Interval of(long x, mpfr_prec_t prec) { return of(Integer(x), prec); }

  const BigFloat& lo() const noexcept { return lo_; }
  const BigFloat& hi() const noexcept { return hi_; }
  BigFloat& lo() noexcept { return lo_; }
  BigFloat& hi() noexcept { return hi_; }
  mpfr_prec_t precision() const noexcept { return lo_.precision(); }

  bool is_point() const { return mpfr_equal_p(lo_.get(), hi_.get()) != 0; }
  bool strictly_positive() const { return mpfr_sgn(lo_.get()) > 0; }

  std::string to_string(int digits = 20) const {
    return "[" + lo_.to_decimal(digits) + ", " + hi_.to_decimal(digits) + "]";
  }

 private:
  BigFloat lo_;
  BigFloat hi_;
};

namespace detail {

inline mpfr_prec_t joint_precision(const Interval& a, const Interval& b) {
  return std::max(a.precision(), b.precision());
}

using binary_mpfr_op = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

// Interval image of an operation that is monotone in each argument separately:
// the extremes are attained at the four corners.
inline Interval corner_image(const Interval& a, const Interval& b, binary_mpfr_op op) {
  const mpfr_prec_t prec = joint_precision(a, b);
  Interval r(prec);
  const std::array<mpfr_srcptr, 2> xs{a.lo().get(), a.hi().get()};
  const std::array<mpfr_srcptr, 2> ys{b.lo().get(), b.hi().get()};
  BigFloat t(prec);
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      op(t.get(), x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t.get(), r.lo().get())) mpfr_set(r.lo().get(), t.get(), MPFR_RNDD);
      op(t.get(), x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t.get(), r.hi().get())) mpfr_set(r.hi().get(), t.get(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

}  // namespace detail

inline Interval operator+(const Interval& a, const Interval& b) {
  Interval r(detail::joint_precision(a, b));
  mpfr_add(r.lo().get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
  mpfr_add(r.hi().get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
  return r;
}

inline Interval operator-(const Interval& a, const Interval& b) {
  Interval r(detail::joint_precision(a, b));
  mpfr_sub(r.lo().get(), a.lo().get(), b.hi().get(), MPFR_RNDD);
  mpfr_sub(r.hi().get(), a.hi().get(), b.lo().get(), MPFR_RNDU);
  return r;
}

inline Interval operator-(const Interval& a) {
  Interval r(a.precision());
  mpfr_neg(r.lo().get(), a.hi().get(), MPFR_RNDD);
  mpfr_neg(r.hi().get(), a.lo().get(), MPFR_RNDU);
  return r;
}

inline Interval operator*(const Interval& a, const Interval& b) {
  return detail::corner_image(a, b, &mpfr_mul);
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (mpfr_sgn(b.lo().get()) <= 0 && mpfr_sgn(b.hi().get()) >= 0) {
    if (b.is_point()) throw invalid_argument("division by an exact zero enclosure");
    throw undecided();
  }
  return detail::corner_image(a, b, &mpfr_div);
}

inline Interval exp(const Interval& x) {
  Interval r(x.precision());
  mpfr_exp(r.lo().get(), x.lo().get(), MPFR_RNDD);
  mpfr_exp(r.hi().get(), x.hi().get(), MPFR_RNDU);
  return r;
}

/// Natural logarithm. A certainly non-positive argument is a domain error;
/// an argument straddling zero is merely undecided at this precision.
inline Interval log(const Interval& x) {
  if (mpfr_sgn(x.hi().get()) <= 0) throw invalid_argument("logarithm of a non-positive value");
  if (mpfr_sgn(x.lo().get()) <= 0) throw undecided();
  Interval r(x.precision());
  mpfr_log(r.lo().get(), x.lo().get(), MPFR_RNDD);
  mpfr_log(r.hi().get(), x.hi().get(), MPFR_RNDU);
  return r;
}

/// x^y for x > 0.
inline Interval pow(const Interval& x, const Interval& y) {
  if (mpfr_sgn(x.hi().get()) <= 0) throw invalid_argument("power of a non-positive base");
  if (mpfr_sgn(x.lo().get()) <= 0) throw undecided();
  return detail::corner_image(x, y, &mpfr_pow);
}

/// Sign of the enclosed value, if the enclosure settles it.
inline std::optional<int> sign_of(const Interval& x) {
  if (mpfr_sgn(x.lo().get()) > 0) return 1;
  if (mpfr_sgn(x.hi().get()) < 0) return -1;
  if (mpfr_zero_p(x.lo().get()) && mpfr_zero_p(x.hi().get())) return 0;
  return std::nullopt;
}

/// Sign of (q - v) where v is the enclosed value.
inline std::optional<int> compare(const Rational& q, const Interval& v) {
  if (mpfr_cmp_q(v.lo().get(), q.get_mpq_t()) > 0) return -1;
  if (mpfr_cmp_q(v.hi().get(), q.get_mpq_t()) < 0) return 1;
  if (v.is_point() && mpfr_cmp_q(v.lo().get(), q.get_mpq_t()) == 0) return 0;
  return std::nullopt;
}

/// Sign of (a - b) for two enclosed values.
inline std::optional<int> compare(const Interval& a, const Interval& b) {
  if (mpfr_greater_p(a.lo().get(), b.hi().get())) return 1;
  if (mpfr_less_p(a.hi().get(), b.lo().get())) return -1;
  if (a.is_point() && b.is_point() && mpfr_equal_p(a.lo().get(), b.lo().get())) return 0;
  return std::nullopt;
}

inline std::optional<Integer> floor_if_decided(const Interval& v) {
  Integer a, b;
  mpfr_get_z(a.get_mpz_t(), v.lo().get(), MPFR_RNDD);
  mpfr_get_z(b.get_mpz_t(), v.hi().get(), MPFR_RNDD);
  if (a == b) return a;
  return std::nullopt;
}

inline std::optional<Integer> ceil_if_decided(const Interval& v) {
  Integer a, b;
  mpfr_get_z(a.get_mpz_t(), v.lo().get(), MPFR_RNDU);
  mpfr_get_z(b.get_mpz_t(), v.hi().get(), MPFR_RNDU);
  if (a == b) return a;
  return std::nullopt;
}

/// Runs `attempt(bits)` at increasing precision (doubling from
/// policy.initial_bits, final attempt at policy.cap_bits) until it yields a
/// value. `attempt` returns std::optional<T>; std::nullopt or a thrown
/// `undecided` both mean "not settled at this precision".
template <class F>
auto refine(F&& attempt, const PrecisionPolicy& policy, std::string_view what) {
  using result_t = std::invoke_result_t<F&, mpfr_prec_t>;
  const mpfr_prec_t cap = std::max<mpfr_prec_t>(policy.cap_bits, MPFR_PREC_MIN);
  mpfr_prec_t bits = std::clamp<mpfr_prec_t>(policy.initial_bits, MPFR_PREC_MIN, cap);
  for (;;) {
    try {
      result_t r = attempt(bits);
      if (r) return *std::move(r);
    } catch (const undecided&) {
    }
    if (bits >= cap) {
      throw precision_exhausted(std::string(what) + ": undecided at the " + std::to_string(cap) +
                                "-bit precision cap");
    }
    bits = std::min(cap, bits * 2);
  }
}

// Enclosures of the iterated logarithms that appear in the growth bounds.

inline Interval log_log(const Interval& x) { return log(log(x)); }

inline Interval log_log(const Integer& n, mpfr_prec_t prec) { return log_log(Interval::of(n, prec)); }

inline Interval log_log_log(const Integer& n, mpfr_prec_t prec) {
  return log(log_log(Interval::of(n, prec)));
}

}  // namespace sweepout
