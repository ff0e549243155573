// Exact dyadic rationals m*2^e, canonical form: mantissa odd or zero.
#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <string>
#include <stdexcept>
#include <utility>

namespace jc {

// Toolkit-wide error codes; the C API and CLI map these onto status codes.
enum class Err {
  usage = 2,
  ceiling = 3,
  not_found = 4,
  internal = 5,
};

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

enum class Round { down, up, nearest };  // down/up are toward -inf/+inf

class Dyadic {
 public:
  Dyadic() : man_(0), exp_(0) {}
  Dyadic(long v) : man_(v), exp_(0) { canon(); }
  Dyadic(const mpz_class& m, int64_t e) : man_(m), exp_(e) { canon(); }

  static Dyadic from_int(long v) { return Dyadic(v); }
  // value v * 2^e
  static Dyadic scaled(long v, int64_t e) { return Dyadic(mpz_class(v), e); }

  bool is_zero() const { return man_ == 0; }
  int sign() const { return sgn(man_); }
  const mpz_class& mantissa() const { return man_; }
  int64_t exponent() const { return exp_; }

  // exact arithmetic
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  Dyadic operator-() const { return Dyadic(-man_, exp_, raw_tag{}); }
  Dyadic abs() const { return man_ < 0 ? -*this : *this; }
  Dyadic mul_pow2(int64_t k) const {
    return is_zero() ? Dyadic() : Dyadic(man_, exp_ + k, raw_tag{});
  }
  Dyadic sqr() const { return *this * *this; }

  // exact comparison
  friend int cmp(const Dyadic& a, const Dyadic& b);
  friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
  friend bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a, b) > 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) >= 0; }
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.man_ == b.man_ && a.exp_ == b.exp_;
  }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }

  // round onto the grid 2^-m (the set D_m); exact when already on it
  Dyadic round_to_grid(int64_t m, Round mode) const;
  bool on_grid(int64_t m) const { return is_zero() || exp_ >= -m; }

  // round mantissa to at most `bits` significant bits; returns the rounded
  // value and an upper bound on |rounded - this|
  std::pair<Dyadic, Dyadic> round_bits(int64_t bits, Round mode) const;

  // number of significant bits of the mantissa (0 for zero)
  size_t bit_length() const { return man_ == 0 ? 0 : mpz_sizeinbase(man_.get_mpz_t(), 2); }

  double to_double() const;

  // "m*2^e" with decimal m; plain integer when e == 0
  std::string str() const;
  // same shape with hex mantissa, e.g. "-0x1b*2^-4"
  std::string str_hex() const;
  // accepts str()/str_hex() output, plain integers, and finite decimal
  // fractions that are exactly dyadic ("1.75", "-0.046875")
  static Dyadic parse(const std::string& s);

  friend class RealInterval;

 private:
  struct raw_tag {};
  Dyadic(mpz_class m, int64_t e, raw_tag) : man_(std::move(m)), exp_(e) {}
  void canon();
  mpz_class man_;
  int64_t exp_;
};

inline Dyadic min(const Dyadic& a, const Dyadic& b) { return a < b ? a : b; }
inline Dyadic max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

// floor(sqrt(x)) style directed bounds with ~bits significant bits, x >= 0
Dyadic sqrt_lower(const Dyadic& x, int64_t bits);
Dyadic sqrt_upper(const Dyadic& x, int64_t bits);

}  // namespace jc
