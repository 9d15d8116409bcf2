#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace ffc {

/// Exact element of Q(zeta_p) in the power basis 1, zeta, ..., zeta^{p-2},
/// reduced with 1 + zeta + ... + zeta^{p-1} = 0. For p = 2 it is a rational.
/// A default-constructed value is an untyped zero that adopts the prime of
/// whatever it is combined with.
class CycNum {
 public:
  CycNum() = default;
  explicit CycNum(int p);
  static CycNum rational(int p, const mpq_class& v);
  static CycNum zeta_pow(int p, long long k);
  /// Coefficients in the power basis, length p-1.
  static CycNum from_basis(int p, std::vector<mpq_class> c);

  int p() const { return p_; }
  /// Length p-1 (empty for an untyped zero).
  const std::vector<mpq_class>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_rational() const;
  /// Throws std::domain_error when the value is irrational.
  mpq_class to_rational() const;

  CycNum conj() const { return galois(-1); }
  /// The automorphism zeta -> zeta^k, gcd(k, p) = 1.
  CycNum galois(long long k) const;
  std::complex<double> embed(long long k = 1) const;

  CycNum& operator+=(const CycNum& o);
  CycNum& operator-=(const CycNum& o);
  CycNum& operator*=(const CycNum& o);
  CycNum& operator*=(const mpq_class& s);
  friend CycNum operator+(CycNum a, const CycNum& b) { return a += b; }
  friend CycNum operator-(CycNum a, const CycNum& b) { return a -= b; }
  friend CycNum operator*(CycNum a, const CycNum& b) { return a *= b; }
  friend CycNum operator*(CycNum a, const mpq_class& s) { return a *= s; }
  friend CycNum operator*(const mpq_class& s, CycNum a) { return a *= s; }
  CycNum operator-() const;
  friend bool operator==(const CycNum& a, const CycNum& b);

  std::string str() const;

 private:
  void adopt(int p);
  int p_ = 0;
  std::vector<mpq_class> c_;
};

struct AbsSq {
  mpq_class value;  // |z|^2 when exact, else an upper bound over all embeddings
  bool exact = true;
};

/// z * conj(z) as a rational when it is fixed by the Galois group, otherwise a
/// flagged rational upper bound for the largest embedding.
AbsSq abs_sq(const CycNum& z);

/// Integer combination sum_j c[j] zeta^j over the group ring Z[C_p]
/// (exponents mod p, not reduced). The hot loops accumulate into this.
class ZetaSum {
 public:
  ZetaSum() = default;
  explicit ZetaSum(int p) : c_(static_cast<size_t>(p), 0) {}
  int p() const { return static_cast<int>(c_.size()); }
  void add_power(int k, std::int64_t n = 1) { c_[static_cast<size_t>(k)] += n; }
  std::int64_t operator[](int k) const { return c_[static_cast<size_t>(k)]; }
  std::int64_t& operator[](int k) { return c_[static_cast<size_t>(k)]; }
  ZetaSum& operator+=(const ZetaSum& o);
  ZetaSum& operator-=(const ZetaSum& o);
  ZetaSum& scale(std::int64_t s);
  friend ZetaSum operator*(const ZetaSum& a, const ZetaSum& b);
  /// Zero in Z[zeta_p], i.e. all coefficients equal.
  bool is_zero() const;
  std::int64_t total() const;
  CycNum to_cyc() const;
  /// Value divided by q^e (used for Haar averages).
  CycNum to_cyc_scaled(const mpq_class& s) const;
  const std::vector<std::int64_t>& raw() const { return c_; }

 private:
  std::vector<std::int64_t> c_;
};

/// q^e as an exact rational, e may be negative.
mpq_class qpow(int q, long long e);

}  // namespace ffc
