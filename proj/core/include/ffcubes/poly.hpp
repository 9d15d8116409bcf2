#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ffcubes/field.hpp"

namespace ffc {

/// Element of O = F_q[t]. Coefficients ascending with no trailing zeros; the
/// zero polynomial has deg() == -1 and |0| = 0. The field must outlive it.
class Poly {
 public:
  Poly() = default;
  explicit Poly(const Field* f) : f_(f) {}
  Poly(const Field* f, std::vector<Elem> coeffs);
  static Poly constant(const Field* f, Elem c);
  static Poly monomial(const Field* f, Elem c, int k);
  static Poly t(const Field* f) { return monomial(f, 1, 1); }
  /// The polynomial whose coefficient codes are the base-q digits of idx.
  static Poly from_index(const Field* f, std::uint64_t idx);
  std::uint64_t index() const;

  const Field* field() const { return f_; }
  int deg() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  Elem lc() const { return c_.empty() ? 0 : c_.back(); }
  Elem coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : 0; }
  const std::vector<Elem>& coeffs() const { return c_; }

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const;
  Poly scaled(Elem s) const;
  Poly shifted(int k) const;  // times t^k, k >= 0

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  /// Canonical order: degree first, then coefficients from the top by code.
  friend std::strong_ordering operator<=>(const Poly& a, const Poly& b);

 private:
  void trim();
  const Field* f_ = nullptr;
  std::vector<Elem> c_;
};

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly operator/(const Poly& a, const Poly& b);  // exact or floor quotient
Poly operator%(const Poly& a, const Poly& b);
bool divides(const Poly& d, const Poly& a);
Poly make_monic(const Poly& a);
Poly gcd(const Poly& a, const Poly& b);  // monic (zero if both zero)
/// Returns (g, s, u) with s*a + u*b = g monic.
struct Xgcd {
  Poly g, s, u;
};
Xgcd xgcd(const Poly& a, const Poly& b);
Poly pow(const Poly& a, unsigned e);
Poly powmod(Poly a, std::uint64_t e, const Poly& m);
Poly derivative(const Poly& a);
Elem eval(const Poly& a, Elem x);
/// Multiplicity of the irreducible w in a (a != 0).
int valuation(const Poly& a, const Poly& w);
/// |gcd(a,b)| exponent: deg gcd.
int deg_gcd(const Poly& a, const Poly& b);

Poly parse_poly(std::string_view text, const Field* f);
std::string format(const Poly& a);

struct Factorization {
  const Field* field = nullptr;
  Elem unit = 1;
  std::vector<std::pair<Poly, int>> factors;  // monic irreducibles, ordered
  Poly product() const;
};
Factorization factor(const Poly& a);
bool is_irreducible(const Poly& a);

enum class FullMode { square, cube };
struct Decomposition {
  Poly free_part;  // square-free (cube-free) part
  Poly full_part;  // square-full (cube-full) part
  Poly eta;        // product of primes with multiplicity 1 or 2
  Poly m;          // product of primes with multiplicity exactly 1
};
Decomposition decompose(const Poly& r, FullMode mode);
bool is_square_full(const Poly& r);

std::optional<Poly> cube_root(const Poly& a);
std::optional<Poly> square_root(const Poly& a);
/// Coprime (bi, bj), bj monic, with bi^3 * Fj = bj^3 * Fi, if Fi/Fj is a cube in K.
/// `all` variant returns one pair per cube root of unity in F_q.
std::optional<std::pair<Poly, Poly>> cube_ratio(const Poly& fi, const Poly& fj);
std::vector<std::pair<Poly, Poly>> cube_ratio_all(const Poly& fi, const Poly& fj);

Poly crt(const Poly& a1, const Poly& r1, const Poly& a2, const Poly& r2);

std::vector<Poly> monic_enum(const Field* f, int deg);
std::vector<Poly> irreducible_enum(const Field* f, int deg);
/// All monic r with deg r <= d, ordered by degree then canonical order.
std::vector<Poly> monic_upto(const Field* f, int d);

/// Resultant of A(w), B(w) whose coefficients (ascending in w) lie in O, via the
/// Sylvester determinant with fraction-free (Bareiss) elimination.
Poly sylvester_resultant(const std::vector<Poly>& A, const std::vector<Poly>& B);

std::uint64_t ipow_u64(std::uint64_t b, int e);

}  // namespace ffc
