#pragma once

#include <cstdint>
#include <vector>

#include "ffcubes/cyc.hpp"
#include "ffcubes/poly.hpp"

namespace ffc {

/// Residues modulo a monic r of degree d. A residue is a digit vector
/// x_0..x_{d-1} with index sum x_j q^j (same order as Poly::from_index).
/// For y reduced mod r, psi(y/r) = zeta^{Tr(y_{d-1})}.
class ResidueCtx {
 public:
  explicit ResidueCtx(const Poly& r);

  const Field& field() const { return *f_; }
  const Poly& modulus() const { return r_; }
  int d() const { return d_; }
  std::uint64_t size() const { return size_; }

  /// coeff_{d-1}(t^k mod r) for 0 <= k < 2d - 1.
  Elem hankel(int k) const { return hankel_[static_cast<size_t>(k)]; }
  /// mu_j(b) = coeff_{d-1}(b t^j mod r), so psi(b x / r) = zeta^{Tr(sum_j mu_j x_j)}.
  std::vector<Elem> functional(const Poly& b) const;
  int psi_exp(const std::vector<Elem>& mu, const Elem* x) const {
    Elem s = 0;
    for (int j = 0; j < d_; ++j) s = f_->add(s, f_->mul(mu[j], x[j]));
    return f_->trace(s);
  }
  /// Digits of every residue, row-major (size() rows of d()).
  /// Built on first use; throws std::length_error past 2^24 residues.
  const std::vector<Elem>& digits() const;
  /// Digits of x^3 mod r for every residue x, row-major.
  const std::vector<Elem>& cubes() const;

 private:
  const Field* f_;
  Poly r_;
  int d_;
  std::uint64_t size_;
  std::vector<Elem> hankel_;
  mutable std::vector<Elem> digits_;
  mutable std::vector<Elem> cubes_;
};

/// Ring map Z[zeta_p] -> F_l with zeta -> omega, l a 61-bit prime = 1 mod p.
/// Values known to be rational integers of absolute value < l/2 are recovered
/// exactly by lift().
class ZetaModMap {
 public:
  /// `which` selects among distinct primes so two maps can cross-check.
  ZetaModMap(int p, int which = 0);
  std::uint64_t prime() const { return l_; }
  std::uint64_t omega_pow(int k) const { return pw_[static_cast<size_t>(k)]; }
  std::uint64_t eval(const ZetaSum& z) const;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= l_ ? s - l_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + l_ - b; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % l_);
  }
  std::uint64_t from_int(long long v) const;
  long long lift(std::uint64_t v) const;

 private:
  std::uint64_t l_ = 0;
  std::vector<std::uint64_t> pw_;
};

}  // namespace ffc
