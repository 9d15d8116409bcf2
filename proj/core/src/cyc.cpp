#include "ffcubes/cyc.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ffc {

namespace {

long long mod_p(long long k, int p) {
  long long r = k % p;
  return r < 0 ? r + p : r;
}

// Reduce a length-p group-ring vector to the power basis of length p-1.
std::vector<mpq_class> reduce(const std::vector<mpq_class>& g) {
  int p = static_cast<int>(g.size());
  std::vector<mpq_class> c(static_cast<size_t>(p - 1));
  for (int i = 0; i < p - 1; ++i) c[i] = g[i] - g[p - 1];
  return c;
}

}  // namespace

mpq_class qpow(int q, long long e) {
  mpz_class z;
  mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return mpq_class(z);
  mpq_class r(mpz_class(1), z);
  r.canonicalize();
  return r;
}

CycNum::CycNum(int p) : p_(p), c_(static_cast<size_t>(p - 1)) {
  if (p < 2) throw std::invalid_argument("CycNum needs a prime p");
}

CycNum CycNum::rational(int p, const mpq_class& v) {
  CycNum z(p);
  z.c_[0] = v;
  return z;
}

CycNum CycNum::zeta_pow(int p, long long k) {
  CycNum z(p);
  long long e = mod_p(k, p);
  if (e == p - 1) {
    for (auto& x : z.c_) x = -1;
  } else {
    z.c_[static_cast<size_t>(e)] = 1;
  }
  return z;
}

CycNum CycNum::from_basis(int p, std::vector<mpq_class> c) {
  if (static_cast<int>(c.size()) != p - 1) throw std::invalid_argument("CycNum basis length must be p-1");
  CycNum z;
  z.p_ = p;
  z.c_ = std::move(c);
  for (auto& x : z.c_) x.canonicalize();
  return z;
}

void CycNum::adopt(int p) {
  if (p_ == 0 && p != 0) {
    p_ = p;
    c_.assign(static_cast<size_t>(p - 1), mpq_class(0));
  }
}

bool CycNum::is_zero() const {
  for (const auto& x : c_)
    if (x != 0) return false;
  return true;
}

bool CycNum::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

mpq_class CycNum::to_rational() const {
  if (!is_rational()) throw std::domain_error("CycNum is not rational: " + str());
  return c_.empty() ? mpq_class(0) : c_[0];
}

CycNum CycNum::galois(long long k) const {
  if (p_ == 0) return *this;
  if (mod_p(k, p_) == 0) throw std::invalid_argument("galois exponent divisible by p");
  std::vector<mpq_class> g(static_cast<size_t>(p_));
  for (int i = 0; i < p_ - 1; ++i) g[static_cast<size_t>(mod_p(i * k, p_))] += c_[i];
  CycNum r;
  r.p_ = p_;
  r.c_ = reduce(g);
  return r;
}

std::complex<double> CycNum::embed(long long k) const {
  std::complex<double> s = 0;
  for (int i = 0; i < static_cast<int>(c_.size()); ++i) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(mod_p(i * k, p_)) / p_;
    s += c_[i].get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return s;
}

CycNum& CycNum::operator+=(const CycNum& o) {
  if (o.p_ == 0) return *this;
  adopt(o.p_);
  if (p_ != o.p_) throw std::invalid_argument("CycNum prime mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

CycNum& CycNum::operator-=(const CycNum& o) {
  if (o.p_ == 0) return *this;
  adopt(o.p_);
  if (p_ != o.p_) throw std::invalid_argument("CycNum prime mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

CycNum& CycNum::operator*=(const CycNum& o) {
  if (p_ == 0) return *this;
  if (o.p_ == 0) {
    for (auto& x : c_) x = 0;
    return *this;
  }
  if (p_ != o.p_) throw std::invalid_argument("CycNum prime mismatch");
  std::vector<mpq_class> g(static_cast<size_t>(p_));
  for (int i = 0; i < p_ - 1; ++i) {
    if (c_[i] == 0) continue;
    for (int j = 0; j < p_ - 1; ++j) {
      if (o.c_[j] == 0) continue;
      g[static_cast<size_t>((i + j) % p_)] += c_[i] * o.c_[j];
    }
  }
  c_ = reduce(g);
  return *this;
}

CycNum& CycNum::operator*=(const mpq_class& s) {
  for (auto& x : c_) x *= s;
  return *this;
}

CycNum CycNum::operator-() const {
  CycNum r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

bool operator==(const CycNum& a, const CycNum& b) {
  if (a.p_ == 0) return b.is_zero();
  if (b.p_ == 0) return a.is_zero();
  return a.p_ == b.p_ && a.c_ == b.c_;
}

std::string CycNum::str() const {
  if (p_ == 0 || is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0) {
      os << c_[i].get_str();
    } else {
      os << "(" << c_[i].get_str() << ")*z^" << i;
    }
  }
  return os.str();
}

AbsSq abs_sq(const CycNum& z) {
  if (z.p() == 0) return {mpq_class(0), true};
  CycNum w = z * z.conj();
  if (w.is_rational()) return {w.to_rational(), true};
  // |sigma(w)| <= sum of |coefficients| since every zeta^i has modulus 1.
  mpq_class bound = 0;
  for (const auto& c : w.coeffs()) bound += abs(c);
  return {bound, false};
}

ZetaSum& ZetaSum::operator+=(const ZetaSum& o) {
  if (c_.empty()) c_.assign(o.c_.size(), 0);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

ZetaSum& ZetaSum::operator-=(const ZetaSum& o) {
  if (c_.empty()) c_.assign(o.c_.size(), 0);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

ZetaSum& ZetaSum::scale(std::int64_t s) {
  for (auto& x : c_) x *= s;
  return *this;
}

ZetaSum operator*(const ZetaSum& a, const ZetaSum& b) {
  int p = a.p();
  ZetaSum r(p);
  for (int i = 0; i < p; ++i) {
    if (a.c_[i] == 0) continue;
    for (int j = 0; j < p; ++j) {
      int k = i + j;
      if (k >= p) k -= p;
      r.c_[k] += a.c_[i] * b.c_[j];
    }
  }
  return r;
}

bool ZetaSum::is_zero() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != c_[0]) return false;
  return true;
}

std::int64_t ZetaSum::total() const {
  std::int64_t s = 0;
  for (auto x : c_) s += x;
  return s;
}

CycNum ZetaSum::to_cyc() const { return to_cyc_scaled(mpq_class(1)); }

CycNum ZetaSum::to_cyc_scaled(const mpq_class& s) const {
  int p = this->p();
  std::vector<mpq_class> c(static_cast<size_t>(p - 1));
  for (int i = 0; i < p - 1; ++i) c[i] = mpq_class(static_cast<long>(c_[i] - c_[p - 1])) * s;
  return CycNum::from_basis(p, std::move(c));
}

}  // namespace ffc
