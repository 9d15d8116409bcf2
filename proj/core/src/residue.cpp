#include "ffcubes/residue.hpp"

#include <stdexcept>

namespace ffc {

ResidueCtx::ResidueCtx(const Poly& r) : f_(r.field()), r_(r), d_(r.deg()) {
  if (!r.is_monic() || d_ < 0) throw std::invalid_argument("residue modulus must be monic");
  size_ = ipow_u64(static_cast<std::uint64_t>(f_->q()), d_);
  if (d_ > 0) {
    hankel_.resize(static_cast<size_t>(2 * d_ - 1));
    Poly tk = Poly::constant(f_, 1);
    Poly t = Poly::t(f_);
    for (int k = 0; k < 2 * d_ - 1; ++k) {
      hankel_[k] = (tk % r_).coeff(d_ - 1);
      tk = (tk * t) % r_;
    }
  }
}

const std::vector<Elem>& ResidueCtx::digits() const {
  if (!digits_.empty() || d_ == 0) return digits_;
  if (size_ > (1ull << 24)) throw std::length_error("residue ring too large for a digit table");
  digits_.resize(size_ * static_cast<size_t>(d_));
  const std::uint64_t q = static_cast<std::uint64_t>(f_->q());
  for (std::uint64_t i = 0; i < size_; ++i) {
    std::uint64_t v = i;
    for (int j = 0; j < d_; ++j) {
      digits_[i * d_ + j] = static_cast<Elem>(v % q);
      v /= q;
    }
  }
  return digits_;
}

std::vector<Elem> ResidueCtx::functional(const Poly& b) const {
  std::vector<Elem> mu(static_cast<size_t>(d_), 0);
  Poly br = b % r_;
  for (int j = 0; j < d_; ++j) {
    Elem s = 0;
    for (int i = 0; i <= br.deg(); ++i) s = f_->add(s, f_->mul(br.coeff(i), hankel_[i + j]));
    mu[j] = s;
  }
  return mu;
}

const std::vector<Elem>& ResidueCtx::cubes() const {
  if (!cubes_.empty() || d_ == 0) return cubes_;
  const auto& dg = digits();
  cubes_.resize(dg.size());
  for (std::uint64_t i = 0; i < size_; ++i) {
    Poly x(f_, std::vector<Elem>(dg.begin() + i * d_, dg.begin() + (i + 1) * d_));
    Poly c = (x * x % r_) * x % r_;
    for (int j = 0; j < d_; ++j) cubes_[i * d_ + j] = c.coeff(j);
  }
  return cubes_;
}

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t sp : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
    if (n % sp == 0) return n == sp;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod_u(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

}  // namespace

ZetaModMap::ZetaModMap(int p, int which) {
  const std::uint64_t top = (1ull << 61);
  std::uint64_t k = top / static_cast<std::uint64_t>(p);
  int found = -1;
  while (true) {
    std::uint64_t cand = k * static_cast<std::uint64_t>(p) + 1;
    if (cand < top && is_prime_u64(cand) && ++found == which) {
      l_ = cand;
      break;
    }
    --k;
  }
  std::uint64_t omega = 1;
  for (std::uint64_t g = 2; omega == 1; ++g) omega = powmod_u(g, (l_ - 1) / static_cast<std::uint64_t>(p), l_);
  pw_.resize(static_cast<size_t>(p));
  pw_[0] = 1;
  for (int i = 1; i < p; ++i) pw_[i] = mulmod(pw_[i - 1], omega, l_);
}

std::uint64_t ZetaModMap::from_int(long long v) const {
  if (v >= 0) return static_cast<std::uint64_t>(v) % l_;
  std::uint64_t m = static_cast<std::uint64_t>(-(v + 1)) % l_;
  return l_ - 1 - m;
}

std::uint64_t ZetaModMap::eval(const ZetaSum& z) const {
  std::uint64_t s = 0;
  for (int i = 0; i < z.p(); ++i) s = add(s, mul(from_int(z[i]), pw_[i]));
  return s;
}

long long ZetaModMap::lift(std::uint64_t v) const {
  return v > l_ / 2 ? -static_cast<long long>(l_ - v) : static_cast<long long>(v);
}

}  // namespace ffc
