#include "ffcubes/expsums.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ffc {

namespace {

CycNum int_value(int p, const mpz_class& v) { return CycNum::rational(p, mpq_class(v)); }

CycNum int_value(int p, long long v) { return CycNum::rational(p, mpq_class(static_cast<long>(v))); }

mpz_class qpow_z(int q, int e) {
  mpz_class z;
  mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(e));
  return z;
}

// (a / lc(r), monic r): the sum over |x| < |r| only sees the ratio.
std::pair<Poly, Poly> normalize(const Poly& a, const Poly& r) {
  if (r.is_zero()) throw std::invalid_argument("modulus must be nonzero");
  Elem u = r.field()->inv(r.lc());
  return {a.scaled(u), r.scaled(u)};
}

// coeff_{d-1}(a t^j mod r) for j < d, by polynomial arithmetic.
std::vector<Elem> top_columns(const Poly& a, const Poly& r) {
  const int d = r.deg();
  std::vector<Elem> mu(static_cast<size_t>(d));
  Poly v = a % r;
  Poly t = Poly::t(r.field());
  for (int j = 0; j < d; ++j) {
    mu[j] = v.coeff(d - 1);
    v = (v * t) % r;
  }
  return mu;
}

// Odometer over the digit vectors of F_q^d in index order; calls
// visit(step_digit) after each increment, where step_digit is the lowest
// digit position that changed.
template <class Visit>
void odometer(int q, int d, std::vector<Elem>& x, Visit&& visit) {
  x.assign(static_cast<size_t>(d), 0);
  while (true) {
    int j = 0;
    while (j < d && x[j] == static_cast<Elem>(q - 1)) {
      x[j] = 0;
      ++j;
    }
    if (j == d) return;
    ++x[j];
    visit(j);
  }
}

// Sum of zeta^{Tr(s)} over x in (O/r) where s = sum_j mu_j x_j; `skip` holds
// the reduction of x mod w (tracked when w is given) and zero classes are skipped.
CycNum direct_linear(const Poly& a, const Poly& r, const Poly* w) {
  const Field& f = *r.field();
  const int d = r.deg();
  const int p = f.p();
  ZetaSum s(p);
  if (d == 0) {
    s.add_power(0);
    return s.to_cyc();
  }
  auto mu = top_columns(a, r);
  const int e = w ? w->deg() : 0;
  // x mod w, linear in the digits of x.
  std::vector<std::vector<Elem>> wcol;
  if (w) {
    Poly tj = Poly::constant(&f, 1);
    for (int j = 0; j < d; ++j) {
      Poly m = tj % *w;
      std::vector<Elem> col(static_cast<size_t>(e));
      for (int i = 0; i < e; ++i) col[i] = m.coeff(i);
      wcol.push_back(col);
      tj = tj * Poly::t(&f);
    }
  }
  std::vector<Elem> x;
  std::vector<Elem> red(static_cast<size_t>(e), 0);
  Elem acc = 0;
  auto count = [&]() {
    if (w) {
      bool zero = true;
      for (Elem v : red)
        if (v) zero = false;
      if (zero) return;
    }
    s.add_power(f.trace(acc));
  };
  count();  // x = 0
  std::vector<Elem> prev(static_cast<size_t>(d), 0);
  odometer(f.q(), d, x, [&](int j) {
    for (int i = 0; i <= j; ++i) {
      Elem delta = f.sub(x[i], prev[i]);
      if (!delta) continue;
      acc = f.add(acc, f.mul(delta, mu[i]));
      if (w)
        for (int k = 0; k < e; ++k) red[k] = f.add(red[k], f.mul(delta, wcol[i][k]));
      prev[i] = x[i];
    }
    count();
  });
  return s.to_cyc();
}

bool functional_zero(const Poly& a, const Poly& r) {
  if (r.deg() == 0) return true;
  ResidueCtx R(r);
  for (Elem v : R.functional(a))
    if (v) return false;
  return true;
}

void check_irreducible(const Poly& w, int k) {
  if (k < 1) throw std::invalid_argument("prime power exponent must be >= 1");
  if (!w.is_monic() || !is_irreducible(w)) throw std::invalid_argument("ramanujan_sum needs a monic irreducible");
}

}  // namespace

CycNum linear_full_sum(const Poly& a, const Poly& r) {
  auto [an, rn] = normalize(a, r);
  const int p = r.field()->p();
  if (!divides(rn, an)) return CycNum(p);
  return int_value(p, qpow_z(r.field()->q(), rn.deg()));
}

CycNum linear_full_sum_brute(const Poly& a, const Poly& r) {
  auto [an, rn] = normalize(a, r);
  return direct_linear(an, rn, nullptr);
}

CycNum linear_full_sum_functional(const Poly& a, const Poly& r) {
  auto [an, rn] = normalize(a, r);
  const int p = r.field()->p();
  if (!functional_zero(an, rn)) return CycNum(p);
  return int_value(p, qpow_z(r.field()->q(), rn.deg()));
}

CycNum ramanujan_sum(const Poly& a, const Poly& w, int k) {
  check_irreducible(w, k);
  const Field* f = w.field();
  const int p = f->p();
  const Poly wk1 = pow(w, static_cast<unsigned>(k - 1));
  if (!divides(wk1, a)) return CycNum(p);
  mpz_class base = qpow_z(f->q(), w.deg() * (k - 1));
  if (divides(wk1 * w, a)) return int_value(p, base * (qpow_z(f->q(), w.deg()) - 1));
  return int_value(p, -base);
}

CycNum ramanujan_sum_brute(const Poly& a, const Poly& w, int k) {
  check_irreducible(w, k);
  return direct_linear(a, pow(w, static_cast<unsigned>(k)), &w);
}

CycNum ramanujan_sum_functional(const Poly& a, const Poly& w, int k) {
  check_irreducible(w, k);
  const Field* f = w.field();
  const int p = f->p();
  const Poly wk1 = pow(w, static_cast<unsigned>(k - 1));
  mpz_class v = 0;
  if (functional_zero(a, wk1 * w)) v += qpow_z(f->q(), w.deg() * k);
  if (functional_zero(a, wk1)) v -= qpow_z(f->q(), w.deg() * (k - 1));
  return int_value(p, v);
}

std::vector<std::uint64_t> unit_residues(const Poly& r) {
  if (!r.is_monic()) throw std::invalid_argument("modulus must be monic");
  const Field* f = r.field();
  const std::uint64_t size = ipow_u64(static_cast<std::uint64_t>(f->q()), r.deg());
  std::vector<std::uint64_t> out;
  if (r.deg() == 0) {
    out.push_back(0);
    return out;
  }
  Factorization fac = factor(r);
  for (std::uint64_t i = 1; i < size; ++i) {
    Poly x = Poly::from_index(f, i);
    bool unit = true;
    for (const auto& [w, e] : fac.factors) {
      (void)e;
      if (divides(w, x)) {
        unit = false;
        break;
      }
    }
    if (unit) out.push_back(i);
  }
  return out;
}

std::uint64_t totient(const Poly& r) {
  std::uint64_t phi = 1;
  const std::uint64_t q = static_cast<std::uint64_t>(r.field()->q());
  for (const auto& [w, e] : factor(r).factors) {
    std::uint64_t nw = ipow_u64(q, w.deg());
    phi *= (nw - 1) * ipow_u64(nw, e - 1);
  }
  return phi;
}

ZetaSum one_dim_sum(const ResidueCtx& R, const Poly& b, const Poly& c) {
  const Field& f = R.field();
  const int d = R.d();
  ZetaSum s(f.p());
  if (d == 0) {
    s.add_power(0);
    return s;
  }
  auto mb = R.functional(b);
  auto mc = R.functional(c);
  const auto& dg = R.digits();
  const auto& cb = R.cubes();
  for (std::uint64_t x = 0; x < R.size(); ++x) {
    const Elem* xd = &dg[x * d];
    const Elem* xc = &cb[x * d];
    Elem acc = 0;
    for (int j = 0; j < d; ++j) acc = f.add(acc, f.add(f.mul(mb[j], xc[j]), f.mul(mc[j], xd[j])));
    s.add_power(f.trace(acc));
  }
  return s;
}

CycNum S_r_ac(const Poly& B, const Poly& r, const Poly& a, const Poly& c) {
  if (!gcd(a, r).is_one()) throw std::invalid_argument("S_r(a,c) needs gcd(a, r) = 1");
  ResidueCtx R(r);
  return one_dim_sum(R, a * B, c).to_cyc();
}

mpz_class S_r_c_bound(const DiagonalForm& F, const Poly& r) {
  mpz_class b = totient(r);
  b *= qpow_z(F.field()->q(), r.deg() * F.n());
  return b;
}

namespace {

long long zeta_sum_integer(const ZetaSum& z) {
  for (int k = 2; k < z.p(); ++k)
    if (z[k] != z[1]) throw std::logic_error("S_r(c) is not a rational integer");
  return z[0] - z[1];
}

void check_dims(const DiagonalForm& F, const std::vector<Poly>& c) {
  if (static_cast<int>(c.size()) != F.n()) throw std::invalid_argument("frequency vector has the wrong dimension");
}

}  // namespace

long long S_r_c_int(const DiagonalForm& F, const Poly& r, const std::vector<Poly>& c) {
  check_dims(F, c);
  const Field* f = F.field();
  mpz_class bound = S_r_c_bound(F, r);
  ResidueCtx R(r);
  auto units = unit_residues(r);
  if (bound < mpz_class(1) << 62) {
    ZetaSum total(f->p());
    for (auto ai : units) {
      Poly a = Poly::from_index(f, ai);
      ZetaSum prod = one_dim_sum(R, a * F[0], c[0]);
      for (int i = 1; i < F.n(); ++i) prod = prod * one_dim_sum(R, a * F[i], c[i]);
      total += prod;
    }
    return zeta_sum_integer(total);
  }
  if (bound >= mpz_class(1) << 60) throw std::length_error("S_r(c) too large for the modular embedding");
  ZetaModMap M(f->p());
  std::uint64_t total = 0;
  for (auto ai : units) {
    Poly a = Poly::from_index(f, ai);
    std::uint64_t prod = 1;
    for (int i = 0; i < F.n(); ++i) prod = M.mul(prod, M.eval(one_dim_sum(R, a * F[i], c[i])));
    total = M.add(total, prod);
  }
  return M.lift(total);
}

CycNum S_r_c(const DiagonalForm& F, const Poly& r, const std::vector<Poly>& c) {
  return int_value(F.field()->p(), S_r_c_int(F, r, c));
}

CycNum S_r_c_brute(const DiagonalForm& F, const Poly& r, const std::vector<Poly>& c) {
  check_dims(F, c);
  const Field* f = F.field();
  const int n = F.n();
  const int d = r.deg();
  const std::uint64_t size = ipow_u64(static_cast<std::uint64_t>(f->q()), d);
  const std::uint64_t total = ipow_u64(size, n);
  ZetaSum s(f->p());
  std::vector<Poly> xs(static_cast<size_t>(size));
  for (std::uint64_t i = 0; i < size; ++i) xs[i] = Poly::from_index(f, i);
  for (auto ai : unit_residues(r)) {
    Poly a = Poly::from_index(f, ai);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t v = idx;
      std::vector<Poly> x(static_cast<size_t>(n));
      Poly lin(f);
      for (int i = 0; i < n; ++i) {
        x[i] = xs[v % size];
        v /= size;
        lin += c[i] * x[i];
      }
      Poly y = (a * F.eval(x) + lin) % r;
      s.add_power(d == 0 ? 0 : f->trace(y.coeff(d - 1)));
    }
  }
  return s.to_cyc();
}

std::vector<long long> S_r_box(const DiagonalForm& F, const Poly& r, const std::vector<std::vector<Poly>>& cands,
                               int which) {
  const int n = F.n();
  if (static_cast<int>(cands.size()) != n) throw std::invalid_argument("one candidate list per coordinate");
  const Field* f = F.field();
  ZetaModMap M(f->p(), which);
  if (S_r_c_bound(F, r) * 2 >= mpz_class(std::to_string(M.prime())))
    throw std::length_error("S_r(c) bound exceeds the modular embedding");
  ResidueCtx R(r);
  auto units = unit_residues(r);
  const size_t A = units.size();
  // s[i][ci * A + a]
  std::vector<std::vector<std::uint64_t>> s(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    s[i].resize(cands[i].size() * A);
    for (size_t ai = 0; ai < A; ++ai) {
      Poly b = Poly::from_index(f, units[ai]) * F[i];
      for (size_t ci = 0; ci < cands[i].size(); ++ci) s[i][ci * A + ai] = M.eval(one_dim_sum(R, b, cands[i][ci]));
    }
  }
  // Left block: coordinates [0, h), right block [h, n).
  const int h = (n + 1) / 2;
  auto block = [&](int lo, int hi) {
    size_t count = 1;
    for (int i = lo; i < hi; ++i) count *= cands[i].size();
    std::vector<std::uint64_t> out(count * A, 1);
    for (size_t idx = 0; idx < count; ++idx) {
      size_t v = idx;
      for (int i = lo; i < hi; ++i) {
        size_t ci = v % cands[i].size();
        v /= cands[i].size();
        for (size_t a = 0; a < A; ++a) out[idx * A + a] = M.mul(out[idx * A + a], s[i][ci * A + a]);
      }
    }
    return std::make_pair(count, out);
  };
  auto [nl, L] = block(0, h);
  auto [nr, Rb] = block(h, n);
  std::vector<long long> result(nl * nr);
  const unsigned __int128 l = M.prime();
  for (size_t cr = 0; cr < nr; ++cr) {
    const std::uint64_t* rv = &Rb[cr * A];
    for (size_t cl = 0; cl < nl; ++cl) {
      const std::uint64_t* lv = &L[cl * A];
      unsigned __int128 acc = 0;
      std::uint64_t red = 0;
      for (size_t a = 0; a < A; ++a) {
        acc += static_cast<unsigned __int128>(lv[a]) * rv[a];
        if ((a & 15) == 15) {
          red = M.add(red, static_cast<std::uint64_t>(acc % l));
          acc = 0;
        }
      }
      red = M.add(red, static_cast<std::uint64_t>(acc % l));
      result[cl + nl * cr] = M.lift(red);
    }
  }
  return result;
}

mpq_class bracket(const Poly& r, const Poly& c) {
  if (!r.is_monic()) throw std::invalid_argument("bracket needs a monic modulus");
  const int q = r.field()->q();
  mpq_class out = 1;
  for (const auto& [w, k] : factor(r).factors) {
    if (k < 2) throw std::invalid_argument("bracket needs a square-full modulus");
    if (k >= 3 && !c.is_zero() && valuation(c, w) == 1) {
      out *= qpow(q, -w.deg());
    } else {
      out *= qpow(q, deg_gcd(pow(w, static_cast<unsigned>(k)), c));
    }
  }
  return out;
}

VanishingReport vanishing_check(const DiagonalForm& F, const Poly& w, int k, const std::vector<Poly>& c) {
  if (k < 2) throw std::invalid_argument("vanishing_check needs k >= 2");
  if (!w.is_monic() || !is_irreducible(w)) throw std::invalid_argument("vanishing_check needs a monic irreducible");
  VanishingReport rep;
  rep.value = S_r_c_int(F, pow(w, static_cast<unsigned>(k)), c);
  rep.sum_is_zero = rep.value == 0;
  Poly dual = F.field()->p() == 2 ? dual_eval(F, c).value : dual_square(F, c);
  rep.divides = divides(w, dual);
  return rep;
}

CycNum weyl_sum(const Laurent& alpha, int B) {
  const Field* f = alpha.field();
  if (B < 0) throw std::invalid_argument("B must be >= 0");
  if (B == 0) return CycNum::rational(f->p(), 1);
  const int top = 3 * B - 3;
  std::vector<Elem> ad(static_cast<size_t>(top + 1));
  for (int j = 0; j <= top; ++j) {
    if (!alpha.exact() && -1 - j < alpha.floor())
      throw std::domain_error("weyl_sum: alpha not known to sufficient precision");
    ad[j] = alpha.digit(-1 - j);
  }
  ZetaSum s(f->p());
  const std::uint64_t size = ipow_u64(static_cast<std::uint64_t>(f->q()), B);
  for (std::uint64_t i = 0; i < size; ++i) {
    Poly x = Poly::from_index(f, i);
    Poly x3 = x * x * x;
    Elem acc = 0;
    for (int j = 0; j <= x3.deg(); ++j) acc = f->add(acc, f->mul(ad[j], x3.coeff(j)));
    s.add_power(f->trace(acc));
  }
  return s.to_cyc();
}

CycNum T_r_j(const SpecialSetup& s, const Poly& r, const Poly& j1, const Poly& j2) {
  const Field* f = r.field();
  ResidueCtx R(r);
  const int d = R.d();
  const int p = f->p();
  if (d == 0) return CycNum::rational(p, 1);
  // digits of G_b(j_b, h) mod r for every residue h
  auto table = [&](const BinaryCubic& G, const Poly& j) {
    Poly A0 = (G.g[0] * j * j * j) % r, A1 = (G.g[1] * j * j) % r, A2 = (G.g[2] * j) % r, A3 = G.g[3] % r;
    std::vector<Elem> out(R.size() * d);
    for (std::uint64_t i = 0; i < R.size(); ++i) {
      Poly h = Poly::from_index(f, i);
      Poly v = (A0 + ((A1 + ((A2 + A3 * h) % r) * h) % r) * h) % r;
      for (int k = 0; k < d; ++k) out[i * d + k] = v.coeff(k);
    }
    return out;
  };
  auto t1 = table(s.G1, j1), t2 = table(s.G2, j2);
  ZetaSum total(p);
  for (auto ai : unit_residues(r)) {
    auto mu = R.functional(Poly::from_index(f, ai));
    ZetaSum a(p), b(p);
    for (std::uint64_t i = 0; i < R.size(); ++i) {
      Elem e1 = 0, e2 = 0;
      for (int k = 0; k < d; ++k) {
        e1 = f->add(e1, f->mul(mu[k], t1[i * d + k]));
        e2 = f->add(e2, f->mul(mu[k], t2[i * d + k]));
      }
      a.add_power(f->trace(e1));
      b.add_power(f->trace(e2));
    }
    total += a * b;
  }
  return int_value(p, zeta_sum_integer(total));
}

std::optional<CycNum> T_r_j_closed(const SpecialSetup& s, const Poly& w, const Poly& j1, const Poly& j2) {
  const Field* f = w.field();
  Poly bad = Poly::constant(f, f->from_int(6)) * s.lambda * s.mu * j1 * j2;
  for (const auto& rho : s.rho) bad = bad * rho;
  if (bad.is_zero() || divides(w, bad)) return std::nullopt;
  const int p = f->p();
  const mpz_class W = qpow_z(f->q(), w.deg());
  Poly f0 = s.F0(j1, j2);
  if (!divides(w, f0)) return CycNum(p);
  if (!divides(w * w, f0)) return int_value(p, mpz_class(-W * W * W));
  return int_value(p, mpz_class(W * W * W * W - W * W * W));
}

std::vector<HasseWeilRow> avg_hasse_weil(const DiagonalForm& F, const std::vector<Poly>& c, int Z) {
  if (F.n() % 2 != 0) throw std::invalid_argument("avg_hasse_weil needs n even");
  DualEval de = dual_eval(F, c);
  if (de.value.is_zero()) throw std::invalid_argument("avg_hasse_weil needs F*(c) != 0");
  const Field* f = F.field();
  Poly bad = F.disc() * de.value;
  std::vector<HasseWeilRow> rows;
  double running = 0;
  for (int d = 0; d <= Z; ++d) {
    long long sum = 0;
    for (const Poly& r : monic_enum(f, d)) {
      if (!gcd(r, bad).is_one()) continue;
      long long v = S_r_c_int(F, r, c);
      sum += v;
    }
    running += static_cast<double>(sum) / std::pow(static_cast<double>(f->q()), d * (F.n() + 1) / 2.0);
    rows.push_back({d, sum, running, std::pow(static_cast<double>(f->q()), d / 2.0)});
  }
  return rows;
}

SquarefullReport avg_squarefull(const DiagonalForm& F, const std::vector<int>& T, const std::vector<int>& C, int Y) {
  if (T.size() != C.size()) throw std::invalid_argument("one degree per index in T");
  const Field* f = F.field();
  const int n = F.n();
  for (int i : T)
    if (i < 0 || i >= n) throw std::invalid_argument("index out of range");
  SquarefullReport rep;
  std::vector<Poly> moduli;
  for (const Poly& r : monic_enum(f, Y))
    if (Y > 0 && is_square_full(r)) moduli.push_back(r);
  rep.moduli = moduli.size();
  // polynomials of exact degree C_i
  std::vector<std::vector<Poly>> lists;
  for (int Ci : C) {
    std::vector<Poly> l;
    const std::uint64_t lo = ipow_u64(static_cast<std::uint64_t>(f->q()), Ci);
    for (std::uint64_t i = lo; i < lo * static_cast<std::uint64_t>(f->q()); ++i) l.push_back(Poly::from_index(f, i));
    lists.push_back(std::move(l));
  }
  std::uint64_t total = 1;
  for (const auto& l : lists) total *= l.size();
  rep.tuples = total;
  std::vector<Poly> c(static_cast<size_t>(n), Poly(f));
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t v = idx;
    for (size_t k = 0; k < T.size(); ++k) {
      c[T[k]] = lists[k][v % lists[k].size()];
      v /= lists[k].size();
    }
    if (dual_is_zero(F, c)) continue;
    ++rep.counted;
    for (const Poly& r : moduli) {
      mpz_class s = static_cast<long>(S_r_c_int(F, r, c));
      rep.sum_abs += abs(s);
      rep.sum_sq += s * s;
    }
  }
  const double t = static_cast<double>(T.size());
  double norm = std::pow(static_cast<double>(f->q()), Y * (1.0 + n / 2.0 + (n - t) / 6.0)) * static_cast<double>(total);
  rep.ratio = norm > 0 ? rep.sum_abs.get_d() / norm : 0.0;
  return rep;
}

namespace {

std::vector<Poly> irreducibles_upto(const Field* f, int max_deg) {
  std::vector<Poly> out;
  for (int d = 1; d <= max_deg; ++d)
    for (auto& w : irreducible_enum(f, d)) out.push_back(w);
  return out;
}

AuditRow make_row(const std::string& family, const Poly& r, const std::string& c, const CycNum& value,
                  double bound_sq) {
  AuditRow row;
  row.family = family;
  row.r = format(r);
  row.c = c;
  AbsSq a = abs_sq(value);
  row.abs_sq = a.value;
  if (!a.exact) row.family += "-embedding-bound";
  row.bound_sq = bound_sq;
  row.ratio = std::sqrt(a.value.get_d() / bound_sq);
  return row;
}

// Indices 0..size-1, or `samples` random ones when sampling is requested and smaller.
std::vector<std::uint64_t> pick(std::uint64_t size, int samples, std::mt19937_64& rng) {
  std::vector<std::uint64_t> out;
  if (samples <= 0 || static_cast<std::uint64_t>(samples) >= size) {
    for (std::uint64_t i = 0; i < size; ++i) out.push_back(i);
    return out;
  }
  std::uniform_int_distribution<std::uint64_t> dist(0, size - 1);
  for (int i = 0; i < samples; ++i) out.push_back(dist(rng));
  return out;
}

}  // namespace

std::vector<AuditRow> audit_bounds(const std::string& family, const DiagonalForm& F, int max_deg, int max_k,
                                   int samples, std::uint64_t seed) {
  const Field* f = F.field();
  const double q = f->q();
  std::mt19937_64 rng(seed);
  std::vector<AuditRow> rows;
  if (family == "trivial") {
    Poly one = Poly::constant(f, 1);
    std::vector<Poly> c(static_cast<size_t>(F.n()), Poly(f));
    rows.push_back(make_row("trivial", one, "0", S_r_c(F, one, c), 1.0));
    return rows;
  }
  if (family == "hua" || family == "prime-power") {
    const bool hua = family == "hua";
    for (const Poly& w : irreducibles_upto(f, max_deg)) {
      for (int k = hua ? 1 : 2; k <= max_k; ++k) {
        Poly r = pow(w, static_cast<unsigned>(k));
        ResidueCtx R(r);
        auto units = unit_residues(r);
        const double W = std::pow(q, w.deg());
        for (auto ci : pick(R.size(), samples, rng)) {
          Poly c = Poly::from_index(f, ci);
          double bsq;
          if (hua) {
            int g = deg_gcd(gcd(r, F[0]), c);
            bsq = std::pow(W, 4.0 * k / 3.0) * std::pow(q, 2.0 * g / 3.0);
          } else {
            bsq = std::pow(W, static_cast<double>(k)) * std::sqrt(bracket(r, c).get_d());
          }
          for (auto ai : pick(units.size(), samples, rng)) {
            Poly a = Poly::from_index(f, units[ai]);
            CycNum v = one_dim_sum(R, a * F[0], c).to_cyc();
            rows.push_back(make_row(family, r, "a=" + format(a) + " c=" + format(c), v, bsq));
          }
        }
      }
    }
    return rows;
  }
  if (family == "deligne") {
    const int n = F.n();
    for (const Poly& w : irreducibles_upto(f, max_deg)) {
      const std::uint64_t box = ipow_u64(static_cast<std::uint64_t>(f->q()), w.deg() + 1);
      std::uniform_int_distribution<std::uint64_t> dist(0, box - 1);
      const double W = std::pow(q, w.deg());
      for (int s = 0; s < std::max(samples, 1); ++s) {
        std::vector<Poly> c(static_cast<size_t>(n));
        std::string cs;
        for (int i = 0; i < n; ++i) {
          c[i] = Poly::from_index(f, dist(rng));
          cs += (i ? " " : "") + format(c[i]);
        }
        Poly dual = f->p() == 2 ? dual_eval(F, c).value : dual_square(F, c);
        bool singular = divides(w, dual);
        // (w, grad F*(c)) is 1 or w; the singular rows take the larger value.
        double bsq = std::pow(W, n + 1.0) * (singular ? W : 1.0);
        rows.push_back(make_row(singular ? "deligne-singular" : "deligne", w, cs, S_r_c(F, w, c), bsq));
      }
    }
    return rows;
  }
  throw std::invalid_argument("unknown audit family: " + family);
}

std::string audit_csv(const std::vector<AuditRow>& rows, int q, int n) {
  std::ostringstream os;
  os << "family,q,n,r,c,|S|^2,bound^2,ratio\n";
  for (const auto& r : rows)
    os << r.family << ',' << q << ',' << n << ',' << r.r << ',' << r.c << ',' << r.abs_sq.get_str() << ','
       << r.bound_sq << ',' << r.ratio << '\n';
  return os.str();
}

}  // namespace ffc
