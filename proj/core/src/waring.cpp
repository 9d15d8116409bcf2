#include "ffcubes/waring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ffcubes/expsums.hpp"
#include "ffcubes/residue.hpp"

namespace ffc {

namespace {

mpz_class to_mpz(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  mpz_class r = static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64));
  r <<= 64;
  r += static_cast<unsigned long>(static_cast<std::uint64_t>(u));
  return neg ? mpz_class(-r) : r;
}

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }
int ceil_div2(int v) { return -floor_div2(-v); }

/// Digits of index >= 0 as a polynomial.
Poly integer_part(const Laurent& x) {
  const Field* f = x.field();
  int tp = x.top();
  std::vector<Elem> c;
  for (int i = 0; i <= tp; ++i) c.push_back(x.digit(i));
  return Poly(f, std::move(c));
}

struct Approx {
  Poly a;
  int rel = Laurent::kNoTop;
};

/// a = integer part of r alpha, rel = log_q |r alpha - a|.
Approx approximate(const Poly& r, const Laurent& alpha) {
  Laurent ra = Laurent::from_poly(r) * alpha;
  Approx out;
  out.a = integer_part(ra);
  out.rel = (ra - Laurent::from_poly(out.a)).top();
  return out;
}

CycNum cyc_pow(const ZetaSum& s, int n) {
  CycNum base = s.to_cyc(), acc = base;
  for (int i = 1; i < n; ++i) acc *= base;
  return acc;
}

double cyc_real(const CycNum& z) { return z.p() == 0 ? 0.0 : z.embed().real(); }

}  // namespace

ArcConfig ArcConfig::waring(int B) {
  if (B < 1) throw std::invalid_argument("waring arcs need B >= 1");
  ArcConfig c;
  c.kind = Kind::waring;
  c.B = B;
  return c;
}

ArcConfig ArcConfig::wa(int degP, int degH, int degM) {
  if (degP < 1 || degH < 0 || degM < 0) throw std::invalid_argument("weak approximation arcs need deg P >= 1");
  ArcConfig c;
  c.kind = Kind::wa;
  c.degP = degP;
  c.degH = degH;
  c.degM = degM;
  return c;
}

int ArcConfig::precision() const {
  if (kind == Kind::waring) return -3 * B;
  return std::min(ceil_div2(-2 * degH - 6 * degM - 5 * degP), -2 * degP);
}

std::string ArcVerdict::witness() const {
  std::ostringstream o;
  o << (major ? "major" : "minor") << " a=" << format(a) << " r=" << format(r) << " log|r*alpha-a|=";
  if (rel_log == Laurent::kNoTop)
    o << "-inf";
  else
    o << rel_log;
  o << " bound=" << twice_bound << "/2";
  return o.str();
}

ArcVerdict arc_classify(const Field* f, const ArcConfig& cfg, const Laurent& alpha) {
  if (!alpha.exact() && alpha.floor() > cfg.precision())
    throw std::domain_error("alpha must be known down to index " + std::to_string(cfg.precision()));
  if (alpha.abs_log_bound() >= 0) throw std::domain_error("alpha must lie in T");
  ArcVerdict v;
  auto major_test = [](int rel, int twice) { return rel == Laurent::kNoTop || 2 * rel < twice; };

  if (cfg.kind == ArcConfig::Kind::waring) {
    // The Dirichlet balls at level B partition T; major arcs sit inside them.
    for (const Poly& r : monic_upto(f, cfg.B)) {
      Approx ap = approximate(r, alpha);
      if (!(ap.rel == Laurent::kNoTop || ap.rel < -cfg.B)) continue;
      if (r.deg() > 0 && !gcd(ap.a, r).is_one()) continue;
      v.a = ap.a;
      v.r = r;
      v.rel_log = ap.rel;
      v.twice_bound = -4 * cfg.B;
      v.major = major_test(ap.rel, v.twice_bound);
      return v;
    }
    throw std::logic_error("no Dirichlet approximation found");
  }

  // Weak approximation: major balls are pairwise disjoint.
  for (const Poly& r : monic_upto(f, (cfg.degP - 1) / 2)) {
    Approx ap = approximate(r, alpha);
    if (r.deg() > 0 && !gcd(ap.a, r).is_one()) continue;
    int twice = -2 * cfg.degH - 6 * cfg.degM + 2 * r.deg() - 5 * cfg.degP;
    if (major_test(ap.rel, twice)) {
      v.a = ap.a;
      v.r = r;
      v.rel_log = ap.rel;
      v.twice_bound = twice;
      v.major = true;
      return v;
    }
  }
  for (const Poly& r : monic_upto(f, cfg.degP)) {
    Approx ap = approximate(r, alpha);
    if (!(ap.rel == Laurent::kNoTop || ap.rel < -cfg.degP)) continue;
    if (r.deg() > 0 && !gcd(ap.a, r).is_one()) continue;
    v.a = ap.a;
    v.r = r;
    v.rel_log = ap.rel;
    v.twice_bound = -2 * cfg.degH - 6 * cfg.degM + 2 * r.deg() - 5 * cfg.degP;
    v.major = false;
    return v;
  }
  throw std::logic_error("no Dirichlet approximation found");
}

std::vector<SeriesRow> sing_series_waring(const Field* f, int n, const Poly& P, int Y) {
  if (n < 1 || Y < 0) throw std::invalid_argument("sing_series_waring needs n >= 1 and Y >= 0");
  const int p = f->p(), q = f->q();
  std::vector<SeriesRow> rows;
  CycNum partial = CycNum::rational(p, 0);
  for (int d = 0; d <= Y; ++d) {
    ZetaSum fast(p);
    CycNum slow = CycNum::rational(p, 0);
    const mpz_class qd = mpz_class(static_cast<unsigned long>(ipow_u64(static_cast<std::uint64_t>(q), d)));
    // |S_r(a)^n| <= |r|^n summed over phi(r) < |r| residues.
    mpz_class bound = 1;
    for (int i = 0; i <= n; ++i) bound *= qd;
    const bool fits = bound * static_cast<unsigned long>(ipow_u64(static_cast<std::uint64_t>(q), d)) <
                      (mpz_class(1) << 62);
    for (const Poly& r : monic_enum(f, d)) {
      ResidueCtx R(r);
      for (auto ai : unit_residues(r)) {
        Poly a = Poly::from_index(f, ai);
        ZetaSum s = one_dim_sum(R, a, Poly(f));
        int e = 0;
        if (d > 0) e = f->trace((-(a * P) % r).coeff(d - 1));
        if (fits) {
          ZetaSum t = s;
          for (int i = 1; i < n; ++i) t = t * s;
          ZetaSum z(p);
          z.add_power(e);
          fast += t * z;
        } else {
          slow += cyc_pow(s, n) * CycNum::zeta_pow(p, e);
        }
      }
    }
    CycNum inc = fits ? fast.to_cyc() : slow;
    inc *= qpow(q, -static_cast<long long>(n) * d);
    partial += inc;
    rows.push_back({d, inc, partial, std::abs(inc.embed())});
  }
  return rows;
}

CycNum S_tilde(const DiagonalForm& F, const Poly& M, const std::vector<Poly>& b, const Poly& r, const Poly& a) {
  const Field* f = F.field();
  if (!r.is_monic()) throw std::invalid_argument("S_tilde needs a monic modulus");
  if (static_cast<int>(b.size()) != F.n()) throw std::invalid_argument("b must have one entry per variable");
  const int p = f->p();
  if (r.deg() == 0) return CycNum::rational(p, 1);
  ResidueCtx R(r);
  const int d = R.d();
  const auto& cubes = R.cubes();
  CycNum prod = CycNum::rational(p, 1);
  for (int i = 0; i < F.n(); ++i) {
    auto mu = R.functional(a * F[i]);
    ZetaSum s(p);
    for (std::uint64_t x = 0; x < R.size(); ++x) {
      Poly y = (M * Poly::from_index(f, x) + b[static_cast<size_t>(i)]) % r;
      s.add_power(R.psi_exp(mu, &cubes[y.index() * d]));
    }
    prod *= s.to_cyc();
  }
  return prod;
}

std::vector<SeriesRow> sing_series_wa(const DiagonalForm& F, const Poly& M, const std::vector<Poly>& b, int Y) {
  if (Y < 1) throw std::invalid_argument("sing_series_wa needs Y >= 1");
  const Field* f = F.field();
  const int p = f->p(), q = f->q(), n = F.n();
  std::vector<SeriesRow> rows;
  CycNum partial = CycNum::rational(p, 0);
  for (int d = 0; d < Y; ++d) {
    CycNum inc = CycNum::rational(p, 0);
    for (const Poly& r : monic_enum(f, d))
      for (auto ai : unit_residues(r)) inc += S_tilde(F, M, b, r, Poly::from_index(f, ai));
    inc *= qpow(q, -static_cast<long long>(n) * d);
    partial += inc;
    rows.push_back({d + 1, inc, partial, std::abs(inc.embed())});
  }
  return rows;
}

namespace {

struct GradInfo {
  int grad_log = Laurent::kNoTop;
  int x_log = Laurent::kNoTop;  // log_q of an upper bound for |x0|
};

GradInfo gradient(const DiagonalForm& F, const std::vector<Laurent>& x0) {
  if (static_cast<int>(x0.size()) != F.n()) throw std::invalid_argument("x0 must have one entry per variable");
  GradInfo g;
  int unknown = Laurent::kNoTop;  // bound for components of undetermined size
  for (int i = 0; i < F.n(); ++i) {
    const Laurent& x = x0[static_cast<size_t>(i)];
    int xb = x.abs_log_bound();
    if (xb != Laurent::kNoTop) g.x_log = std::max(g.x_log, xb);
    if (F[i].is_zero()) continue;
    if (x.top() != Laurent::kNoTop) {
      g.grad_log = std::max(g.grad_log, F[i].deg() + 2 * x.abs_log());
    } else if (!x.exact()) {
      unknown = std::max(unknown, F[i].deg() + 2 * xb);
    }
  }
  if (g.grad_log == Laurent::kNoTop) throw std::domain_error("x0 is singular at the available precision");
  if (unknown != Laurent::kNoTop && unknown >= g.grad_log)
    throw std::domain_error("|grad F(x0)| is not determined at the available precision");
  return g;
}

Laurent form_value(const DiagonalForm& F, const std::vector<Laurent>& x) {
  Laurent s(F.field());
  for (int i = 0; i < F.n(); ++i) {
    const Laurent& xi = x[static_cast<size_t>(i)];
    s += Laurent::from_poly(F[i]) * (xi * xi * xi);
  }
  return s;
}

}  // namespace

SingIntegral sing_integral_wa(const DiagonalForm& F, const std::vector<Laurent>& x0, int N) {
  const Field* f = F.field();
  GradInfo g = gradient(F, x0);
  const int degH = F.height_log();
  Laurent Fx = form_value(F, x0);
  if (!Fx.is_zero() || !Fx.exact()) {
    int fb = Fx.abs_log_bound();
    if (fb != Laurent::kNoTop && fb >= g.grad_log - N)
      throw std::domain_error("x0 is not within Hensel range of a zero of F");
  }
  const int x_log = std::max(g.x_log, -N - 1);
  if (degH + x_log - N - 1 >= g.grad_log) throw std::domain_error("ball too large for the linear regime at x0");
  SingIntegral out;
  out.grad_log = g.grad_log;
  out.closed = qpow(f->q(), -static_cast<long long>(g.grad_log) - static_cast<long long>(N) * (F.n() - 1));
  out.threshold = N - g.grad_log + degH;
  return out;
}

mpq_class sing_integral_wa_truncated(const DiagonalForm& F, const std::vector<Laurent>& x0, int N, int Y,
                                     bool check_depth) {
  const Field* f = F.field();
  if (static_cast<int>(x0.size()) != F.n()) throw std::invalid_argument("x0 must have one entry per variable");
  const int degH = F.height_log();
  int x_log = -N - 1;
  for (const auto& x : x0) {
    int b = x.abs_log_bound();
    if (b != Laurent::kNoTop) x_log = std::max(x_log, b);
  }
  const int depth = std::max(N, 2 * x_log + Y);
  const double bits = static_cast<double>(F.n()) * (depth + (check_depth ? 1 : 0) - N) * std::log2(f->q());
  if (bits > 27) throw BudgetExceeded("truncated singular integral needs q^" + std::to_string(F.n() * (depth - N)) +
                                      " cells");
  std::vector<CoordBall> box;
  for (const auto& x : x0) box.push_back({x, -N});
  const int cut = degH - Y;
  CycNum v = haar_integrate_char(
      *f, box, depth,
      [&](const std::vector<Laurent>& x) { return form_value(F, x).top() < cut ? 0 : -1; }, check_depth);
  return v.to_rational() * qpow(f->q(), Y - degH);
}

mpq_class sigma_inf(const Field* f, int n, const Poly& P, int B, int K) {
  if (n < 1 || K < 1) throw std::invalid_argument("sigma_inf needs n >= 1 and K >= 1");
  if (P.deg() >= 3 * B) throw std::invalid_argument("sigma_inf needs deg P < 3B");
  const int q = f->q();
  const int L = std::max(K - 2, 0);  // x digits that fix the class of x^3
  if (static_cast<double>(n) * L * std::log2(q) > 120 || static_cast<double>(K) * std::log2(q) > 24)
    throw BudgetExceeded("sigma_inf resolution too fine");
  const std::uint64_t classes = ipow_u64(static_cast<std::uint64_t>(q), K);

  auto class_of = [&](const Laurent& y) {
    std::uint64_t idx = 0;
    for (int j = K; j >= 1; --j) idx = idx * static_cast<std::uint64_t>(q) + y.digit(-j);
    return idx;
  };
  std::vector<std::vector<Elem>> dig(classes, std::vector<Elem>(static_cast<size_t>(K)));
  for (std::uint64_t c = 0; c < classes; ++c) {
    std::uint64_t v = c;
    for (int j = 0; j < K; ++j) {
      dig[c][static_cast<size_t>(j)] = static_cast<Elem>(v % static_cast<std::uint64_t>(q));
      v /= static_cast<std::uint64_t>(q);
    }
  }
  auto add_idx = [&](std::uint64_t u, std::uint64_t v) {
    std::uint64_t idx = 0;
    for (int j = K - 1; j >= 0; --j)
      idx = idx * static_cast<std::uint64_t>(q) + f->add(dig[u][static_cast<size_t>(j)], dig[v][static_cast<size_t>(j)]);
    return idx;
  };
  auto neg_idx = [&](std::uint64_t u) {
    std::uint64_t idx = 0;
    for (int j = K - 1; j >= 0; --j) idx = idx * static_cast<std::uint64_t>(q) + f->neg(dig[u][static_cast<size_t>(j)]);
    return idx;
  };

  // Distribution of the class of x^3, x in T at L digits.
  std::vector<__int128> c1(classes, 0);
  const std::uint64_t reps = ipow_u64(static_cast<std::uint64_t>(q), L);
  for (std::uint64_t i = 0; i < reps; ++i) {
    std::vector<Elem> d(static_cast<size_t>(L));
    std::uint64_t v = i;
    for (int j = 0; j < L; ++j) {
      d[static_cast<size_t>(j)] = static_cast<Elem>(v % static_cast<std::uint64_t>(q));
      v /= static_cast<std::uint64_t>(q);
    }
    Laurent x = Laurent::from_digits(f, -L, d, true);
    c1[class_of(x * x * x)] += 1;
  }
  std::vector<std::pair<std::uint64_t, __int128>> support;
  for (std::uint64_t c = 0; c < classes; ++c)
    if (c1[c]) support.emplace_back(c, c1[c]);

  auto step = [&](const std::vector<__int128>& a) {
    std::vector<__int128> out(classes, 0);
    for (std::uint64_t s = 0; s < classes; ++s) {
      if (!a[s]) continue;
      for (const auto& [u, w] : support) out[add_idx(s, u)] += a[s] * w;
    }
    return out;
  };
  const int h1 = n / 2, h2 = n - h1;
  std::vector<__int128> lo(classes, 0);
  lo[0] = 1;
  for (int i = 0; i < h1; ++i) lo = step(lo);
  std::vector<__int128> hi = lo;
  if (h2 > h1) hi = step(lo);

  const std::uint64_t target = class_of(Laurent::from_poly(P).shifted(-3 * B));
  __int128 count = 0;
  for (std::uint64_t s = 0; s < classes; ++s)
    if (lo[s]) count += lo[s] * hi[add_idx(target, neg_idx(s))];
  return mpq_class(to_mpz(count)) * qpow(q, static_cast<long long>(K) - static_cast<long long>(n) * L);
}

std::string WaringReport::csv() const {
  std::ostringstream o;
  o << "Y,sing_series_partial,R_n,prediction,ratio\n";
  for (const auto& row : series) {
    double s = cyc_real(row.partial);
    double pred = s * sigma.get_d() * std::pow(static_cast<double>(q), static_cast<double>(B) * (n - 3));
    o << row.Y << ',' << s << ',' << R << ',' << pred << ',' << (pred != 0 ? static_cast<double>(R) / pred : 0.0)
      << '\n';
  }
  return o.str();
}

WaringReport waring_report(const Field* f, int n, const Poly& P, int Y, int K, const Budget& budget) {
  WaringReport rep;
  rep.n = n;
  rep.Y = Y;
  rep.K = K;
  rep.q = f->q();
  rep.P = format(P);
  rep.B = waring_B(P);
  rep.in_jq3 = jq3_closure(f, std::max(P.deg(), 0)).contains(P);
  rep.R = count_R(f, n, P, false, CountMethod::mitm, budget).value;
  rep.series = sing_series_waring(f, n, P, Y);
  rep.sigma = sigma_inf(f, n, P, rep.B, K);
  rep.sigma_next = sigma_inf(f, n, P, rep.B, K + 1);
  const double s = cyc_real(rep.series.back().partial);
  rep.prediction = s * rep.sigma.get_d() * std::pow(static_cast<double>(f->q()), static_cast<double>(rep.B) * (n - 3));
  rep.ratio = rep.prediction != 0 ? static_cast<double>(rep.R) / rep.prediction : 0.0;
  return rep;
}

WeylAudit weyl_minor_audit(const Field* f, int B) {
  const ArcConfig cfg = ArcConfig::waring(B);
  const int D = 3 * B;
  const int q = f->q();
  if (static_cast<double>(D) * std::log2(q) > 20) throw BudgetExceeded("weyl audit needs q^3B <= 2^20");
  WeylAudit out;
  out.max_abs_sq = 0;
  const std::uint64_t reps = ipow_u64(static_cast<std::uint64_t>(q), D);
  for (std::uint64_t i = 0; i < reps; ++i) {
    std::vector<Elem> d(static_cast<size_t>(D));
    std::uint64_t v = i;
    for (int j = 0; j < D; ++j) {
      d[static_cast<size_t>(j)] = static_cast<Elem>(v % static_cast<std::uint64_t>(q));
      v /= static_cast<std::uint64_t>(q);
    }
    Laurent alpha = Laurent::from_digits(f, -D, d, false);
    ++out.reps;
    if (arc_classify(f, cfg, alpha).major) continue;
    ++out.minor;
    AbsSq a = abs_sq(weyl_sum(alpha, B));
    if (a.value > out.max_abs_sq) out.max_abs_sq = a.value;
  }
  if (out.max_abs_sq == 0) {
    out.delta_fit = std::numeric_limits<double>::infinity();
  } else {
    double lg = 0.5 * std::log(out.max_abs_sq.get_d()) / std::log(static_cast<double>(q));
    out.delta_fit = 1.0 - (lg - 1.0) / B;
  }
  return out;
}

}  // namespace ffc
