#include "ffcubes/delta.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "ffcubes/expsums.hpp"
#include "ffcubes/residue.hpp"

namespace ffc {

namespace {

constexpr int kNegInf = INT_MIN / 4;

// log_q |a| (an upper bound for inexact values), kNegInf for an exact zero.
int mag(const Laurent& a) {
  int b = a.abs_log_bound();
  return b == Laurent::kNoTop ? kNegInf : b;
}

int log_x(const CoordBall& b) { return std::max(mag(b.center), b.radius_log - 1); }

Laurent lp(const Poly& a) { return Laurent::from_poly(a); }

mpz_class to_mpz(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
  mpz_class r = (hi << 64) + lo;
  return neg ? mpz_class(-r) : r;
}

void guard_reps(int q, long long digits, const char* what) {
  double bits = static_cast<double>(digits) * std::log2(static_cast<double>(q));
  if (bits > 36) throw BudgetExceeded(std::string(what) + ": " + std::to_string(digits) + " free digits");
}

// Fast route for balls centred at 0: x = sum_{k=k0}^{m} x_k t^-k, k0 = 1 - R.
CycNum ball_integral_at(const Laurent& g, const Laurent& v, int R, int m) {
  const Field* f = g.field() ? g.field() : v.field();
  const int p = f->p();
  const Elem q = static_cast<Elem>(f->q());
  const int k0 = 1 - R;
  const int L = std::max(0, m - k0 + 1);
  if (!g.exact() && g.floor() > 3 * k0 - 1) throw std::domain_error("cubic coefficient known too coarsely");
  if (!v.exact() && v.floor() > k0 - 1) throw std::domain_error("linear coefficient known too coarsely");
  guard_reps(f->q(), L, "ball_integral");
  const int S = L > 0 ? 3 * (L - 1) + 1 : 0;
  std::vector<Elem> gd(static_cast<size_t>(S)), vd(static_cast<size_t>(L));
  for (int s = 0; s < S; ++s) gd[s] = g.digit(3 * k0 + s - 1);
  for (int a = 0; a < L; ++a) vd[a] = v.digit(k0 + a - 1);
  bool cubic = std::any_of(gd.begin(), gd.end(), [](Elem e) { return e != 0; });
  ZetaSum acc(p);
  std::vector<Elem> x(static_cast<size_t>(L), 0), sq(static_cast<size_t>(L > 0 ? 2 * L - 1 : 0));
  while (true) {
    Elem s = 0;
    for (int a = 0; a < L; ++a)
      if (x[a]) s = f->add(s, f->mul(vd[a], x[a]));
    if (cubic) {
      std::fill(sq.begin(), sq.end(), 0);
      for (int a = 0; a < L; ++a) {
        if (!x[a]) continue;
        for (int b = 0; b < L; ++b)
          if (x[b]) sq[a + b] = f->add(sq[a + b], f->mul(x[a], x[b]));
      }
      for (int u = 0; u < 2 * L - 1; ++u) {
        if (!sq[u]) continue;
        for (int c = 0; c < L; ++c)
          if (x[c] && gd[u + c]) s = f->add(s, f->mul(gd[u + c], f->mul(sq[u], x[c])));
      }
    }
    acc.add_power(f->trace(s));
    int a = L - 1;
    for (; a >= 0; --a) {
      if (++x[a] < q) break;
      x[a] = 0;
    }
    if (a < 0) break;
  }
  return acc.to_cyc_scaled(qpow(f->q(), -m));
}

CycNum ball_integral_generic(const Laurent& g, const Laurent& v, const CoordBall& ball, int m, bool check) {
  const Field* f = g.field() ? g.field() : v.field();
  guard_reps(f->q(), std::max(0, m + ball.radius_log), "ball_integral");
  return haar_integrate_char(
      *f, {ball}, m,
      [&](const std::vector<Laurent>& x) {
        const Laurent& y = x[0];
        return psi_exp(g * (y * y * y) + v * y);
      },
      check);
}

const Field* field_of(const DiagonalForm& F) { return F.field(); }

// Per-coordinate tables of the one-dimensional integrals for one (r, theta cell).
struct CoordData {
  int Dc = -1;                            // c_i ranges over deg < Dc + 1
  std::vector<Poly> cands;                // index order, so position = Poly::index()
  std::vector<std::vector<int>> id;       // [term][c]
  std::vector<std::vector<CycNum>> vals;  // [term][distinct value]
};

int intern(std::vector<CycNum>& vals, const CycNum& v) {
  for (size_t i = 0; i < vals.size(); ++i)
    if (vals[i] == v) return static_cast<int>(i);
  vals.push_back(v);
  return static_cast<int>(vals.size()) - 1;
}

// Largest log_q |v| for which some term's integral may be nonzero.
int allowed_log(const Laurent& g, const std::vector<WeightTerm>& terms, int i) {
  int best = kNegInf;
  for (const auto& t : terms) {
    const CoordBall& b = t.balls[static_cast<size_t>(i)];
    int lim = -b.radius_log - 1;
    int gm = mag(g);
    if (gm != kNegInf) lim = std::max(lim, gm + 2 * log_x(b));
    best = std::max(best, lim);
  }
  return best;
}

Laurent linear_coeff(const Poly& P, const Poly& c, const Poly& r) { return Laurent::ratio(P * c, r, -3); }

std::vector<CoordData> coord_tables(const DeltaConfig& cfg, const Poly& r, const Laurent& gamma,
                                    const std::vector<WeightTerm>& terms) {
  const int n = cfg.F.n();
  const Field* f = field_of(cfg.F);
  std::vector<CoordData> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Laurent g = gamma * lp(cfg.F[i]);
    CoordData& cd = out[i];
    cd.Dc = allowed_log(g, terms, i) - cfg.P.deg() + r.deg();
    cd.cands = polys_below(f, std::max(cd.Dc + 1, 0));
    if (cfg.paranoid) {
      for (Poly edge : {Poly::monomial(f, 1, std::max(cd.Dc + 1, 0)),
                        Poly::monomial(f, 1, std::max(cd.Dc + 1, 0)) + Poly::constant(f, 1)}) {
        if (edge.is_zero() || edge.deg() <= cd.Dc) continue;
        Laurent v = linear_coeff(cfg.P, edge, r);
        for (const auto& t : terms)
          if (!ball_integral(g, v, t.balls[i], false).is_zero())
            throw std::logic_error("coordinate integral nonzero past the truncation edge");
      }
    }
    cd.id.assign(terms.size(), std::vector<int>(cd.cands.size()));
    cd.vals.assign(terms.size(), {});
    for (size_t ci = 0; ci < cd.cands.size(); ++ci) {
      Laurent v = linear_coeff(cfg.P, cd.cands[ci], r);
      for (size_t k = 0; k < terms.size(); ++k)
        cd.id[k][ci] = intern(cd.vals[k], ball_integral(g, v, terms[k].balls[i], cfg.paranoid));
    }
  }
  return out;
}

Laurent gamma_of(const DeltaConfig& cfg, const Laurent& theta) { return lp(cfg.P * cfg.P * cfg.P) * theta; }

// Scale |P|^n |r|^-n times the cell measure.
mpq_class outer_scale(const DeltaConfig& cfg, const Poly& r, const mpq_class& meas) {
  return qpow(field_of(cfg.F)->q(), static_cast<long long>(cfg.F.n()) * (cfg.P.deg() - r.deg())) * meas;
}

// sum_c S_r(c) I_r(theta, c) through the factorisation over a.
CycNum inner_product(const DeltaConfig& cfg, const Poly& r, const std::vector<CoordData>& cd,
                     const std::vector<WeightTerm>& terms) {
  const Field* f = field_of(cfg.F);
  const int p = f->p();
  const int n = cfg.F.n();
  ResidueCtx R(r);
  CycNum inner(p);
  for (auto ai : unit_residues(r)) {
    Poly a = Poly::from_index(f, ai);
    std::vector<CycNum> prod(terms.size(), CycNum::rational(p, 1));
    for (int i = 0; i < n; ++i) {
      Poly b = a * cfg.F[i];
      std::vector<std::vector<ZetaSum>> acc(terms.size());
      for (size_t k = 0; k < terms.size(); ++k) acc[k].assign(cd[i].vals[k].size(), ZetaSum(p));
      for (size_t ci = 0; ci < cd[i].cands.size(); ++ci) {
        ZetaSum s = one_dim_sum(R, b, cd[i].cands[ci]);
        for (size_t k = 0; k < terms.size(); ++k) acc[k][cd[i].id[k][ci]] += s;
      }
      for (size_t k = 0; k < terms.size(); ++k) {
        CycNum factor(p);
        for (size_t v = 0; v < acc[k].size(); ++v) factor += acc[k][v].to_cyc() * cd[i].vals[k][v];
        prod[k] *= factor;
      }
    }
    for (size_t k = 0; k < terms.size(); ++k) {
      if (terms[k].sign > 0)
        inner += prod[k];
      else
        inner -= prod[k];
    }
  }
  return inner;
}

// Iterate the product box (c_0 fastest) with S_r(c) from S_r_box, grouping by
// (class, ids) and folding the groups at the end.
template <class ClassFn>
std::map<int, CycNum> inner_per_c(const DeltaConfig& cfg, const Poly& r, const std::vector<CoordData>& cd,
                                  const std::vector<WeightTerm>& terms, ClassFn&& cls, std::uint64_t* terms_seen) {
  const int n = cfg.F.n();
  const int p = field_of(cfg.F)->p();
  std::vector<std::vector<Poly>> cands(static_cast<size_t>(n));
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    cands[i] = cd[i].cands;
    total *= cands[i].size();
  }
  if (total > cfg.budget.max_tuples) throw BudgetExceeded("c-box of " + std::to_string(total) + " tuples");
  std::vector<long long> S = S_r_box(cfg.F, r, cands);
  if (terms_seen) *terms_seen += total;
  // per term: key = (class, packed ids)
  std::vector<std::map<std::pair<int, std::uint64_t>, __int128>> groups(terms.size());
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  std::vector<const Poly*> c(static_cast<size_t>(n));
  for (std::uint64_t lin = 0; lin < total; ++lin) {
    if (S[lin] != 0) {
      for (int i = 0; i < n; ++i) c[i] = &cands[i][idx[i]];
      int k_cls = cls(c);
      for (size_t k = 0; k < terms.size(); ++k) {
        std::uint64_t key = 0;
        for (int i = n - 1; i >= 0; --i) key = key * cd[i].vals[k].size() + static_cast<std::uint64_t>(cd[i].id[k][idx[i]]);
        groups[k][{k_cls, key}] += S[lin];
      }
    }
    for (int i = 0; i < n; ++i) {
      if (++idx[i] < cands[i].size()) break;
      idx[i] = 0;
    }
  }
  std::map<int, CycNum> out;
  for (size_t k = 0; k < terms.size(); ++k) {
    for (const auto& [key, sum] : groups[k]) {
      if (sum == 0) continue;
      std::uint64_t packed = key.second;
      CycNum prod = CycNum::rational(p, mpq_class(to_mpz(sum)));
      for (int i = 0; i < n; ++i) {
        std::uint64_t base = cd[i].vals[k].size();
        prod *= cd[i].vals[k][packed % base];
        packed /= base;
      }
      CycNum& slot = out[key.first];
      if (terms[k].sign > 0)
        slot += prod;
      else
        slot -= prod;
    }
  }
  return out;
}

mpq_class lhs_count(const DeltaConfig& cfg) {
  return mpq_class(static_cast<unsigned long>(count_Nw(cfg.F, cfg.P, cfg.w, CountMethod::mitm, cfg.budget).value));
}

}  // namespace

DeltaConfig::DeltaConfig(DiagonalForm F_, Poly P_, Weight w_, int Q_)
    : F(std::move(F_)), P(std::move(P_)), w(std::move(w_)), Q(Q_) {
  if (P.is_zero()) throw std::invalid_argument("P must be nonzero");
  if (Q < 0) Q = default_Q(P);
  if (Q < 1) throw std::invalid_argument("Q must be at least 1");
  if (2 * Q < 3 * P.deg() || 2 * Q > 3 * P.deg() + 2)
    throw std::invalid_argument("Q = " + std::to_string(Q) + " violates |P|^{3/2} <= q^Q <= q|P|^{3/2}");
  weight_terms(w, F.field(), F.n());  // validates the weight
}

int DeltaConfig::default_Q(const Poly& P) { return std::max(1, (3 * P.deg() + 1) / 2); }

int DeltaConfig::theta_floor() const { return 2 - 3 * P.deg() - F.height_log(); }

std::vector<WeightTerm> weight_terms(const Weight& w, const Field* f, int n) {
  std::vector<WeightTerm> out;
  if (w.kind == Weight::Kind::annulus) {
    out.push_back({+1, std::vector<CoordBall>(static_cast<size_t>(n), CoordBall{Laurent(f), 0})});
    out.push_back({-1, std::vector<CoordBall>(static_cast<size_t>(n), CoordBall{Laurent(f), -1})});
    return out;
  }
  if (!w.M.is_zero()) throw std::invalid_argument("congruence weights are not Schwartz-Bruhat on K_inf^n");
  if (static_cast<int>(w.center.size()) != n) throw std::invalid_argument("box weight needs one center per coordinate");
  WeightTerm t;
  for (const auto& c : w.center) {
    if (c.abs_log_bound() >= 0) throw std::invalid_argument("box weight center must lie in T");
    t.balls.push_back({c, -w.N});
  }
  out.push_back(std::move(t));
  return out;
}

int ball_depth(const Laurent& g, const Laurent& v, const CoordBall& ball) {
  int m = -ball.radius_log;
  if (mag(g) != kNegInf) m = std::max(m, mag(g) + 2 * log_x(ball) + 1);
  if (mag(v) != kNegInf) m = std::max(m, mag(v) + 1);
  return m;
}

bool ball_integral_vanishes(const Laurent& g, const Laurent& v, const CoordBall& ball) {
  int W = v.top();
  if (W == Laurent::kNoTop) return false;
  if (W < -ball.radius_log) return false;
  int gm = mag(g);
  return gm == kNegInf || W >= gm + 2 * log_x(ball) + 1;
}

CycNum ball_integral(const Laurent& g, const Laurent& v, const CoordBall& ball, bool check_depth) {
  const Field* f = g.field() ? g.field() : v.field();
  if (!f) f = ball.center.field();
  if (ball_integral_vanishes(g, v, ball)) {
    if (check_depth) {
      CycNum direct = ball.center.is_zero() && ball.center.exact()
                          ? ball_integral_at(g, v, ball.radius_log, ball_depth(g, v, ball))
                          : ball_integral_generic(g, v, ball, ball_depth(g, v, ball), false);
      if (!direct.is_zero()) throw std::logic_error("vanishing criterion contradicted");
    }
    return CycNum(f->p());
  }
  int m = ball_depth(g, v, ball);
  Laurent gg = g.field() ? g : Laurent(f), vv = v.field() ? v : Laurent(f);
  if (ball.center.exact() && ball.center.is_zero()) {
    CycNum res = ball_integral_at(gg, vv, ball.radius_log, m);
    if (check_depth && !(ball_integral_at(gg, vv, ball.radius_log, m + 1) == res))
      throw std::logic_error("ball integrand not constant at the stated depth");
    return res;
  }
  return ball_integral_generic(gg, vv, ball, m, check_depth);
}

CycNum J_f(const Laurent& gamma, const std::vector<Laurent>& v, const DiagonalForm& F, const Weight& w,
           bool check_depth) {
  const int n = F.n();
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("J_f: one linear coefficient per variable");
  const int p = F.field()->p();
  CycNum total(p);
  for (const auto& t : weight_terms(w, F.field(), n)) {
    CycNum prod = CycNum::rational(p, 1);
    for (int i = 0; i < n && !prod.is_zero(); ++i)
      prod *= ball_integral(gamma * lp(F[i]), v[i], t.balls[i], check_depth);
    if (t.sign > 0)
      total += prod;
    else
      total -= prod;
  }
  return total;
}

CycNum J_f_generic(const Laurent& gamma, const std::vector<Laurent>& v, const DiagonalForm& F, const Weight& w,
                   bool check_depth) {
  const int n = F.n();
  const Field* f = F.field();
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("J_f: one linear coefficient per variable");
  std::vector<Laurent> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = gamma * lp(F[i]);
  auto phase = [&](const std::vector<Laurent>& x) {
    Laurent s(f);
    for (int i = 0; i < n; ++i) s += g[i] * (x[i] * x[i] * x[i]) + v[i] * x[i];
    return psi_exp(s);
  };
  if (w.kind == Weight::Kind::annulus) {
    std::vector<CoordBall> box(static_cast<size_t>(n), CoordBall{Laurent(f), 0});
    int m = 1;
    for (int i = 0; i < n; ++i) m = std::max(m, ball_depth(g[i], v[i], box[i]));
    guard_reps(f->q(), static_cast<long long>(n) * m, "J_f_generic");
    return haar_integrate_char(
        *f, box, m,
        [&](const std::vector<Laurent>& x) {
          bool outer = false;
          for (const auto& xi : x) outer = outer || (!xi.is_zero() && xi.top() == -1);
          return outer ? phase(x) : -1;
        },
        check_depth);
  }
  auto terms = weight_terms(w, f, n);
  const auto& box = terms[0].balls;
  int m = 0;
  long long digits = 0;
  for (int i = 0; i < n; ++i) m = std::max(m, ball_depth(g[i], v[i], box[i]));
  for (int i = 0; i < n; ++i) digits += std::max(0, m + box[i].radius_log);
  guard_reps(f->q(), digits, "J_f_generic");
  return haar_integrate_char(*f, box, m, phase, check_depth);
}

CycNum I_r_theta_c(const DeltaConfig& cfg, const Poly& r, const Laurent& theta, const std::vector<Poly>& c,
                   bool generic) {
  if (!r.is_monic()) throw std::invalid_argument("r must be monic");
  if (static_cast<int>(c.size()) != cfg.F.n()) throw std::invalid_argument("c has the wrong length");
  int tm = mag(theta);
  if (tm != kNegInf && tm >= -r.deg() - cfg.Q) throw std::invalid_argument("theta outside |theta| < |r|^-1 q^-Q");
  Laurent gamma = gamma_of(cfg, theta);
  std::vector<Laurent> v;
  for (const auto& ci : c) v.push_back(linear_coeff(cfg.P, ci, r));
  return generic ? J_f_generic(gamma, v, cfg.F, cfg.w, cfg.paranoid) : J_f(gamma, v, cfg.F, cfg.w, cfg.paranoid);
}

std::vector<ThetaCell> theta_cells(const DeltaConfig& cfg, const Poly& r) {
  const Field* f = cfg.F.field();
  const int hi = -r.deg() - cfg.Q - 1;
  const int lo = cfg.theta_floor();
  std::vector<ThetaCell> out;
  if (hi < lo) {
    out.push_back({Laurent(f), qpow(f->q(), hi + 1)});
    return out;
  }
  const int L = hi - lo + 1;
  guard_reps(f->q(), L, "theta_cells");
  const std::uint64_t count = ipow_u64(static_cast<std::uint64_t>(f->q()), L);
  mpq_class meas = qpow(f->q(), lo);
  for (std::uint64_t i = 0; i < count; ++i) {
    Poly digits = Poly::from_index(f, i);
    std::vector<Elem> d(static_cast<size_t>(L));
    for (int k = 0; k < L; ++k) d[k] = digits.coeff(k);
    out.push_back({Laurent::from_digits(f, lo, d, true), meas});
  }
  return out;
}

const char* to_string(IhatRoute r) { return r == IhatRoute::collapse ? "collapse" : "enumerate"; }

CycNum I_hat(const DeltaConfig& cfg, const Poly& r, const std::vector<Poly>& c, IhatRoute route) {
  const Field* f = cfg.F.field();
  const int n = cfg.F.n();
  if (static_cast<int>(c.size()) != n) throw std::invalid_argument("c has the wrong length");
  if (route == IhatRoute::enumerate) {
    CycNum acc(f->p());
    for (const auto& cell : theta_cells(cfg, r)) acc += I_r_theta_c(cfg, r, cell.theta, c) * cell.measure;
    return acc;
  }
  const int N = r.deg() + cfg.Q;  // indicator [|P^3 F(x)| < q^N]
  std::vector<Laurent> v;
  for (const auto& ci : c) v.push_back(linear_coeff(cfg.P, ci, r));
  std::vector<Poly> P3F;
  for (int i = 0; i < n; ++i) P3F.push_back(cfg.P * cfg.P * cfg.P * cfg.F[i]);
  CycNum total(f->p());
  for (const auto& t : weight_terms(cfg.w, f, n)) {
    int lx = kNegInf;
    int m = 0;
    for (int i = 0; i < n; ++i) {
      lx = std::max(lx, log_x(t.balls[i]));
      m = std::max(m, -t.balls[i].radius_log);
      if (mag(v[i]) != kNegInf) m = std::max(m, mag(v[i]) + 1);
    }
    m = std::max(m, 3 * cfg.P.deg() + cfg.F.height_log() + 2 * lx - N);
    long long digits = 0;
    for (int i = 0; i < n; ++i) digits += std::max(0, m + t.balls[i].radius_log);
    guard_reps(f->q(), digits, "I_hat");
    CycNum part = haar_integrate_char(
        *f, t.balls, m,
        [&](const std::vector<Laurent>& x) {
          Laurent val(f), lin(f);
          for (int i = 0; i < n; ++i) {
            val += lp(P3F[i]) * (x[i] * x[i] * x[i]);
            lin += v[i] * x[i];
          }
          if (!val.is_zero() && val.top() >= N) return -1;
          return psi_exp(lin);
        },
        cfg.paranoid);
    if (t.sign > 0)
      total += part;
    else
      total -= part;
  }
  return total * qpow(f->q(), -N);
}

CycNum I_hat(const DeltaConfig& cfg, int Y, const std::vector<Poly>& c, IhatRoute route) {
  if (Y < 0 || Y > cfg.Q) throw std::invalid_argument("I_hat needs 0 <= Y <= Q");
  return I_hat(cfg, Poly::monomial(cfg.F.field(), 1, Y), c, route);
}

const char* to_string(RhsMethod m) {
  switch (m) {
    case RhsMethod::product: return "product";
    case RhsMethod::per_c: return "per_c";
    case RhsMethod::generic: return "generic";
  }
  return "?";
}

DeltaReport delta_verify(const DeltaConfig& cfg, RhsMethod method) {
  auto t0 = std::chrono::steady_clock::now();
  const Field* f = cfg.F.field();
  const int n = cfg.F.n();
  DeltaReport rep;
  rep.method = method;
  rep.lhs = lhs_count(cfg);
  rep.rhs = CycNum(f->p());
  auto terms = weight_terms(cfg.w, f, n);
  for (const Poly& r : monic_upto(f, cfg.Q)) {
    ++rep.moduli;
    for (const auto& cell : theta_cells(cfg, r)) {
      ++rep.cells;
      Laurent gamma = gamma_of(cfg, cell.theta);
      auto cd = coord_tables(cfg, r, gamma, terms);
      CycNum inner(f->p());
      if (method == RhsMethod::product) {
        std::uint64_t box = 1;
        for (const auto& c : cd) box *= c.cands.size();
        rep.c_terms += box;
        inner = inner_product(cfg, r, cd, terms);
      } else if (method == RhsMethod::per_c) {
        auto parts = inner_per_c(cfg, r, cd, terms, [](const std::vector<const Poly*>&) { return 0; }, &rep.c_terms);
        for (auto& [k, v] : parts) inner += v;
      } else {
        std::vector<size_t> idx(static_cast<size_t>(n), 0);
        std::vector<Poly> c(static_cast<size_t>(n));
        while (true) {
          for (int i = 0; i < n; ++i) c[i] = cd[i].cands[idx[i]];
          ++rep.c_terms;
          long long S = S_r_c_int(cfg.F, r, c);
          if (S != 0) {
            std::vector<Laurent> v;
            for (const auto& ci : c) v.push_back(linear_coeff(cfg.P, ci, r));
            inner += J_f_generic(gamma, v, cfg.F, cfg.w, cfg.paranoid) * mpq_class(static_cast<long>(S));
          }
          int i = 0;
          for (; i < n; ++i) {
            if (++idx[i] < cd[i].cands.size()) break;
            idx[i] = 0;
          }
          if (i == n) break;
        }
      }
      rep.rhs += inner * outer_scale(cfg, r, cell.measure);
    }
  }
  rep.equal = rep.rhs == CycNum::rational(f->p(), rep.lhs);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

NEEReport partition_NEE(const DeltaConfig& cfg) {
  const Field* f = cfg.F.field();
  const int n = cfg.F.n();
  const int p = f->p();
  NEEReport rep;
  rep.lhs = lhs_count(cfg);
  rep.split_E2 = n == 4 && p > 3;
  const int bits = 64 / n;
  std::unordered_map<std::uint64_t, int> cache;
  auto cls = [&](const std::vector<const Poly*>& c) {
    std::uint64_t key = 0;
    bool zero = true;
    for (int i = n - 1; i >= 0; --i) {
      std::uint64_t ix = c[i]->index();
      if (bits < 64 && (ix >> bits) != 0) throw BudgetExceeded("c coordinate index does not fit the cache key");
      key = (key << bits) | ix;
      zero = zero && c[i]->is_zero();
    }
    if (zero) return 0;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<Poly> cv;
    for (const auto* ci : c) cv.push_back(*ci);
    int k;
    if (rep.split_E2) {
      SolutionClass s = classify_solution(cfg.F, cv);
      k = s == SolutionClass::nonzero ? 1 : s == SolutionClass::ordinary ? 2 : 3;
    } else {
      k = dual_is_zero(cfg.F, cv) ? 2 : 1;
    }
    if (k >= 2) ++rep.dual_zeros;
    cache.emplace(key, k);
    return k;
  };
  std::map<int, CycNum> piece;
  auto terms = weight_terms(cfg.w, f, n);
  for (const Poly& r : monic_upto(f, cfg.Q)) {
    for (const auto& cell : theta_cells(cfg, r)) {
      auto cd = coord_tables(cfg, r, gamma_of(cfg, cell.theta), terms);
      auto parts = inner_per_c(cfg, r, cd, terms, cls, nullptr);
      mpq_class sc = outer_scale(cfg, r, cell.measure);
      for (auto& [k, v] : parts) piece[k] += v * sc;
    }
  }
  auto get = [&](int k) { return piece.count(k) ? piece[k] : CycNum(p); };
  rep.N0 = get(0) + CycNum(p);
  rep.E1 = get(1) + CycNum(p);
  rep.E2_ord = get(2) + CycNum(p);
  rep.E2_spec = get(3) + CycNum(p);
  rep.E2 = rep.E2_ord + rep.E2_spec;
  rep.ok = rep.N0 + rep.E1 + rep.E2 == CycNum::rational(p, rep.lhs);
  return rep;
}

namespace {

void check_special(const DeltaConfig& cfg) {
  if (cfg.F.n() != 4) throw std::invalid_argument("special transform needs n = 4");
  if (cfg.F.field()->p() <= 3) throw std::invalid_argument("special transform needs characteristic > 3");
  if (cfg.w.kind != Weight::Kind::annulus) throw std::invalid_argument("special transform uses the annulus weight");
  if (cfg.P.deg() < 1) throw std::invalid_argument("special transform needs deg P >= 1");
}

std::vector<Laurent> x_of_laurent(const SpecialSetup& s, const Laurent& y1, const Laurent& y2, const Laurent& z1,
                                  const Laurent& z2) {
  return {lp(s.rhop[1]) * y1 - lp(s.rho[1]) * z1, lp(s.rho[0]) * z1 - lp(s.rhop[0]) * y1,
          lp(s.rhop[3]) * y2 - lp(s.rho[3]) * z2, lp(s.rho[2]) * z2 - lp(s.rhop[2]) * y2};
}

// Integrate over t in {|t| <= q^E}^2, E = deg P - 1. x(j, t) is unimodular in
// (j, t), so |x| = max(|j|, |t|) and the annulus weight is [max = q^E].
template <class Fn>
CycNum integrate_t(const DeltaConfig& cfg, const SpecialSetup& s, const Poly& j1, const Poly& j2, int m, Fn&& fn) {
  const Field* f = cfg.F.field();
  const int E = cfg.P.deg() - 1;
  if (std::max(j1.deg(), j2.deg()) > E) return CycNum(f->p());
  m = std::max(m, -E);
  guard_reps(f->q(), 2LL * (E + m + 1), "J_r_j");
  std::vector<CoordBall> box(2, CoordBall{Laurent(f), E + 1});
  Laurent y1 = lp(j1), y2 = lp(j2);
  auto body = [&](const std::vector<Laurent>& t) {
    auto x = x_of_laurent(s, y1, y2, t[0], t[1]);
    int top = Laurent::kNoTop;
    for (const auto& xi : x) top = std::max(top, xi.top());
    if (top != E) return -1;
    Laurent Ft(f);
    for (int i = 0; i < 4; ++i) Ft += lp(cfg.F[i]) * (x[i] * x[i] * x[i]);
    return fn(Ft);
  };
  return haar_integrate_char(*f, box, m, body, cfg.paranoid);
}

}  // namespace

CycNum J_r_j(const SpecialSetup& s, const DeltaConfig& cfg, const Poly& r, const Poly& j1, const Poly& j2,
             const Laurent& theta) {
  check_special(cfg);
  int tm = mag(theta);
  if (tm != kNegInf && tm >= -r.deg() - cfg.Q) throw std::invalid_argument("theta outside |theta| < |r|^-1 q^-Q");
  const int E = cfg.P.deg() - 1;
  int m = tm == kNegInf ? -E : tm + cfg.F.height_log() + 2 * E + 1;
  return integrate_t(cfg, s, j1, j2, m, [&](const Laurent& Ft) { return psi_exp(theta * Ft); });
}

CycNum J_r_j_avg(const SpecialSetup& s, const DeltaConfig& cfg, const Poly& r, const Poly& j1, const Poly& j2) {
  check_special(cfg);
  const int E = cfg.P.deg() - 1;
  const int N = r.deg() + cfg.Q;
  int m = cfg.F.height_log() + 2 * E - N;
  CycNum v = integrate_t(cfg, s, j1, j2, m, [&](const Laurent& Ft) { return (!Ft.is_zero() && Ft.top() >= N) ? -1 : 0; });
  return v * qpow(cfg.F.field()->q(), -N);
}

SpecialTransformReport special_transform_verify(const SpecialSetup& s, const DeltaConfig& cfg, const Poly& r) {
  check_special(cfg);
  const Field* f = cfg.F.field();
  const int p = f->p();
  SpecialTransformReport rep;
  rep.setup = "lambda=" + format(s.lambda) + " mu=" + format(s.mu) + " rho=(" + format(s.rho[0]) + "," +
              format(s.rho[1]) + "," + format(s.rho[2]) + "," + format(s.rho[3]) + ")";
  rep.lhs = CycNum(p);
  rep.rhs = CycNum(p);
  const int E = cfg.P.deg() - 1;
  auto terms = weight_terms(cfg.w, f, 4);
  auto js = polys_below(f, E + 1);
  std::vector<CycNum> T(js.size() * js.size());
  for (size_t a = 0; a < js.size(); ++a)
    for (size_t b = 0; b < js.size(); ++b) T[a + js.size() * b] = T_r_j(s, r, js[a], js[b]);
  rep.j_terms = T.size();
  const mpq_class jac = qpow(f->q(), 2 * r.deg() - 4 * cfg.P.deg());
  auto cells = theta_cells(cfg, r);
  std::vector<CycNum> avg_by_cells(T.size(), CycNum(p));
  for (const auto& cell : cells) {
    ++rep.cells;
    auto cd = coord_tables(cfg, r, gamma_of(cfg, cell.theta), terms);
    auto range = [&](int i, int k) { return std::min(cd[i].Dc - s.rho[i].deg(), cd[k].Dc - s.rho[k].deg()); };
    auto d1s = polys_below(f, std::max(range(0, 1) + 1, 0));
    auto d2s = polys_below(f, std::max(range(2, 3) + 1, 0));
    CycNum lhs(p);
    for (const auto& d1 : d1s)
      for (const auto& d2 : d2s) {
        ++rep.d_terms;
        auto c = s.c_of(d1, d2);
        CycNum J(p);
        for (size_t k = 0; k < terms.size(); ++k) {
          CycNum prod = CycNum::rational(p, 1);
          for (int i = 0; i < 4; ++i) {
            std::uint64_t ix = c[i].index();
            if (ix >= cd[i].cands.size()) throw std::logic_error("c(d) outside the coordinate table");
            prod *= cd[i].vals[k][cd[i].id[k][ix]];
          }
          if (terms[k].sign > 0)
            J += prod;
          else
            J -= prod;
        }
        if (J.is_zero()) continue;
        lhs += J * mpq_class(static_cast<long>(S_r_c_int(cfg.F, r, c)));
      }
    CycNum rhs(p);
    for (size_t a = 0; a < js.size(); ++a)
      for (size_t b = 0; b < js.size(); ++b) {
        size_t ix = a + js.size() * b;
        CycNum J = J_r_j(s, cfg, r, js[a], js[b], cell.theta);
        avg_by_cells[ix] += J * cell.measure;
        if (!T[ix].is_zero()) rhs += T[ix] * J;
      }
    rhs *= jac;
    if (lhs == rhs) ++rep.cells_ok;
    rep.lhs += lhs * cell.measure;
  }
  rep.avg_routes_agree = true;
  for (size_t a = 0; a < js.size(); ++a)
    for (size_t b = 0; b < js.size(); ++b) {
      size_t ix = a + js.size() * b;
      CycNum J = J_r_j_avg(s, cfg, r, js[a], js[b]);
      if (!(J == avg_by_cells[ix])) rep.avg_routes_agree = false;
      if (!T[ix].is_zero()) rep.rhs += T[ix] * J;
    }
  rep.rhs *= jac;
  rep.ok = rep.cells_ok == rep.cells && rep.avg_routes_agree && rep.lhs == rep.rhs;
  return rep;
}

PoissonReport poisson_check(const DiagonalForm& F, const Laurent& gamma, int E) {
  if (E < 0) throw std::invalid_argument("poisson_check needs E >= 0");
  const Field* f = F.field();
  const int n = F.n();
  const int p = f->p();
  PoissonReport rep;
  // LHS: z in O^n with max deg z_i = E.
  auto zs = polys_below(f, E + 1);
  guard_reps(f->q(), static_cast<long long>(n) * (E + 1), "poisson_check");
  std::vector<Laurent> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = gamma * lp(F[i]);
  ZetaSum acc(p);
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  while (true) {
    int top = -1;
    Laurent s(f);
    for (int i = 0; i < n; ++i) {
      const Poly& z = zs[idx[i]];
      top = std::max(top, z.deg());
      Laurent lz = lp(z);
      s += g[i] * (lz * lz * lz);
    }
    if (top == E) acc.add_power(psi_exp(s));
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < zs.size()) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  rep.lhs = acc.to_cyc();
  // RHS: u = t^{E+1} x maps the support onto the annulus |x| = q^-1.
  auto terms = weight_terms(Weight::annulus(), f, n);
  Laurent gs = gamma.shifted(3 * (E + 1));
  rep.rhs = CycNum(p);
  std::vector<CycNum> prod(terms.size(), CycNum::rational(p, 1));
  rep.c_terms = 1;
  for (int i = 0; i < n; ++i) {
    Laurent gi = gs * lp(F[i]);
    int D = allowed_log(gi, terms, i) - (E + 1);
    auto cs = polys_below(f, std::max(D + 1, 0));
    rep.c_terms *= cs.size();
    for (size_t k = 0; k < terms.size(); ++k) {
      CycNum sum(p);
      for (const auto& c : cs) sum += ball_integral(gi, lp(c).shifted(E + 1), terms[k].balls[i], true);
      prod[k] *= sum;
    }
  }
  for (size_t k = 0; k < terms.size(); ++k) {
    if (terms[k].sign > 0)
      rep.rhs += prod[k];
    else
      rep.rhs -= prod[k];
  }
  rep.rhs *= qpow(f->q(), static_cast<long long>(n) * (E + 1));
  rep.equal = rep.lhs == rep.rhs;
  return rep;
}

}  // namespace ffc
