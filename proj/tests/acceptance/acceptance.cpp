// Acceptance suite: one PASS/FAIL line per criterion.
//
//   ffcubes_acceptance            run all criteria
//   ffcubes_acceptance --only N   run criterion N
//
// Exit status is 0 iff every selected criterion passed.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ffcubes/counting.hpp"
#include "ffcubes/delta.hpp"
#include "ffcubes/dualform.hpp"
#include "ffcubes/expsums.hpp"
#include "ffcubes/fit.hpp"
#include "ffcubes/laurent.hpp"
#include "ffcubes/waring.hpp"

using namespace ffc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::uint64_t checks = 0;

  // Records the first failure only.
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<void(Outcome&)> run;
};

FieldPtr field_of(int q) {
  FieldOptions opt;
  opt.allow_char3 = true;
  return Field::of_order(q, opt);
}

std::vector<Poly> polys(const Field* f, std::initializer_list<const char*> xs) {
  std::vector<Poly> v;
  for (const char* x : xs) v.push_back(parse_poly(x, f));
  return v;
}

Laurent digits_of(const Field* f, std::uint64_t code, int D) {
  std::vector<Elem> d(static_cast<size_t>(D));
  const std::uint64_t q = static_cast<std::uint64_t>(f->q());
  for (int j = 0; j < D; ++j, code /= q) d[static_cast<size_t>(j)] = static_cast<Elem>(code % q);
  return Laurent::from_digits(f, -D, d, false);
}

std::string show(const std::vector<Poly>& c) {
  std::string s = "(";
  for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + format(c[i]);
  return s + ")";
}

// ---- 1: characters and orthogonality ---------------------------------------

void c1(Outcome& o) {
  std::mt19937_64 rng(101);
  for (int q : {2, 3}) {
    auto fp = field_of(q);
    const Field* f = fp.get();
    std::uniform_int_distribution<int> dig(0, q - 1);
    auto rnd = [&](int hi, int lo) {
      std::vector<Elem> d(static_cast<size_t>(hi - lo + 1));
      for (auto& x : d) x = static_cast<Elem>(dig(rng));
      return Laurent::from_digits(f, lo, d, true);
    };
    for (int i = 0; i < 500; ++i) {
      Laurent a = rnd(3, -5), b = rnd(2, -6);
      o.expect(psi(a + b) == psi(a) * psi(b), "psi additivity at q=" + std::to_string(q));
    }
    // int_{|alpha| < q^-N} psi(alpha x) d alpha = q^-N [|x| < q^N]
    for (int N = 0; N <= 3; ++N) {
      std::vector<CoordBall> box{{Laurent(f), -N}};
      for (const Poly& x : polys_below(f, 4)) {
        Laurent xl = Laurent::from_poly(x);
        CycNum v = haar_integrate_char(*f, box, N + 5, [&](const std::vector<Laurent>& a) { return psi_exp(a[0] * xl); },
                                       true);
        const bool small = x.is_zero() || x.deg() < N;
        o.expect(v == CycNum::rational(f->p(), small ? qpow(q, -N) : mpq_class(0)),
                 "orthogonality q=" + std::to_string(q) + " N=" + std::to_string(N) + " x=" + format(x));
      }
    }
  }
}

// ---- 2: linear and Ramanujan sums -------------------------------------------

void c2(Outcome& o) {
  std::mt19937_64 rng(202);
  std::uint64_t exhaustive = 0, sampled = 0;
  for (int q : {2, 3, 5}) {
    auto fp = field_of(q);
    const Field* f = fp.get();
    for (int dw = 1; dw <= 3; ++dw)
      for (const Poly& w : irreducible_enum(f, dw))
        for (int k = 1; k <= 3; ++k) {
          const Poly r = pow(w, static_cast<unsigned>(k));
          const std::uint64_t size = ipow_u64(static_cast<std::uint64_t>(q), dw * k);
          std::vector<Poly> as;
          if (size <= 4096) {
            for (std::uint64_t i = 0; i < size; ++i) as.push_back(Poly::from_index(f, i));
            ++exhaustive;
          } else {
            // Samples in every w-adic valuation class 0..k.
            const int per = size <= 100000 ? 2 : 1;
            for (int v = 0; v <= k; ++v)
              for (int s = 0; s < per; ++s) {
                if (v == k) {
                  as.push_back(Poly(f));
                  break;
                }
                const std::uint64_t sub = ipow_u64(static_cast<std::uint64_t>(q), dw * (k - v));
                Poly u;
                do u = Poly::from_index(f, rng() % sub);
                while (u.is_zero() || (u % w).is_zero());
                as.push_back((pow(w, static_cast<unsigned>(v)) * u) % r);
              }
            ++sampled;
          }
          for (const Poly& a : as) {
            const std::string tag = "q=" + std::to_string(q) + " w=" + format(w) + " k=" + std::to_string(k) + " a=" + format(a);
            CycNum c = ramanujan_sum(a, w, k);
            o.expect(c == ramanujan_sum_brute(a, w, k), "Ramanujan closed != brute " + tag);
            o.expect(c == ramanujan_sum_functional(a, w, k), "Ramanujan closed != functional " + tag);
            CycNum l = linear_full_sum(a, r);
            o.expect(l == linear_full_sum_brute(a, r), "linear closed != brute " + tag);
            o.expect(l == linear_full_sum_functional(a, r), "linear closed != functional " + tag);
          }
        }
  }
  if (o.pass)
    o.detail = std::to_string(exhaustive) + " moduli with every a, " + std::to_string(sampled) +
               " moduli above 4096 residues with valuation-stratified a";
}

// ---- 3: CRT multiplicativity -----------------------------------------------

void c3(Outcome& o) {
  std::mt19937_64 rng(303);
  std::uint64_t pairs = 0;
  {
    auto fp = Field::of_order(2);
    const Field* f = fp.get();
    auto mon = monic_upto(f, 4);
    for (auto coeffs : {polys(f, {"1", "1"}), polys(f, {"1", "t", "1", "t+1"})}) {
      DiagonalForm F(fp, coeffs);
      for (size_t i = 0; i < mon.size(); ++i)
        for (size_t j = i; j < mon.size(); ++j) {
          const Poly &r1 = mon[i], &r2 = mon[j];
          if (!gcd(r1, r2).is_one()) continue;
          std::vector<Poly> c;
          for (int k = 0; k < F.n(); ++k) c.push_back(Poly::from_index(f, rng() % 256));
          o.expect(S_r_c(F, r1 * r2, c) == S_r_c(F, r1, c) * S_r_c(F, r2, c),
                   "q=2 n=" + std::to_string(F.n()) + " r1=" + format(r1) + " r2=" + format(r2) + " c=" + show(c));
          ++pairs;
        }
    }
  }
  {
    auto fp = Field::of_order(5);
    const Field* f = fp.get();
    DiagonalForm F(fp, polys(f, {"1", "1", "1", "2"}));
    auto mon = monic_upto(f, 2);
    int done = 0;
    while (done < 200) {
      const Poly &r1 = mon[rng() % mon.size()], &r2 = mon[rng() % mon.size()];
      if (!gcd(r1, r2).is_one()) continue;
      std::vector<Poly> c;
      for (int k = 0; k < 4; ++k) c.push_back(Poly::from_index(f, rng() % 625));
      o.expect(S_r_c(F, r1 * r2, c) == S_r_c(F, r1, c) * S_r_c(F, r2, c),
               "q=5 r1=" + format(r1) + " r2=" + format(r2) + " c=" + show(c));
      ++done;
    }
    pairs += 200;
  }
  if (o.pass) o.detail = std::to_string(pairs) + " coprime pairs";
}

// ---- 4: vanishing law -------------------------------------------------------

void c4(Outcome& o) {
  auto fp = Field::of_order(5);
  const Field* f = fp.get();
  const auto box = polys_below(f, 2);
  std::vector<std::vector<Poly>> cands(4, box);
  std::uint64_t tested = 0;
  for (auto coeffs : {polys(f, {"1", "1", "1", "1"}), polys(f, {"1", "1", "1", "2"})}) {
    DiagonalForm F(fp, coeffs);
    // F*(c) once per c; c_0 varies fastest, matching S_r_box.
    std::vector<Poly> dual;
    dual.reserve(box.size() * box.size() * box.size() * box.size());
    for (const auto& c3 : box)
      for (const auto& c2 : box)
        for (const auto& c1 : box)
          for (const auto& c0 : box) dual.push_back(dual_eval(F, {c0, c1, c2, c3}).value);
    for (const Poly& w : monic_enum(f, 1))
      for (int k : {2, 3}) {
        const Poly r = pow(w, static_cast<unsigned>(k));
        auto S = S_r_box(F, r, cands);
        for (size_t i = 0; i < S.size(); ++i) {
          if ((dual[i] % w).is_zero()) continue;
          ++tested;
          if (S[i] != 0) {
            std::vector<Poly> c;
            size_t v = i;
            for (int j = 0; j < 4; ++j, v /= box.size()) c.push_back(box[v % box.size()]);
            o.expect(false, "F=" + F.str() + " w=" + format(w) + " k=" + std::to_string(k) + " c=" + show(c) +
                                " S=" + std::to_string(S[i]));
          }
        }
      }
  }
  o.checks += tested;
  if (o.pass) o.detail = std::to_string(tested) + " sums with w not dividing F*(c), all zero";
}

// ---- 5: delta identity and partition ---------------------------------------

void c5(Outcome& o) {
  auto fp = Field::of_order(2);
  const Field* f = fp.get();
  DiagonalForm F(fp, polys(f, {"1", "1"}));
  std::string summary;
  for (int d = 1; d <= 2; ++d)
    for (const Poly& P : monic_enum(f, d)) {
      DeltaConfig cfg(F, P);
      DeltaReport r = delta_verify(cfg);
      std::uint64_t lhs = count_Nw(F, P, Weight::annulus()).value;
      o.expect(r.lhs == mpq_class(static_cast<unsigned long>(lhs)), "lhs mismatch P=" + format(P));
      o.expect(r.equal && r.rhs == CycNum::rational(2, r.lhs), "delta identity P=" + format(P) + " lhs=" +
                                                                   r.lhs.get_str() + " rhs=" + r.rhs.str());
      if (d == 2) o.expect(lhs == 2, "N(w,P) != 2 for deg P = 2, P=" + format(P));
      NEEReport ne = partition_NEE(cfg);
      o.expect(ne.ok && ne.N0 + ne.E1 + ne.E2 == CycNum::rational(2, r.lhs), "partition P=" + format(P));
      summary += format(P) + ":" + r.lhs.get_str() + " ";
    }
  auto f5 = Field::of_order(5);
  DiagonalForm G(f5, polys(f5.get(), {"1", "1", "1", "1"}));
  DeltaConfig cfg(G, Poly::t(f5.get()));
  NEEReport ne = partition_NEE(cfg);
  o.expect(ne.ok && ne.split_E2 && ne.E2_ord + ne.E2_spec == ne.E2, "q=5 n=4 partition");
  o.expect(ne.lhs == mpq_class(static_cast<unsigned long>(count_Nw(G, Poly::t(f5.get()), Weight::annulus()).value)),
           "q=5 n=4 lhs");
  if (o.pass) o.detail = "N(w,P) " + summary + "; q=5 n=4 P=t: N=" + ne.lhs.get_str();
}

// ---- 6: r-independence of I_hat ---------------------------------------------

void c6(Outcome& o) {
  auto fp = Field::of_order(2);
  const Field* f = fp.get();
  DiagonalForm F(fp, polys(f, {"1", "1"}));
  DeltaConfig cfg(F, parse_poly("t^2", f));
  std::mt19937_64 rng(606);
  std::vector<std::vector<Poly>> cs{{Poly(f), Poly(f)}};
  while (cs.size() < 20) cs.push_back({Poly::from_index(f, rng() % 16), Poly::from_index(f, rng() % 16)});
  for (int Y = 0; Y <= 3; ++Y)
    for (const auto& c : cs) {
      const auto rs = monic_enum(f, Y);
      CycNum ref = I_hat(cfg, rs[0], c, IhatRoute::collapse);
      for (const Poly& r : rs) {
        o.expect(I_hat(cfg, r, c, IhatRoute::collapse) == ref, "collapse Y=" + std::to_string(Y) + " r=" + format(r) + " c=" + show(c));
        o.expect(I_hat(cfg, r, c, IhatRoute::enumerate) == ref, "enumerate Y=" + std::to_string(Y) + " r=" + format(r) + " c=" + show(c));
      }
    }
}

// ---- 7: Farey dissection ----------------------------------------------------

void c7(Outcome& o) {
  for (int q : {2, 3}) {
    auto fp = field_of(q);
    const Field* f = fp.get();
    for (int Q = 1; Q <= 4; ++Q) {
      auto balls = farey_dissect(f, Q);
      mpq_class total = 0;
      std::set<std::pair<std::uint64_t, std::uint64_t>> keys;
      for (const auto& b : balls) {
        total += b.measure();
        keys.insert({b.a.index(), b.r.index()});
      }
      o.expect(total == 1, "total measure q=" + std::to_string(q) + " Q=" + std::to_string(Q) + " is " + total.get_str());
      // The smallest ball has radius q^{-2Q}, so depth-2Q cosets refine every ball.
      const int D = 2 * Q;
      const auto mon = monic_upto(f, Q);
      const std::uint64_t reps = ipow_u64(static_cast<std::uint64_t>(q), D);
      for (std::uint64_t i = 0; i < reps; ++i) {
        Laurent alpha = digits_of(f, i, D);
        // Oracle: every coprime a/r with |r alpha - a| < q^-Q.
        int hits = 0;
        std::pair<std::uint64_t, std::uint64_t> hit;
        for (const Poly& r : mon) {
          Laurent ra = Laurent::from_poly(r) * alpha;
          std::uint64_t code = 0;
          for (int k = r.deg(); k >= 0; --k) code = code * static_cast<std::uint64_t>(q) + ra.digit(k);
          Poly a = Poly::from_index(f, code);
          if (!gcd(a, r).is_one() && !(r.deg() == 0)) continue;
          const int top = (ra - Laurent::from_poly(a)).top();
          if (top == Laurent::kNoTop || top < -Q) {
            ++hits;
            hit = {a.index(), r.index()};
          }
        }
        auto k = farey_locate(balls, alpha);
        o.expect(hits == 1 && keys.count(hit) && k && balls[*k].a.index() == hit.first && balls[*k].r.index() == hit.second,
                 "q=" + std::to_string(q) + " Q=" + std::to_string(Q) + " alpha=" + format(alpha) + " lies in " +
                     std::to_string(hits) + " balls");
      }
    }
  }
}

// ---- 8: Davenport table -----------------------------------------------------

void c8(Outcome& o) {
  auto fp = Field::of_order(2);
  const Field* f = fp.get();
  std::vector<std::pair<int, std::uint64_t>> rows;
  for (int B = 1; B <= 6; ++B) {
    std::uint64_t m = count_M(f, B).value;
    o.expect(m >= ipow_u64(2, 3 * B), "M < 2^3B at B=" + std::to_string(B));
    if (B <= 2) o.expect(m == count_M(f, B, CountMethod::exhaustive).value, "mitm != exhaustive at B=" + std::to_string(B));
    rows.push_back({B, m});
    std::printf("    B=%d M=%llu\n", B, static_cast<unsigned long long>(m));
  }
  FitReport fr = fit_exponent(2, rows);
  const double last = fr.successive.back();
  char buf[160];
  std::snprintf(buf, sizeof buf, "least-squares slope %.4f, final successive slope %.4f%s", fr.slope, last,
                last > 3.6 ? " (above 3.6: flagged, not failed)" : "");
  if (o.pass) o.detail = buf;
}

// ---- 9: dual form -----------------------------------------------------------

using Rad = std::array<Poly, 16>;

Rad rad_mul(const Rad& a, const Rad& b, const std::vector<Poly>& u, const Field* f) {
  Rad out;
  out.fill(Poly(f));
  for (int i = 0; i < 16; ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; j < 16; ++j) {
      if (b[j].is_zero()) continue;
      Poly coef = a[i] * b[j];
      for (int k = 0; k < 4; ++k)
        if ((i & j) >> k & 1) coef = coef * u[k];
      out[i ^ j] += coef;
    }
  }
  return out;
}

// Product of s_1 +- s_2 +- s_3 +- s_4 in O[s]/(s_k^2 - c_k^3 prod_{i != k} F_i).
std::optional<Poly> eight_factor_product(const DiagonalForm& F, const std::vector<Poly>& c) {
  const Field* f = F.field();
  std::vector<Poly> u;
  for (int k = 0; k < 4; ++k) {
    Poly v = c[k] * c[k] * c[k];
    for (int i = 0; i < 4; ++i)
      if (i != k) v = v * F[i];
    u.push_back(v);
  }
  Rad acc;
  acc.fill(Poly(f));
  acc[0] = Poly::constant(f, 1);
  for (int signs = 0; signs < 8; ++signs) {
    Rad lin;
    lin.fill(Poly(f));
    lin[1] = Poly::constant(f, 1);
    for (int k = 1; k < 4; ++k) lin[1 << k] = Poly::constant(f, (signs >> (k - 1) & 1) ? f->neg(1) : 1);
    acc = rad_mul(acc, lin, u, f);
  }
  for (int i = 1; i < 16; ++i)
    if (!acc[i].is_zero()) return std::nullopt;
  return acc[0];
}

void c9(Outcome& o) {
  std::uint64_t grad = 0;
  for (int q : {2, 4}) {
    auto fp = Field::of_order(q);
    const Field* f = fp.get();
    for (auto coeffs : {polys(f, {"1", "1", "1", "1"}), polys(f, {"1", "t", "1", "t+1"})}) {
      DiagonalForm F(fp, coeffs);
      std::vector<std::vector<Poly>> cands(4, polys_below(f, 3));
      solve_enumerate(cands, F.coeffs(), Poly(f), [&](const std::vector<Poly>& x) {
        std::vector<Poly> c;
        for (int i = 0; i < 4; ++i) c.push_back(F[i] * x[i] * x[i]);
        o.expect(dual_is_zero(F, c), "char 2 gradient q=" + std::to_string(q) + " x=" + show(x));
        ++grad;
      });
    }
  }
  std::mt19937_64 rng(909);
  auto f7 = Field::of_order(7);
  const Field* f = f7.get();
  DiagonalForm F(f7, polys(f, {"1", "t", "2", "t+3"}));
  {
    std::vector<Poly> c = polys(f, {"t+1", "2*t", "3", "t+5"});
    auto H = eight_factor_product(F, c);
    o.expect(H.has_value(), "eight-factor product left radicals");
    if (H) {
      o.expect(dual_square(F, c, true) == *H * *H, "resultant chain != eight-factor square");
      Poly v = dual_eval(F, c).value;
      o.expect(v == *H || v == -*H, "F*(c) != +-eight-factor product");
    }
  }
  for (int s = 0; s < 100; ++s) {
    std::vector<Poly> c;
    for (int i = 0; i < 4; ++i) c.push_back(Poly::from_index(f, rng() % 343));
    const Poly base = dual_square(F, c);
    // Scaling c by a unit u scales F*(c)^2 by u^{3 * 2^{n-1}} ... compared through zero sets and degrees.
    Elem u = static_cast<Elem>(1 + rng() % 6);
    std::vector<Poly> cu;
    for (const auto& ci : c) cu.push_back(ci.scaled(u));
    Poly scaled = dual_square(F, cu);
    o.expect(scaled.is_zero() == base.is_zero() && (base.is_zero() || scaled.deg() == base.deg()),
             "scaling c=" + show(c));
    // Simultaneous permutation of F and c.
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Poly> Fp, cp;
    for (int i : perm) {
      Fp.push_back(F[i]);
      cp.push_back(c[static_cast<size_t>(i)]);
    }
    o.expect(dual_square(DiagonalForm(f7, Fp), cp) == base, "permutation c=" + show(c));
  }
  std::uint64_t specials = 0;
  for (int q : {5, 7}) {
    auto fp = Field::of_order(q);
    DiagonalForm G(fp, polys(fp.get(), {"1", "1", "1", "1"}));
    auto box = polys_below(fp.get(), 2);
    for (const auto& a : box)
      for (const auto& b : box)
        for (const auto& c : box)
          for (const auto& d : box) {
            std::vector<Poly> v{a, b, c, d};
            if (a.is_zero() || b.is_zero() || c.is_zero() || d.is_zero()) continue;
            // Special candidates satisfy the pairing equations; test those.
            if (classify_solution(G, v) != SolutionClass::special) continue;
            ++specials;
            o.expect(dual_is_zero(G, v), "special but F*(c) != 0: " + show(v));
          }
  }
  if (o.pass)
    o.detail = std::to_string(grad) + " char-2 solutions, " + std::to_string(specials) + " special c, all with F*(c) = 0";
}

// ---- 10: special sums and the transform identity ----------------------------

CycNum T_direct(const SpecialSetup& s, const Poly& r, const Poly& j1, const Poly& j2) {
  const Field* f = r.field();
  const std::uint64_t N = ipow_u64(static_cast<std::uint64_t>(f->q()), r.deg());
  ZetaSum acc(f->p());
  for (auto ai : unit_residues(r)) {
    Poly a = Poly::from_index(f, ai);
    for (std::uint64_t h1 = 0; h1 < N; ++h1)
      for (std::uint64_t h2 = 0; h2 < N; ++h2) {
        Poly v = (a * s.Ftilde(j1, j2, Poly::from_index(f, h1), Poly::from_index(f, h2))) % r;
        acc.add_power(r.deg() == 0 ? 0 : f->trace(v.coeff(r.deg() - 1)));
      }
  }
  return acc.to_cyc();
}

void c10(Outcome& o) {
  auto fp = Field::of_order(5);
  const Field* f = fp.get();
  DiagonalForm F(fp, polys(f, {"1", "1", "1", "1"}));
  auto setups = special_param(F);
  o.expect(!setups.empty(), "no special setups for (1,1,1,1) over F_5");
  if (setups.empty()) return;
  const SpecialSetup& s = setups[0];
  std::uint64_t closed = 0, open = 0;
  const auto box = polys_below(f, 2);
  for (const Poly& w : monic_enum(f, 1))
    for (const Poly& j1 : box)
      for (const Poly& j2 : box) {
        if ((j1 * j2 % w).is_zero()) continue;
        auto c = T_r_j_closed(s, w, j1, j2);
        if (!c) {
          ++open;
          continue;
        }
        ++closed;
        o.expect(*c == T_direct(s, w * w, j1, j2), "T closed form w=" + format(w) + " j=(" + format(j1) + "," + format(j2) + ")");
      }
  o.expect(closed > 0, "no closed-form cases met");
  DeltaConfig cfg(F, Poly::t(f));
  for (const char* rs : {"1", "t", "t^2", "t^2+t"}) {
    SpecialTransformReport rep = special_transform_verify(s, cfg, parse_poly(rs, f));
    o.expect(rep.ok && rep.cells_ok == rep.cells && rep.lhs == rep.rhs, std::string("special transform r=") + rs);
  }
  for (const Poly& r : monic_upto(f, 3)) {
    const auto expect = static_cast<long>(totient(r) * ipow_u64(5, 2 * r.deg()));
    o.expect(T_r_j(s, r, Poly(f), Poly(f)) == CycNum::rational(5, expect), "T_r(0) r=" + format(r));
  }
  if (o.pass)
    o.detail = std::to_string(closed) + " closed-form cases vs direct sums (" + std::to_string(open) +
               " (w, j) excluded by the bad-prime condition)";
}

// ---- 11: line accounting ----------------------------------------------------

void c11(Outcome& o) {
  auto fp = Field::of_order(5);
  const Field* f = fp.get();
  DiagonalForm F(fp, polys(f, {"1", "1", "1", "1"}));
  auto lines = lines_of(F);
  std::string summary;
  for (int B = 0; B <= 2; ++B) {
    CircReport c = count_N_circ(F, B);
    std::uint64_t total = 0, on = 0;
    std::vector<std::vector<Poly>> cands(4, polys_below(f, B));
    solve_enumerate(cands, F.coeffs(), Poly(f), [&](const std::vector<Poly>& x) {
      ++total;
      bool hit = false;
      for (const auto& l : lines) hit = hit || l.contains(x);
      on += hit;
      if (hit) o.expect(F.eval(x).is_zero(), "line point off the surface " + show(x));
    });
    o.expect(total == c.total, "N mismatch at B=" + std::to_string(B));
    o.expect(c.on_lines == on && c.line_points == on, "line points at B=" + std::to_string(B));
    o.expect(c.circ.value + on == c.total, "N != N_circ + line points at B=" + std::to_string(B));
    summary += "B=" + std::to_string(B) + ": " + std::to_string(c.total) + " = " + std::to_string(c.circ.value) + " + " +
               std::to_string(on) + "; ";
  }
  if (o.pass) o.detail = summary;
}

// ---- 12: parabola measure ---------------------------------------------------

mpq_class parabola_oracle(const Field* f, const Laurent& a, int B, int D) {
  const std::uint64_t n = ipow_u64(static_cast<std::uint64_t>(f->q()), D);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Laurent x = digits_of(f, i, D);
    const int top = (x * x - a).top();
    hits += top == Laurent::kNoTop || top < -B;
  }
  return mpq_class(static_cast<unsigned long>(hits)) / mpq_class(static_cast<unsigned long>(n));
}

void c12(Outcome& o) {
  std::mt19937_64 rng(1212);
  std::map<int, int> over;   // q -> grid points above q min{|b|^1/2, |b||a|^-1/2}
  std::string first;
  for (int q : {2, 3}) {
    auto fp = field_of(q);
    const Field* f = fp.get();
    std::uniform_int_distribution<int> dig(0, q - 1);
    for (int A = 1; A <= 6; ++A)
      for (int B = 1; B <= 6; ++B)
        for (Elem lead = 1; lead < static_cast<Elem>(q); ++lead)
          for (int rep = 0; rep < 2; ++rep) {
            const int lo = -(std::max(A, B) + 2);
            std::vector<Elem> d(static_cast<size_t>(-lo), 0);
            for (int j = 0; lo + j < -A; ++j) d[static_cast<size_t>(j)] = static_cast<Elem>(dig(rng));
            d[static_cast<size_t>(-A - lo)] = lead;
            Laurent a = Laurent::from_digits(f, lo, d, true);
            Laurent b = Laurent::monomial(f, 1, -B);
            const std::string tag = "q=" + std::to_string(q) + " a=" + format(a) + " |b|=q^-" + std::to_string(B);
            mpq_class m = measure_parabola(a, b, true);
            mpq_class at = parabola_oracle(f, a, B, B + 1), deeper = parabola_oracle(f, a, B, B + 2);
            o.expect(at == deeper, "oracle not stable under +1 depth " + tag);
            o.expect(m == deeper, "measure " + m.get_str() + " != oracle " + deeper.get_str() + " " + tag);
            const double root = q * std::pow(q, -B / 2.0);
            const double bound = std::min(root, q * std::pow(q, -B + A / 2.0));
            ++o.checks;
            if (m.get_d() > bound * (1 + 1e-12)) {
              if (!over[q]++) first += " first at " + tag + " meas=" + m.get_str() + ";";
              // The weaker branch still has to hold.
              o.expect(m.get_d() <= root * (1 + 1e-12), "above q|b|^1/2 " + tag);
            }
          }
  }
  if (over[2] + over[3] > 0) {
    o.expect(false, std::to_string(over[2]) + " grid points at q=2 and " + std::to_string(over[3]) +
                        " at q=3 exceed q|b||a|^-1/2 (all within q|b|^1/2);" + first);
  }
}

// ---- 13: Waring ---------------------------------------------------------------

void c13(Outcome& o) {
  auto fp = Field::of_order(2);
  const Field* f = fp.get();
  Jq3 J = jq3_closure(f, 5);
  std::uint64_t inJ = 0, minR = ~0ull;
  for (int d = 3; d <= 5; ++d)
    for (const Poly& m : monic_enum(f, d)) {
      if (!J.contains(m)) continue;
      ++inJ;
      std::uint64_t R = count_R(f, 7, m).value;
      minR = std::min(minR, R);
      o.expect(R >= 1, "R_7(" + format(m) + ") = 0");
    }
  std::printf("    %llu targets in J with 3 <= deg P <= 5, min R_7 = %llu\n", static_cast<unsigned long long>(inJ),
              static_cast<unsigned long long>(minR));
  Poly P = parse_poly("t^4+t", f);
  auto rows = sing_series_waring(f, 7, P, 3);
  for (const auto& r : rows) {
    std::printf("    series P=t^4+t Y=%d increment=%s |increment|=%.3g partial=%s\n", r.Y, r.increment.str().c_str(),
                r.increment_abs, r.partial.str().c_str());
    o.expect(r.partial.conj() == r.partial, "series partial not real at Y=" + std::to_string(r.Y));
  }
  for (size_t i = 1; i < rows.size(); ++i)
    o.expect(rows[i].partial == rows[i - 1].partial + rows[i].increment, "series increments inconsistent");
  auto f5 = Field::of_order(5);
  DiagonalForm F(f5, std::vector<Poly>(7, Poly::constant(f5.get(), 1)));
  std::vector<Laurent> x0(7, Laurent(f5.get()));
  x0[0] = Laurent::monomial(f5.get(), 1, -1);
  x0[1] = Laurent::monomial(f5.get(), 4, -1);
  SingIntegral si = sing_integral_wa(F, x0, 1);
  for (int Y = si.threshold; Y <= si.threshold + 1; ++Y) {
    mpq_class v = sing_integral_wa_truncated(F, x0, 1, Y, Y == si.threshold);
    std::printf("    singular integral Y=%d: %s (closed form %s)\n", Y, v.get_str().c_str(), si.closed.get_str().c_str());
    o.expect(v == si.closed, "truncated singular integral != closed form at Y=" + std::to_string(Y));
  }
  if (o.pass) o.detail = std::to_string(inJ) + " targets represented; series and singular integral exact";
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 64;
    }
  }
  const std::vector<Criterion> all{
      {1, "character additivity and orthogonality", 5, c1},
      {2, "linear and Ramanujan closed forms", 30, c2},
      {3, "CRT multiplicativity of S_r(c)", 60, c3},
      {4, "vanishing of S_{w^k}(c) off the dual hypersurface", 120, c4},
      {5, "delta-method identity and N0/E1/E2 partition", 600, c5},
      {6, "r-independence of the theta-averaged integral", 120, c6},
      {7, "Farey dissection partitions T", 10, c7},
      {8, "Davenport table M(P), q=2, B=1..6", 300, c8},
      {9, "dual form suite", 180, c9},
      {10, "special sums and the special-solution transform", 600, c10},
      {11, "n=4 line accounting", 120, c11},
      {12, "parabola measure grid", 60, c12},
      {13, "Waring representability, series and singular integral", 600, c13},
  };
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 64;
  }
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs > c.limit_s) {
      o.pass = false;
      o.detail = "over the time limit of " + std::to_string(static_cast<int>(c.limit_s)) + " s";
    }
    std::printf("%s criterion %d: %s [%llu checks, %.2f s]%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                static_cast<unsigned long long>(o.checks), secs, o.detail.empty() ? "" : " -- ", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
