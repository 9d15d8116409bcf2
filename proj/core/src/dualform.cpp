#include "ffcubes/dualform.hpp"

#include <stdexcept>

#include "ffcubes/residue.hpp"

namespace ffc {

namespace {

using ZPoly = std::vector<Poly>;  // polynomial in z, coefficients in O, ascending

Poly zeval(const ZPoly& Q, const Poly& z) {
  Poly r(z.field());
  for (int i = static_cast<int>(Q.size()) - 1; i >= 0; --i) r = r * z + Q[i];
  return r;
}

ZPoly zmul(const ZPoly& a, const ZPoly& b, const Field* f) {
  ZPoly r(a.size() + b.size() - 1, Poly(f));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

// Binomial coefficients mod p as field elements, rows 0..N.
std::vector<std::vector<Elem>> binom_table(const Field* f, int N) {
  std::vector<std::vector<Elem>> C(static_cast<size_t>(N + 1));
  for (int j = 0; j <= N; ++j) {
    C[j].assign(static_cast<size_t>(j + 1), 1);
    for (int i = 1; i < j; ++i) C[j][i] = f->add(C[j - 1][i - 1], C[j - 1][i]);
  }
  return C;
}

std::vector<Poly> u_values(const DiagonalForm& F, const std::vector<Poly>& c) {
  const int n = F.n();
  if (static_cast<int>(c.size()) != n) throw std::invalid_argument("frequency vector has the wrong dimension");
  std::vector<Poly> u(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    Poly v = c[k] * c[k] * c[k];
    for (int i = 0; i < n; ++i)
      if (i != k) v = v * F[i];
    u[k] = v;
  }
  return u;
}

// (E, O) with Q(z + s) = E(z) + s O(z), s^2 = u.
std::pair<ZPoly, ZPoly> split_shift(const ZPoly& Q, const Poly& u, const std::vector<std::vector<Elem>>& C,
                                    const Field* f) {
  const int m = static_cast<int>(Q.size()) - 1;
  std::vector<Poly> upow(static_cast<size_t>(m / 2 + 1));
  upow[0] = Poly::constant(f, 1);
  for (size_t i = 1; i < upow.size(); ++i) upow[i] = upow[i - 1] * u;
  ZPoly E(static_cast<size_t>(m + 1), Poly(f)), O(static_cast<size_t>(std::max(m, 1)), Poly(f));
  for (int l = 0; l <= m; ++l) {
    for (int i = 0; l + i <= m; ++i) {
      const Poly& qc = Q[l + i];
      if (qc.is_zero()) continue;
      Elem b = C[l + i][i];
      if (!b) continue;
      Poly term = qc.scaled(b) * upow[i / 2];
      if (i % 2 == 0) {
        E[l] += term;
      } else {
        O[l] += term;
      }
    }
  }
  return {E, O};
}

}  // namespace

Poly dual_square(const DiagonalForm& F, const std::vector<Poly>& c, bool cross_check) {
  const Field* f = F.field();
  if (f->p() == 2) throw std::invalid_argument("dual_square is the characteristic > 3 route");
  const int n = F.n();
  auto u = u_values(F, c);
  const int maxdeg = 1 << n;
  auto C = binom_table(f, maxdeg);
  ZPoly Q = {Poly(f), Poly::constant(f, 1)};  // Q_0(z) = z
  for (int k = 0; k < n; ++k) {
    auto [E, O] = split_shift(Q, u[k], C, f);
    if (k == n - 1 && !cross_check) {
      Poly e0 = E[0], o0 = O[0];
      return e0 * e0 - u[k] * o0 * o0;
    }
    ZPoly E2 = zmul(E, E, f), O2 = zmul(O, O, f);
    ZPoly next(E2.size(), Poly(f));
    for (size_t i = 0; i < E2.size(); ++i) next[i] = E2[i];
    for (size_t i = 0; i < O2.size(); ++i) next[i] -= u[k] * O2[i];
    while (next.size() > 1 && next.back().is_zero()) next.pop_back();
    if (cross_check) {
      for (int probe = 0; probe < 2; ++probe) {
        Poly z0 = probe == 0 ? Poly(f) : Poly::t(f) + Poly::constant(f, static_cast<Elem>(k % f->q()));
        std::vector<Poly> B = {z0 * z0 - u[k], -(z0 + z0), Poly::constant(f, 1)};
        Poly res = sylvester_resultant(Q, B);
        if (!(res == zeval(next, z0))) throw std::logic_error("dual-form chain disagrees with the Sylvester resultant");
      }
    }
    Q = std::move(next);
  }
  return Q[0];
}

DualEval dual_eval(const DiagonalForm& F, const std::vector<Poly>& c, bool cross_check) {
  const Field* f = F.field();
  const int n = F.n();
  if (static_cast<int>(c.size()) != n) throw std::invalid_argument("frequency vector has the wrong dimension");
  if (f->p() == 2) {
    Poly s(f);
    for (int i = 0; i < n; ++i) {
      Poly v = c[i] * c[i] * c[i];
      for (int j = 0; j < n; ++j)
        if (j != i) v = v * F[j];
      s += v;
    }
    return {s, DualMethod::char2_closed_form};
  }
  Poly sq = dual_square(F, c, cross_check);
  if (sq.is_zero()) return {sq, DualMethod::resultant_sqrt};
  auto root = square_root(sq);
  if (!root) throw std::logic_error("dual-form square is not a square in O: " + format(sq));
  Poly r = *root, rn = -r;
  return {rn.lc() < r.lc() ? rn : r, DualMethod::resultant_sqrt};
}

bool dual_is_zero(const DiagonalForm& F, const std::vector<Poly>& c) {
  if (F.field()->p() == 2) return dual_eval(F, c).value.is_zero();
  return dual_square(F, c).is_zero();
}

const char* to_string(SolutionClass s) {
  switch (s) {
    case SolutionClass::nonzero:
      return "nonzero";
    case SolutionClass::special:
      return "special";
    case SolutionClass::ordinary:
      return "ordinary";
  }
  return "?";
}

namespace {

constexpr int kPairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};

bool pair_matches(const DiagonalForm& F, const std::vector<Poly>& c, int i, int j) {
  return F[j] * c[i] * c[i] * c[i] == F[i] * c[j] * c[j] * c[j];
}

}  // namespace

SolutionClass classify_solution(const DiagonalForm& F, const std::vector<Poly>& c) {
  if (F.n() != 4) throw std::invalid_argument("classification needs n = 4");
  if (!dual_is_zero(F, c)) return SolutionClass::nonzero;
  for (const auto& ci : c)
    if (ci.is_zero()) return SolutionClass::ordinary;
  for (const auto& pr : kPairings)
    if (pair_matches(F, c, pr[0], pr[1]) && pair_matches(F, c, pr[2], pr[3])) return SolutionClass::special;
  return SolutionClass::ordinary;
}

DualCount dual_count(const DiagonalForm& F, int C) {
  const Field* f = F.field();
  const int n = F.n();
  const std::uint64_t per = ipow_u64(static_cast<std::uint64_t>(f->q()), C + 1);
  const std::uint64_t total = ipow_u64(per, n);
  DualCount out;
  std::vector<Poly> c(static_cast<size_t>(n));
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    std::uint64_t v = idx;
    for (int i = 0; i < n; ++i) {
      c[i] = Poly::from_index(f, v % per);
      v /= per;
    }
    if (n == 4 && f->p() != 2) {
      SolutionClass s = classify_solution(F, c);
      if (s == SolutionClass::special) ++out.special;
      if (s == SolutionClass::ordinary) ++out.ordinary;
    } else if (dual_is_zero(F, c)) {
      ++out.ordinary;
    }
  }
  out.total = out.ordinary + out.special;
  return out;
}

Poly BinaryCubic::eval(const Poly& y, const Poly& z) const {
  return g[0] * y * y * y + g[1] * y * y * z + g[2] * y * z * z + g[3] * z * z * z;
}

namespace {

// lambda ((a y + b z)^3 * A + (c y + d z)^3 * B) as a binary cubic.
BinaryCubic cube_sum(const Poly& A, const Poly& a, const Poly& b, const Poly& B, const Poly& c, const Poly& d) {
  const Field* f = A.field();
  Elem three = f->from_int(3);
  BinaryCubic g;
  g.g[0] = A * a * a * a + B * c * c * c;
  g.g[1] = (A * a * a * b + B * c * c * d).scaled(three);
  g.g[2] = (A * a * b * b + B * c * d * d).scaled(three);
  g.g[3] = A * b * b * b + B * d * d * d;
  return g;
}

// y Q(y, z) with Q = (lambda/4)(y^2 + 3 (2 r s z - (r s' + r' s) y)^2).
BinaryCubic closed_shape(const Poly& lambda, const Poly& r, const Poly& s, const Poly& rp, const Poly& sp) {
  const Field* f = lambda.field();
  Elem inv4 = f->inv(f->from_int(4));
  Elem three = f->from_int(3);
  Poly A = (r * s).scaled(f->from_int(2));  // coefficient of z
  Poly Bc = r * sp + rp * s;                // minus coefficient of y
  BinaryCubic g;
  // (A z - Bc y)^2 = Bc^2 y^2 - 2 A Bc y z + A^2 z^2
  g.g[0] = lambda * (Poly::constant(f, 1) + (Bc * Bc).scaled(three));
  g.g[1] = lambda * (A * Bc).scaled(f->neg(f->mul(three, f->from_int(2))));
  g.g[2] = lambda * (A * A).scaled(three);
  g.g[3] = Poly(f);
  for (auto& x : g.g) x = x.scaled(inv4);
  return g;
}

bool same(const BinaryCubic& a, const BinaryCubic& b) {
  for (int i = 0; i < 4; ++i)
    if (!(a.g[i] == b.g[i])) return false;
  return true;
}

}  // namespace

std::vector<Poly> SpecialSetup::x_of(const Poly& y1, const Poly& y2, const Poly& z1, const Poly& z2) const {
  return {rhop[1] * y1 - rho[1] * z1, rho[0] * z1 - rhop[0] * y1, rhop[3] * y2 - rho[3] * z2,
          rho[2] * z2 - rhop[2] * y2};
}

Poly SpecialSetup::Ftilde(const Poly& y1, const Poly& y2, const Poly& z1, const Poly& z2) const {
  return G1.eval(y1, z1) + G2.eval(y2, z2);
}

Poly SpecialSetup::F0(const Poly& j1, const Poly& j2) const {
  return lambda * j1 * j1 * j1 + mu * j2 * j2 * j2;
}

std::vector<Poly> SpecialSetup::c_of(const Poly& d1, const Poly& d2) const {
  return {rho[0] * d1, rho[1] * d1, rho[2] * d2, rho[3] * d2};
}

std::vector<SpecialSetup> special_param(const DiagonalForm& F) {
  if (F.n() != 4) throw std::invalid_argument("special_param needs n = 4");
  const Field* f = F.field();
  if (f->p() == 2) throw std::invalid_argument("special_param needs characteristic > 3");
  std::vector<SpecialSetup> out;
  auto r12 = cube_ratio_all(F[0], F[1]);
  auto r34 = cube_ratio_all(F[2], F[3]);
  for (const auto& [b1, b2] : r12) {
    for (const auto& [b3, b4] : r34) {
      SpecialSetup s;
      s.rho[0] = b1;
      s.rho[1] = b2;
      s.rho[2] = b3;
      s.rho[3] = b4;
      auto [lam, rem1] = divmod(F[0], b1 * b1 * b1);
      auto [mu, rem3] = divmod(F[2], b3 * b3 * b3);
      if (!rem1.is_zero() || !rem3.is_zero() || !(lam * b2 * b2 * b2 == F[1]) || !(mu * b4 * b4 * b4 == F[3]))
        throw std::logic_error("cube ratio does not split the coefficients");
      s.lambda = lam;
      s.mu = mu;
      for (int p = 0; p < 2; ++p) {
        const Poly& a = s.rho[2 * p];
        const Poly& b = s.rho[2 * p + 1];
        Xgcd g = xgcd(a, b);
        if (!g.g.is_one()) throw std::logic_error("rho pair is not coprime");
        // a * s + b * u = 1  ->  rho_b' = s, rho_a' = -u
        s.rhop[2 * p + 1] = g.s;
        s.rhop[2 * p] = -g.u;
        if (!(a * s.rhop[2 * p + 1] - b * s.rhop[2 * p]).is_one()) throw std::logic_error("Bezout complement failed");
      }
      // F(x(y,z)) per block: x_1 = rho_2' y - rho_2 z, x_2 = -rho_1' y + rho_1 z.
      s.G1 = cube_sum(F[0], s.rhop[1], -s.rho[1], F[1], -s.rhop[0], s.rho[0]);
      s.G2 = cube_sum(F[2], s.rhop[3], -s.rho[3], F[3], -s.rhop[2], s.rho[2]);
      if (!same(s.G1, closed_shape(s.lambda, s.rho[0], s.rho[1], s.rhop[0], s.rhop[1])) ||
          !same(s.G2, closed_shape(s.mu, s.rho[2], s.rho[3], s.rhop[2], s.rhop[3])))
        throw std::logic_error("F(x(y,z)) does not match y Q(y,z)");
      out.push_back(std::move(s));
    }
  }
  return out;
}

bool LineDesc::contains(const std::vector<Poly>& x) const {
  return (bi * x[i] + bj * x[j]).is_zero() && (bk * x[k] + bl * x[l]).is_zero();
}

std::string LineDesc::str() const {
  return "(" + std::to_string(i + 1) + " " + std::to_string(j + 1) + " | " + std::to_string(k + 1) + " " +
         std::to_string(l + 1) + ") : " + format(bi) + "," + format(bj) + " ; " + format(bk) + "," + format(bl);
}

std::vector<LineDesc> lines_of(const DiagonalForm& F) {
  if (F.n() != 4) throw std::invalid_argument("lines_of needs n = 4");
  const Field* f = F.field();
  std::vector<LineDesc> out;
  for (const auto& pr : kPairings) {
    auto a = cube_ratio_all(F[pr[0]], F[pr[1]]);
    auto b = cube_ratio_all(F[pr[2]], F[pr[3]]);
    for (const auto& [bi, bj] : a) {
      for (const auto& [bk, bl] : b) {
        LineDesc L{pr[0], pr[1], pr[2], pr[3], bi, bj, bk, bl};
        // x_i = b_j u, x_j = -b_i u (and likewise for k, l) must give F = 0 identically.
        Poly cu = F[L.i] * bj * bj * bj - F[L.j] * bi * bi * bi;
        Poly cv = F[L.k] * bl * bl * bl - F[L.l] * bk * bk * bk;
        if (!cu.is_zero() || !cv.is_zero()) throw std::logic_error("line does not lie on F = 0");
        out.push_back(std::move(L));
      }
    }
  }
  (void)f;
  return out;
}

}  // namespace ffc
