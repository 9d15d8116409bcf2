#include <gtest/gtest.h>

#include "ffcubes/delta.hpp"
#include "ffcubes/expsums.hpp"

using namespace ffc;

namespace {

DiagonalForm ones(const std::shared_ptr<const Field>& f, int n) {
  return DiagonalForm(f, std::vector<Poly>(static_cast<size_t>(n), Poly::constant(f.get(), 1)));
}

CycNum Q(int p, long num, long den = 1) { return CycNum::rational(p, mpq_class(num, den)); }

// #{x in O^n : F(x) = 0, |x| = q^{B-1}} by nested loops.
std::uint64_t brute_annulus(const DiagonalForm& F, int B) {
  auto xs = polys_below(F.field(), B);
  const size_t n = static_cast<size_t>(F.n());
  std::vector<size_t> idx(n, 0);
  std::uint64_t hits = 0;
  while (true) {
    std::vector<Poly> x;
    int top = -1;
    for (auto i : idx) {
      x.push_back(xs[i]);
      top = std::max(top, xs[i].is_zero() ? -1 : xs[i].deg());
    }
    if (top == B - 1 && F.eval(x).is_zero()) ++hits;
    size_t k = 0;
    while (k < n && ++idx[k] == xs.size()) idx[k++] = 0;
    if (k == n) break;
  }
  return hits;
}

}  // namespace

TEST(DeltaIntegrals, TrivialAnnulusMeasure) {
  for (int q : {2, 5}) {
    auto f = Field::of_order(q);
    const int p = f->p();
    CycNum v = J_f(Laurent(f.get()), {Laurent(f.get())}, ones(f, 1), Weight::annulus(), true);
    EXPECT_EQ(v, Q(p, q - 1, q));
    CycNum v2 = J_f(Laurent(f.get()), {Laurent(f.get()), Laurent(f.get())}, ones(f, 2), Weight::annulus(), true);
    EXPECT_EQ(v2, Q(p, q * q - 1, q * q));
  }
}

TEST(DeltaIntegrals, LargeFrequencyVanishes) {
  auto f = Field::of_order(5);
  DiagonalForm F = ones(f, 1);
  Laurent g = parse_laurent("t^-2", f.get());
  for (const char* v : {"t", "t^2", "3*t+1"}) {
    Laurent w = parse_laurent(v, f.get());
    EXPECT_TRUE(J_f(g, {w}, F, Weight::annulus(), true).is_zero()) << v;
  }
}

TEST(DeltaIntegrals, ProductPathMatchesGeneric) {
  for (int q : {2, 5}) {
    auto f = Field::of_order(q);
    DiagonalForm F(f, {Poly::constant(f.get(), 1), parse_poly("t+1", f.get())});
    for (const char* g : {"0", "t^-1", "t^-2+t^-3", "t^-4"})
      for (const char* v : {"0", "t^-1", "1"}) {
        Laurent gl = parse_laurent(g, f.get()), vl = parse_laurent(v, f.get());
        std::vector<Laurent> w{vl, Laurent(f.get())};
        EXPECT_EQ(J_f(gl, w, F, Weight::annulus(), true), J_f_generic(gl, w, F, Weight::annulus(), true))
            << q << " " << g << " " << v;
      }
  }
}

TEST(DeltaIntegrals, IrThetaGenericPath) {
  auto f = Field::of_order(2);
  DeltaConfig cfg(ones(f, 2), parse_poly("t^2", f.get()));
  Poly r = parse_poly("t+1", f.get());
  for (const auto& cell : theta_cells(cfg, r))
    for (int ci = 0; ci < 16; ++ci) {
      std::vector<Poly> c{Poly::from_index(f.get(), static_cast<std::uint64_t>(ci % 4)),
                          Poly::from_index(f.get(), static_cast<std::uint64_t>(ci / 4))};
      EXPECT_EQ(I_r_theta_c(cfg, r, cell.theta, c), I_r_theta_c(cfg, r, cell.theta, c, true));
    }
}

TEST(DeltaIntegrals, IhatRoutesAndModulusIndependence) {
  auto f = Field::of_order(2);
  DeltaConfig cfg(ones(f, 2), parse_poly("t^2", f.get()));
  cfg.paranoid = true;
  const long dens[] = {32, 64, 128, 256};
  const long nums[] = {1, 3, 3, 3};
  for (int Y = 0; Y <= 3; ++Y) {
    for (int ci = 0; ci < 16; ++ci) {
      std::vector<Poly> c{Poly::from_index(f.get(), static_cast<std::uint64_t>(ci % 4)),
                          Poly::from_index(f.get(), static_cast<std::uint64_t>(ci / 4))};
      CycNum ref = I_hat(cfg, Y, c);
      for (const Poly& r : monic_enum(f.get(), Y)) {
        EXPECT_EQ(I_hat(cfg, r, c, IhatRoute::collapse), ref) << "Y=" << Y << " r=" << format(r);
        EXPECT_EQ(I_hat(cfg, r, c, IhatRoute::enumerate), ref) << "Y=" << Y << " r=" << format(r);
      }
      if (ci == 0) EXPECT_EQ(ref, Q(2, nums[Y], dens[Y])) << Y;
    }
  }
}

TEST(DeltaIdentity, SmallInstancesAllMethods) {
  auto f = Field::of_order(2);
  DiagonalForm F = ones(f, 2);
  for (const char* Ps : {"t", "t+1", "t^2", "t^2+t+1"}) {
    Poly P = parse_poly(Ps, f.get());
    DeltaConfig cfg(F, P);
    cfg.paranoid = true;
    const std::uint64_t lhs = brute_annulus(F, P.deg());
    EXPECT_EQ(lhs, P.deg() == 1 ? 1u : 2u);
    for (auto m : {RhsMethod::product, RhsMethod::per_c, RhsMethod::generic}) {
      DeltaReport r = delta_verify(cfg, m);
      EXPECT_TRUE(r.equal) << Ps << " " << to_string(m);
      EXPECT_EQ(r.lhs, mpq_class(static_cast<long>(lhs)));
      EXPECT_EQ(r.rhs, Q(2, static_cast<long>(lhs)));
    }
  }
}

TEST(DeltaIdentity, BoundaryQ) {
  auto f = Field::of_order(2);
  Poly P = parse_poly("t^2", f.get());
  // |P|^{3/2} = q^3: Q = 3 is the minimum, Q = 4 the maximum.
  for (int Qv : {3, 4}) {
    DeltaConfig cfg(ones(f, 2), P, Weight::annulus(), Qv);
    EXPECT_TRUE(delta_verify(cfg).equal) << Qv;
  }
  EXPECT_THROW(DeltaConfig(ones(f, 2), P, Weight::annulus(), 2), std::invalid_argument);
  EXPECT_THROW(DeltaConfig(ones(f, 2), P, Weight::annulus(), 5), std::invalid_argument);
}

TEST(DeltaIdentity, ThreeVariables) {
  auto f = Field::of_order(2);
  DiagonalForm F(f, {Poly::constant(f.get(), 1), Poly::constant(f.get(), 1), Poly::t(f.get())});
  DeltaConfig cfg(F, parse_poly("t^2+t", f.get()));
  DeltaReport r = delta_verify(cfg);
  EXPECT_TRUE(r.equal);
  EXPECT_EQ(r.lhs, mpq_class(static_cast<long>(brute_annulus(F, 2))));
}

TEST(DeltaIdentity, QuarticFormOverF5) {
  auto f = Field::of_order(5);
  DiagonalForm F = ones(f, 4);
  DeltaConfig cfg(F, Poly::t(f.get()));
  DeltaReport r = delta_verify(cfg);
  EXPECT_TRUE(r.equal);
  EXPECT_EQ(r.lhs, mpq_class(static_cast<long>(brute_annulus(F, 1))));
  EXPECT_EQ(r.lhs, 124);
}

TEST(Partition, SumsToCount) {
  auto f = Field::of_order(2);
  for (const char* Ps : {"t", "t^2"}) {
    DeltaConfig cfg(ones(f, 2), parse_poly(Ps, f.get()));
    NEEReport r = partition_NEE(cfg);
    EXPECT_TRUE(r.ok) << Ps;
    EXPECT_EQ(r.N0 + r.E1 + r.E2, CycNum::rational(2, r.lhs));
    EXPECT_FALSE(r.split_E2);
  }
  // F = (1, t): the dual form never vanishes off c = 0 in characteristic 2 boxes this small.
  DiagonalForm G(f, {Poly::constant(f.get(), 1), Poly::t(f.get())});
  NEEReport g = partition_NEE(DeltaConfig(G, Poly::t(f.get())));
  EXPECT_TRUE(g.ok);
  if (g.dual_zeros == 0) EXPECT_TRUE(g.E2.is_zero());
}

TEST(Partition, FourWaySplitOverF5) {
  auto f = Field::of_order(5);
  DeltaConfig cfg(ones(f, 4), Poly::t(f.get()));
  NEEReport r = partition_NEE(cfg);
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.split_E2);
  EXPECT_EQ(r.E2_ord + r.E2_spec, r.E2);
  EXPECT_EQ(r.N0 + r.E1 + r.E2, Q(5, 124));
}

TEST(Poisson, MatchesDirectSum) {
  auto f = Field::of_order(2);
  DiagonalForm F = ones(f, 2);
  for (int E = 0; E <= 2; ++E)
    for (const char* g : {"0", "t^-3", "t^-4+t^-5", "t^-7"}) {
      Laurent gl = parse_laurent(g, f.get());
      PoissonReport r = poisson_check(F, gl, E);
      EXPECT_TRUE(r.equal) << E << " " << g;
      // Direct left side: sum over |z| = q^E of (-1)^{psi exponent}.
      long direct = 0;
      for (const Poly& a : polys_below(f.get(), E + 1))
        for (const Poly& b : polys_below(f.get(), E + 1)) {
          if (std::max(a.is_zero() ? -1 : a.deg(), b.is_zero() ? -1 : b.deg()) != E) continue;
          direct += psi_exp(gl * Laurent::from_poly(a * a * a + b * b * b)) ? -1 : 1;
        }
      EXPECT_EQ(r.lhs, Q(2, direct)) << E << " " << g;
    }
}

TEST(SpecialTransform, SmallModuli) {
  auto f = Field::of_order(5);
  DiagonalForm F = ones(f, 4);
  auto setups = special_param(F);
  ASSERT_FALSE(setups.empty());
  DeltaConfig cfg(F, Poly::t(f.get()));
  cfg.paranoid = true;
  for (const char* rs : {"1", "t", "t^2", "t^2+t"}) {
    SpecialTransformReport rep = special_transform_verify(setups[0], cfg, parse_poly(rs, f.get()));
    EXPECT_TRUE(rep.ok) << rs;
    EXPECT_TRUE(rep.avg_routes_agree) << rs;
    EXPECT_EQ(rep.cells_ok, rep.cells) << rs;
    EXPECT_EQ(rep.lhs, rep.rhs) << rs;
  }
}

TEST(SpecialTransform, FarJVanishes) {
  auto f = Field::of_order(5);
  DiagonalForm F = ones(f, 4);
  auto setups = special_param(F);
  ASSERT_FALSE(setups.empty());
  DeltaConfig cfg(F, Poly::t(f.get()));
  Poly r = Poly::t(f.get());
  Laurent theta(f.get());
  Poly far = parse_poly("t^3", f.get());
  EXPECT_TRUE(J_r_j(setups[0], cfg, r, far, Poly(f.get()), theta).is_zero());
  EXPECT_TRUE(J_r_j_avg(setups[0], cfg, r, Poly(f.get()), far).is_zero());
}
