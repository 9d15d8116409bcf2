#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "ffcubes/dualform.hpp"
#include "ffcubes/expsums.hpp"

using namespace ffc;

namespace {

std::vector<Poly> P(const Field* f, std::initializer_list<const char*> xs) {
  std::vector<Poly> v;
  for (const char* x : xs) v.push_back(parse_poly(x, f));
  return v;
}

CycNum Z(const Field* f, long long v) { return CycNum::rational(f->p(), mpq_class(static_cast<long>(v))); }

// Direct sum over a and x of psi(a Ftilde(j, h) / r) with h over (O/r)^2.
CycNum T_direct(const SpecialSetup& s, const Poly& r, const Poly& j1, const Poly& j2) {
  const Field* f = r.field();
  const std::uint64_t N = ipow_u64(f->q(), r.deg());
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

}  // namespace

TEST(LinearSums, Examples) {
  auto f = Field::of_order(2);
  Poly t = Poly::t(f.get()), one = Poly::constant(f.get(), 1);
  EXPECT_EQ(linear_full_sum(t, t), Z(f.get(), 2));
  EXPECT_EQ(linear_full_sum(one, t), Z(f.get(), 0));
  EXPECT_EQ(linear_full_sum(Poly(f.get()), one), Z(f.get(), 1));
  EXPECT_THROW(linear_full_sum(one, Poly(f.get())), std::invalid_argument);
}

TEST(RamanujanSums, Examples) {
  auto f = Field::of_order(2);
  Poly t = Poly::t(f.get()), one = Poly::constant(f.get(), 1);
  EXPECT_EQ(ramanujan_sum(one, t, 1), Z(f.get(), -1));
  EXPECT_EQ(ramanujan_sum(t, t, 1), Z(f.get(), 1));
  EXPECT_EQ(ramanujan_sum(one, t, 2), Z(f.get(), 0));
  EXPECT_THROW(ramanujan_sum(one, parse_poly("t^2+1", f.get()), 1), std::invalid_argument);
}

TEST(RamanujanSums, ThreeRoutesAgree) {
  for (int q : {2, 5}) {
    auto f = Field::of_order(q);
    for (int dw = 1; dw <= 2; ++dw)
      for (const Poly& w : irreducible_enum(f.get(), dw))
        for (int k = 1; k <= 2; ++k) {
          const std::uint64_t N = ipow_u64(q, dw * k);
          for (std::uint64_t ai = 0; ai < N; ++ai) {
            Poly a = Poly::from_index(f.get(), ai);
            CycNum c = ramanujan_sum(a, w, k);
            EXPECT_EQ(c, ramanujan_sum_brute(a, w, k));
            EXPECT_EQ(c, ramanujan_sum_functional(a, w, k));
            Poly r = pow(w, static_cast<unsigned>(k));
            EXPECT_EQ(linear_full_sum(a, r), linear_full_sum_brute(a, r));
            EXPECT_EQ(linear_full_sum(a, r), linear_full_sum_functional(a, r));
          }
        }
  }
}

TEST(SrAc, Examples) {
  auto f = Field::of_order(2);
  Poly t = Poly::t(f.get()), one = Poly::constant(f.get(), 1), zero(f.get());
  EXPECT_EQ(S_r_ac(one, one, zero, zero), Z(f.get(), 1));
  EXPECT_EQ(S_r_ac(one, t, one, zero), Z(f.get(), 0));
  EXPECT_EQ(S_r_ac(one, t, one, one), Z(f.get(), 2));
  EXPECT_THROW(S_r_ac(one, t, t, zero), std::invalid_argument);
}

TEST(SrC, Examples) {
  auto f = Field::of_order(2);
  DiagonalForm F(f, P(f.get(), {"1", "1"}));
  Poly one = Poly::constant(f.get(), 1);
  EXPECT_EQ(S_r_c(F, one, P(f.get(), {"t", "t+1"})), Z(f.get(), 1));
  EXPECT_EQ(S_r_c(F, Poly::t(f.get()), P(f.get(), {"0", "0"})), Z(f.get(), 0));
  auto c = P(f.get(), {"1", "t"});
  EXPECT_EQ(S_r_c(F, parse_poly("t^2+t", f.get()), c),
            S_r_c(F, Poly::t(f.get()), c) * S_r_c(F, parse_poly("t+1", f.get()), c));
}

TEST(SrC, ProductMatchesBruteForce) {
  for (int q : {2, 4, 5}) {
    auto f = Field::of_order(q);
    std::vector<DiagonalForm> forms;
    forms.emplace_back(f, P(f.get(), {"1", "1"}));
    forms.emplace_back(f, P(f.get(), {"1", "t", "t+1"}));
    if (q == 2) forms.emplace_back(f, P(f.get(), {"1", "1", "t", "1"}));
    std::mt19937_64 rng(q);
    for (const auto& F : forms) {
      const int maxd = q == 2 ? 2 : 1;
      for (const Poly& r : monic_upto(f.get(), maxd)) {
        const std::uint64_t N = ipow_u64(q, r.deg());
        for (int s = 0; s < 6; ++s) {
          std::vector<Poly> c;
          for (int i = 0; i < F.n(); ++i) c.push_back(Poly::from_index(f.get(), rng() % std::max<std::uint64_t>(N, 1)));
          CycNum v = S_r_c(F, r, c);
          EXPECT_EQ(v, S_r_c_brute(F, r, c)) << format(r);
          EXPECT_TRUE(v.is_rational());
          EXPECT_EQ(mpq_class(static_cast<long>(S_r_c_int(F, r, c))), v.to_rational());
        }
      }
    }
  }
}

TEST(SrC, BoxMatchesPointwiseOnTwoPrimes) {
  auto f = Field::of_order(5);
  DiagonalForm F(f, P(f.get(), {"1", "1", "1", "2"}));
  Poly r = parse_poly("t^2+t+1", f.get());
  std::vector<std::vector<Poly>> cands(4);
  for (int i = 0; i < 4; ++i) cands[i] = {Poly(f.get()), Poly::constant(f.get(), 1), parse_poly("t+2", f.get())};
  auto b0 = S_r_box(F, r, cands, 0), b1 = S_r_box(F, r, cands, 1);
  EXPECT_EQ(b0, b1);
  std::size_t idx = 0;
  for (const auto& c3 : cands[3])
    for (const auto& c2 : cands[2])
      for (const auto& c1 : cands[1])
        for (const auto& c0 : cands[0]) {
          std::vector<Poly> c{c0, c1, c2, c3};
          EXPECT_EQ(mpq_class(static_cast<long>(b0[idx++])), S_r_c(F, r, c).to_rational());
        }
}

TEST(SrC, CrtMultiplicativity) {
  auto f = Field::of_order(2);
  DiagonalForm F(f, P(f.get(), {"1", "1"}));
  auto mon = monic_upto(f.get(), 2);
  std::mt19937_64 rng(9);
  for (const auto& r1 : mon)
    for (const auto& r2 : mon) {
      if (!gcd(r1, r2).is_one() || r1.deg() + r2.deg() > 3) continue;
      for (int s = 0; s < 4; ++s) {
        std::vector<Poly> c{Poly::from_index(f.get(), rng() % 16), Poly::from_index(f.get(), rng() % 16)};
        EXPECT_EQ(S_r_c(F, r1 * r2, c), S_r_c(F, r1, c) * S_r_c(F, r2, c));
      }
    }
}

TEST(Bracket, Examples) {
  auto f = Field::of_order(5);
  Poly w = parse_poly("t+1", f.get());
  EXPECT_EQ(bracket(w * w, parse_poly("t", f.get())), 1);
  EXPECT_EQ(bracket(w * w * w, w * parse_poly("t", f.get())), mpq_class(1, 5));
  EXPECT_EQ(bracket(w * w, w * w), 25);
  EXPECT_THROW(bracket(w, w), std::invalid_argument);
}

TEST(Vanishing, Example) {
  auto f = Field::of_order(5);
  DiagonalForm F(f, P(f.get(), {"1", "1", "1", "2"}));
  VanishingReport r = vanishing_check(F, Poly::t(f.get()), 2, P(f.get(), {"1", "0", "0", "0"}));
  EXPECT_FALSE(r.divides);
  EXPECT_TRUE(r.sum_is_zero);
  EXPECT_EQ(r.value, 0);
  VanishingReport z = vanishing_check(F, Poly::t(f.get()), 2, P(f.get(), {"0", "0", "0", "0"}));
  EXPECT_TRUE(z.divides);
  EXPECT_TRUE(z.ok());
}

TEST(Weyl, Examples) {
  auto f = Field::of_order(2);
  for (int B = 0; B <= 3; ++B) EXPECT_EQ(weyl_sum(Laurent(f.get()), B), Z(f.get(), ipow_u64(2, B)));
  EXPECT_EQ(weyl_sum(parse_laurent("t^-4", f.get()), 1), Z(f.get(), 2));
  EXPECT_THROW(weyl_sum(parse_laurent("t^-1 @lo=-2", f.get()), 2), std::domain_error);
  // Direct sum over x for a generic alpha.
  Laurent a = parse_laurent("t^-1+t^-3+t^-4+t^-7 @lo=-8", f.get());
  ZetaSum acc(2);
  for (const Poly& x : monic_upto(f.get(), 2)) acc.add_power(psi_exp(a * Laurent::from_poly(x * x * x)));
  acc.add_power(0);  // x = 0
  EXPECT_EQ(weyl_sum(a, 3), acc.to_cyc());
}

TEST(SpecialSums, TrZeroAndClosedForms) {
  auto f = Field::of_order(5);
  DiagonalForm F(f, P(f.get(), {"1", "1", "1", "1"}));
  auto setups = special_param(F);
  ASSERT_FALSE(setups.empty());
  const SpecialSetup& s = setups[0];
  Poly zero(f.get());
  EXPECT_EQ(T_r_j(s, Poly::t(f.get()), zero, zero), Z(f.get(), 100));
  for (const Poly& r : monic_upto(f.get(), 2))
    EXPECT_EQ(T_r_j(s, r, zero, zero), Z(f.get(), static_cast<long long>(totient(r) * ipow_u64(5, 2 * r.deg()))));
  int closed = 0;
  for (const Poly& w : monic_enum(f.get(), 1))
    for (const Poly& j1 : monic_upto(f.get(), 1))
      for (const Poly& j2 : monic_upto(f.get(), 1)) {
        auto c = T_r_j_closed(s, w, j1, j2);
        if (!c) continue;
        ++closed;
        EXPECT_EQ(*c, T_direct(s, w * w, j1, j2));
      }
  EXPECT_GT(closed, 0);
  // CRT multiplicativity in r.
  Poly j1 = parse_poly("t+2", f.get()), j2 = parse_poly("1", f.get());
  Poly r1 = Poly::t(f.get()), r2 = parse_poly("t+1", f.get());
  EXPECT_EQ(T_r_j(s, r1 * r2, j1, j2), T_r_j(s, r1, j1, j2) * T_r_j(s, r2, j1, j2));
  EXPECT_EQ(T_r_j(s, r1 * r2, j1, j2), T_direct(s, r1 * r2, j1, j2));
}

TEST(Averages, HasseWeil) {
  auto f = Field::of_order(5);
  DiagonalForm F(f, P(f.get(), {"1", "1", "1", "1"}));
  auto c = P(f.get(), {"1", "2", "3", "4"});
  auto rows = avg_hasse_weil(F, c, 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].sum, 1);
  auto shorter = avg_hasse_weil(F, c, 1);
  EXPECT_EQ(shorter[1].sum, rows[1].sum);
  EXPECT_DOUBLE_EQ(shorter[1].normalized, rows[1].normalized);
  Poly bad = F.disc() * dual_eval(F, c).value;
  for (int d = 1; d <= 2; ++d) {
    long long expect = 0;
    for (const Poly& r : monic_enum(f.get(), d))
      if (gcd(r, bad).is_one()) expect += S_r_c(F, r, c).to_rational().get_num().get_si();
    EXPECT_EQ(rows[static_cast<size_t>(d)].sum, expect);
  }
  EXPECT_THROW(avg_hasse_weil(F, P(f.get(), {"0", "0", "0", "0"}), 1), std::invalid_argument);
}

TEST(Averages, Squarefull) {
  auto f = Field::of_order(2);
  DiagonalForm F(f, P(f.get(), {"1", "1", "1", "1"}));
  EXPECT_EQ(avg_squarefull(F, {0, 1}, {0, 0}, 1).sum_abs, 0);
  SquarefullReport r = avg_squarefull(F, {0, 1, 2, 3}, {0, 0, 0, 1}, 2);
  EXPECT_EQ(r.moduli, 2u);  // t^2, (t+1)^2
  EXPECT_EQ(r.tuples, 2u);
  EXPECT_EQ(avg_squarefull(F, {}, {}, 2).counted, 0u);
}

TEST(Audit, TrivialAndFamilies) {
  auto f = Field::of_order(5);
  DiagonalForm F(f, P(f.get(), {"1", "1", "1", "1"}));
  auto triv = audit_bounds("trivial", F, 1, 1, 1, 1);
  ASSERT_EQ(triv.size(), 1u);
  EXPECT_DOUBLE_EQ(triv[0].ratio, 1.0);
  auto del = audit_bounds("deligne", F, 1, 1, 20, 5);
  EXPECT_FALSE(del.empty());
  for (const auto& row : del) EXPECT_TRUE(std::isfinite(row.ratio));
  auto csv = audit_csv(del, 5, 4);
  EXPECT_EQ(csv.rfind("family,q,n,r,c,|S|^2,bound^2,ratio\n", 0), 0u);
  auto f2 = Field::of_order(2);
  DiagonalForm F2(f2, P(f2.get(), {"1", "1"}));
  EXPECT_FALSE(audit_bounds("hua", F2, 2, 3, 4, 1).empty());
  EXPECT_THROW(audit_bounds("nope", F2, 1, 1, 1, 1), std::invalid_argument);
}
