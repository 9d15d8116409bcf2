#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <stdexcept>

#include "ffcubes/cyc.hpp"
#include "ffcubes/field.hpp"

using namespace ffc;

namespace {

// Field axioms, Frobenius and trace facts over every element.
void check_field(const Field& f) {
  const int q = f.q();
  for (int a = 0; a < q; ++a) {
    EXPECT_EQ(f.pow(a, q), static_cast<Elem>(a));
    EXPECT_EQ(f.add(a, f.neg(a)), 0u);
    if (a) EXPECT_EQ(f.mul(a, f.inv(a)), 1u);
    for (int b = 0; b < q; ++b) {
      EXPECT_EQ(f.add(a, b), f.add(b, a));
      EXPECT_EQ(f.mul(a, b), f.mul(b, a));
      EXPECT_EQ((f.trace(f.add(a, b))), (f.trace(a) + f.trace(b)) % f.p());
      for (int c = 0; c < q; c += 3) {
        EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        EXPECT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
      }
    }
    const auto& roots = f.cube_roots(f.pow(a, 3));
    EXPECT_NE(std::find(roots.begin(), roots.end(), static_cast<Elem>(a)), roots.end());
  }
  bool surj[8] = {};
  for (int a = 0; a < q; ++a) surj[f.trace(a)] = true;
  for (int k = 0; k < f.p(); ++k) EXPECT_TRUE(surj[k]);
}

}  // namespace

TEST(Field, AxiomsSmallFields) {
  for (int q : {2, 4, 5, 7, 8, 11, 13, 16}) {
    SCOPED_TRACE(q);
    check_field(*Field::of_order(q));
  }
}

TEST(Field, RejectsCharacteristicThreeUnlessAsked) {
  EXPECT_THROW(Field::of_order(3), std::invalid_argument);
  EXPECT_THROW(Field::of_order(9), std::invalid_argument);
  FieldOptions opt;
  opt.allow_char3 = true;
  check_field(*Field::of_order(3, opt));
}

TEST(Field, RejectsReducibleModulus) {
  EXPECT_THROW(Field::make(2, 2, {1, 0, 1}), std::invalid_argument);  // g^2 + 1 = (g + 1)^2
}

TEST(Field, Trace) {
  auto f2 = Field::of_order(2);
  EXPECT_EQ(f2->trace(1), 1);
  auto f4 = Field::parse("p=2,h=2,mod=g^2+g+1");
  const Elem g = f4->parse_elem("g");
  EXPECT_EQ(f4->trace(g), 1);
  EXPECT_EQ(f4->trace(0), 0);
}

TEST(Field, CubeRoots) {
  auto f2 = Field::of_order(2);
  EXPECT_EQ(f2->cube_roots(1), std::vector<Elem>{1});
  auto f5 = Field::of_order(5);
  EXPECT_EQ(f5->cube_roots(2), std::vector<Elem>{3});
  auto f7 = Field::of_order(7);
  EXPECT_TRUE(f7->cube_roots(3).empty());
  EXPECT_EQ(f7->cube_roots(1).size(), 3u);
  for (int q : {4, 7, 13, 16}) {
    auto f = Field::of_order(q);
    for (int a = 1; a < q; ++a) {
      size_t k = f->cube_roots(a).size();
      EXPECT_TRUE(k == 0 || k == 3) << q << " " << a;
    }
  }
  for (int q : {2, 5, 8, 11}) {
    auto f = Field::of_order(q);
    for (int a = 0; a < q; ++a) EXPECT_EQ(f->cube_roots(a).size(), 1u);
  }
}

TEST(Field, SquareRoots) {
  auto f4 = Field::parse("p=2,h=2,mod=g^2+g+1");
  const Elem g = f4->parse_elem("g");
  auto y = f4->sqrt(g);
  ASSERT_TRUE(y);
  EXPECT_EQ(*y, f4->mul(g, g));
  auto f5 = Field::of_order(5);
  auto r = f5->sqrt(4);
  ASSERT_TRUE(r);
  EXPECT_TRUE(*r == 2 || *r == 3);
  EXPECT_FALSE(f5->sqrt(2));
  for (int q : {8, 16, 13}) {
    auto f = Field::of_order(q);
    for (int a = 0; a < q; ++a)
      if (auto s = f->sqrt(a)) EXPECT_EQ(f->mul(*s, *s), static_cast<Elem>(a));
  }
}

TEST(Field, Nonsquare) {
  EXPECT_EQ(Field::of_order(5)->nonsquare(), 2u);
  EXPECT_EQ(Field::of_order(7)->nonsquare(), 3u);
  EXPECT_EQ(Field::of_order(7)->nonsquare(), Field::of_order(7)->nonsquare());
  EXPECT_THROW(Field::of_order(2)->nonsquare(), std::domain_error);
}

TEST(Field, SpecRoundTrip) {
  for (int q : {2, 4, 5, 8, 16, 25, 32}) {
    auto f = Field::of_order(q);
    auto g = Field::parse(f->spec());
    EXPECT_EQ(g->q(), q);
    EXPECT_EQ(g->modulus(), f->modulus());
    for (int a = 0; a < q; ++a) EXPECT_EQ(g->parse_elem(f->format(a)), static_cast<Elem>(a));
  }
}

TEST(CycNum, RootsOfUnitySumToZero) {
  for (int p : {2, 3, 5, 7}) {
    CycNum s(p);
    for (int j = 0; j < p; ++j) s += CycNum::zeta_pow(p, j);
    EXPECT_TRUE(s.is_zero()) << p;
  }
}

TEST(CycNum, CanonicalForm) {
  CycNum a = CycNum::zeta_pow(5, 7);
  EXPECT_EQ(a, CycNum::zeta_pow(5, 2));
  EXPECT_EQ(CycNum::zeta_pow(5, 4), -(CycNum::rational(5, 1) + CycNum::zeta_pow(5, 1) + CycNum::zeta_pow(5, 2) +
                                      CycNum::zeta_pow(5, 3)));
  EXPECT_EQ(CycNum::zeta_pow(5, 3).conj(), CycNum::zeta_pow(5, 2));
  EXPECT_EQ(CycNum::zeta_pow(7, 2) * CycNum::zeta_pow(7, 6), CycNum::zeta_pow(7, 1));
}

TEST(CycNum, AbsSq) {
  EXPECT_EQ(abs_sq(CycNum::rational(2, 1)).value, 1);
  AbsSq r = abs_sq(CycNum::rational(2, mpq_class(-3, 2)));
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.value, mpq_class(9, 4));
  FieldOptions opt;
  opt.allow_char3 = true;
  EXPECT_EQ(abs_sq(CycNum::zeta_pow(3, 1)).value, 1);
  // 1 + zeta_5: |.|^2 = 2 + zeta + zeta^-1 is irrational, so a flagged bound.
  AbsSq b = abs_sq(CycNum::rational(5, 1) + CycNum::zeta_pow(5, 1));
  EXPECT_FALSE(b.exact);
  double top = 0;
  for (int k = 1; k < 5; ++k) top = std::max(top, std::norm(CycNum::rational(5, 1).embed(k) + CycNum::zeta_pow(5, 1).embed(k)));
  EXPECT_GE(b.value.get_d(), top - 1e-12);
}

TEST(CycNum, ZetaSumMatchesCyc) {
  ZetaSum z(5);
  z.add_power(0, 3);
  z.add_power(2, -1);
  z.add_power(4, 2);
  CycNum c = CycNum::rational(5, 3) - CycNum::zeta_pow(5, 2) + CycNum::rational(5, 2) * CycNum::zeta_pow(5, 4);
  EXPECT_EQ(z.to_cyc(), c);
  EXPECT_EQ((z * z).to_cyc(), c * c);
  EXPECT_EQ(z.to_cyc_scaled(qpow(5, -2)), c * mpq_class(1, 25));
}
