#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ffcubes/counting.hpp"
#include "ffcubes/cyc.hpp"
#include "ffcubes/dualform.hpp"
#include "ffcubes/form.hpp"
#include "ffcubes/laurent.hpp"
#include "ffcubes/poly.hpp"

namespace ffc {

/// Parameters of the delta identity for N(w, P).
/// Q must satisfy |P|^{3/2} <= q^Q <= q |P|^{3/2} and Q >= 1.
struct DeltaConfig {
  DeltaConfig(DiagonalForm F, Poly P, Weight w = Weight::annulus(), int Q = -1);
  static int default_Q(const Poly& P);

  DiagonalForm F;
  Poly P;
  Weight w;
  int Q;
  bool paranoid = false;  // re-check every integration depth at +1 and every truncation edge
  Budget budget;

  /// log_q C^ = 2 deg P - Q.
  int C_log() const { return 2 * P.deg() - Q; }
  /// theta digits below this index do not change I_r(theta, c): 2 - 3 deg P - log_q H_F.
  int theta_floor() const;
};

/// Integration domain of one coordinate: the ball |x - center| < q^radius_log.
/// The weight is sum_k sign_k prod_i chi(ball_{k,i}).
struct WeightTerm {
  int sign = 1;
  std::vector<CoordBall> balls;
};
std::vector<WeightTerm> weight_terms(const Weight& w, const Field* f, int n);

// One-dimensional pieces: int_{ball} psi(g x^3 + v x) dx.

/// Digit depth at which the integrand is constant on cells.
int ball_depth(const Laurent& g, const Laurent& v, const CoordBall& ball);
/// Sufficient condition for the integral to vanish: |v| >= q^{-R} and
/// |v| > |g| X^2 with X = max(|center|, q^{R-1}).
bool ball_integral_vanishes(const Laurent& g, const Laurent& v, const CoordBall& ball);
CycNum ball_integral(const Laurent& g, const Laurent& v, const CoordBall& ball, bool check_depth = false);

/// J_F(gamma, v) = int w(x) psi(gamma F(x) + v.x) dx as a difference of coordinate products.
CycNum J_f(const Laurent& gamma, const std::vector<Laurent>& v, const DiagonalForm& F, const Weight& w,
           bool check_depth = false);
/// Same integral by direct n-dimensional digit enumeration.
CycNum J_f_generic(const Laurent& gamma, const std::vector<Laurent>& v, const DiagonalForm& F, const Weight& w,
                   bool check_depth = false);

/// I_r(theta, c) = J_F(P^3 theta, P c / r); needs |theta| < |r|^-1 q^-Q.
CycNum I_r_theta_c(const DeltaConfig& cfg, const Poly& r, const Laurent& theta, const std::vector<Poly>& c,
                   bool generic = false);

/// Coset representatives of {|theta| < |r|^-1 q^-Q} at the theta constancy depth.
struct ThetaCell {
  Laurent theta;
  mpq_class measure;
};
std::vector<ThetaCell> theta_cells(const DeltaConfig& cfg, const Poly& r);

enum class IhatRoute { collapse, enumerate };
const char* to_string(IhatRoute r);
/// I_r(c) = int_{|theta| < |r|^-1 q^-Q} I_r(theta, c) dtheta. The collapse route
/// integrates the orthogonality indicator (|r| q^Q)^-1 [|P^3 F(x)| < |r| q^Q]
/// over x; the enumerate route sums I_r over theta_cells.
CycNum I_hat(const DeltaConfig& cfg, const Poly& r, const std::vector<Poly>& c, IhatRoute route = IhatRoute::collapse);
/// Same with r = t^Y.
CycNum I_hat(const DeltaConfig& cfg, int Y, const std::vector<Poly>& c, IhatRoute route = IhatRoute::collapse);

enum class RhsMethod { product, per_c, generic };
const char* to_string(RhsMethod m);

struct DeltaReport {
  mpq_class lhs;
  CycNum rhs;
  bool equal = false;
  RhsMethod method = RhsMethod::product;
  std::uint64_t moduli = 0, cells = 0, c_terms = 0;
  double wall_time = 0;
};
/// LHS N(w, P) by count_Nw; RHS |P|^n sum_r |r|^-n int sum_c S_r(c) I_r(theta, c) dtheta
/// summed exactly with the c-sum truncated where the coordinate integrals vanish.
/// `product` factors the c-sum over a; `per_c` forms every S_r(c); `generic`
/// also uses J_f_generic (small instances only).
DeltaReport delta_verify(const DeltaConfig& cfg, RhsMethod method = RhsMethod::product);

struct NEEReport {
  mpq_class lhs;
  CycNum N0, E1, E2;
  bool split_E2 = false;  // n = 4, characteristic > 3
  CycNum E2_ord, E2_spec;
  std::uint64_t dual_zeros = 0;  // distinct nonzero c with F*(c) = 0 met in the boxes
  bool ok = false;              // N0 + E1 + E2 = lhs (and E2 = E2_ord + E2_spec)
};
NEEReport partition_NEE(const DeltaConfig& cfg);

/// J_r(j, theta) = int_{K_inf^2} w(P^-1 x(j, t)) psi(theta Ftilde(j, t)) dt.
CycNum J_r_j(const SpecialSetup& s, const DeltaConfig& cfg, const Poly& r, const Poly& j1, const Poly& j2,
             const Laurent& theta);
/// int_{|theta| < |r|^-1 q^-Q} J_r(j, theta) dtheta by the orthogonality collapse.
CycNum J_r_j_avg(const SpecialSetup& s, const DeltaConfig& cfg, const Poly& r, const Poly& j1, const Poly& j2);

struct SpecialTransformReport {
  std::string setup;
  CycNum lhs, rhs;            // theta-integrated sides
  std::uint64_t cells = 0, cells_ok = 0;  // per-theta-cell identities
  std::uint64_t d_terms = 0, j_terms = 0;
  bool avg_routes_agree = false;  // sum over cells of J_r(j, theta) = J_r_j_avg for every j
  bool ok = false;
};
/// sum_{d in O^2} S_r(c(d)) I_r(theta, c(d)) = |r|^2 |P|^-4 sum_{j in O^2} T_r(j) J_r(j, theta)
/// for every theta cell, and the theta-integrated form. Annulus weight, n = 4.
SpecialTransformReport special_transform_verify(const SpecialSetup& s, const DeltaConfig& cfg, const Poly& r);

struct PoissonReport {
  CycNum lhs, rhs;
  std::uint64_t c_terms = 0;
  bool equal = false;
};
/// sum_{z in O^n} w(z) psi(gamma F(z)) against sum_c int w(u) psi(gamma F(u) + c.u) du
/// for w = [|z| = q^E].
PoissonReport poisson_check(const DiagonalForm& F, const Laurent& gamma, int E);

}  // namespace ffc
