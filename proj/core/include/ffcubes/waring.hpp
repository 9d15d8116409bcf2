#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ffcubes/counting.hpp"
#include "ffcubes/cyc.hpp"
#include "ffcubes/form.hpp"
#include "ffcubes/laurent.hpp"
#include "ffcubes/poly.hpp"

namespace ffc {

/// Major arcs. Waring: |r| <= q^B, |r alpha - a| < q^-2B.
/// Weak approximation: |r| < |P|^{1/2}, |r alpha - a| < H_F^-1 |M|^-3 |r| |P|^{-5/2}.
struct ArcConfig {
  enum class Kind { waring, wa };
  Kind kind = Kind::waring;
  int B = 1;       // waring
  int degP = 0;    // wa
  int degH = 0;    // wa: log_q H_F
  int degM = 0;    // wa
  static ArcConfig waring(int B);
  static ArcConfig wa(int degP, int degH, int degM);
  /// alpha must be known down to this index.
  int precision() const;
};

struct ArcVerdict {
  bool major = false;
  Poly a, r;
  int rel_log = 0;       // log_q |r alpha - a| (kNoTop when r alpha = a)
  int twice_bound = 0;   // major iff 2 rel_log < twice_bound
  std::string witness() const;
};
ArcVerdict arc_classify(const Field* f, const ArcConfig& cfg, const Laurent& alpha);

struct SeriesRow {
  int Y = 0;
  CycNum increment;  // contribution of the moduli added at this step
  CycNum partial;
  double increment_abs = 0;
};

/// Partial sums sum_{|r| <= q^Y'} |r|^-n sum'_a S_r(a)^n psi(-a P / r), Y' = 0..Y,
/// with S_r(a) = sum_{|x| < |r|} psi(a x^3 / r).
std::vector<SeriesRow> sing_series_waring(const Field* f, int n, const Poly& P, int Y);

/// S~_r(a) = sum_{|x| < |r|} psi(a F(M x + b) / r), r monic.
CycNum S_tilde(const DiagonalForm& F, const Poly& M, const std::vector<Poly>& b, const Poly& r, const Poly& a);
/// Partial sums sum_{|r| < q^Y'} sum'_a |r|^-n S~_r(a), Y' = 1..Y.
std::vector<SeriesRow> sing_series_wa(const DiagonalForm& F, const Poly& M, const std::vector<Poly>& b, int Y);

struct SingIntegral {
  mpq_class closed;   // 1 / (|grad F(x0)| q^{N(n-1)})
  int grad_log = 0;   // log_q |grad F(x0)|
  int threshold = 0;  // I(q^Y) = closed for Y >= threshold = N - grad_log + log_q H_F
};
/// Throws std::domain_error for a singular x0, when the ball around x0 has no
/// Hensel lift (|F(x0)| >= |grad F(x0)| q^-N), or when F is not linear to first
/// order on the ball (H_F |x0| q^{-N-1} >= |grad F(x0)|).
SingIntegral sing_integral_wa(const DiagonalForm& F, const std::vector<Laurent>& x0, int N);
/// I(q^Y) = int_{|gamma| < H_F^-1 q^Y} int_{T^n} psi(gamma F(x)) w~(x) dx dgamma
/// by digit enumeration of the collapsed indicator.
mpq_class sing_integral_wa_truncated(const DiagonalForm& F, const std::vector<Laurent>& x0, int N, int Y,
                                     bool check_depth = false);

/// Density at P~ = P t^{-3B} of the push-forward of Haar measure on T^n under
/// x -> x_1^3 + ... + x_n^3, resolved at q^-K:
/// q^K meas{x in T^n : |F(x) - P~| < q^-K}.
mpq_class sigma_inf(const Field* f, int n, const Poly& P, int B, int K);

struct WaringReport {
  int q = 0, n = 0, B = 0, Y = 0, K = 0;
  std::string P;
  bool in_jq3 = false;        // false: globally obstructed, no positivity claim
  std::uint64_t R = 0;
  std::vector<SeriesRow> series;
  mpq_class sigma, sigma_next;  // sigma_inf at K and K + 1
  double prediction = 0;        // S(P, q^Y) sigma q^{B(n-3)}
  double ratio = 0;             // R / prediction
  std::string csv() const;      // Y,sing_series_partial,R_n,prediction,ratio
};
WaringReport waring_report(const Field* f, int n, const Poly& P, int Y, int K, const Budget& budget = {});

struct WeylAudit {
  std::uint64_t reps = 0, minor = 0;
  mpq_class max_abs_sq;   // max |T(alpha)|^2 over minor representatives
  double delta_fit = 0;   // largest delta with max |T| <= q^{B(1 - delta) + 1}
};
/// Every alpha known to index -3B, classified with ArcConfig::waring(B).
WeylAudit weyl_minor_audit(const Field* f, int B);

}  // namespace ffc
