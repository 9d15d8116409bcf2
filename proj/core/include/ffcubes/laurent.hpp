#pragma once

#include <climits>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "ffcubes/cyc.hpp"
#include "ffcubes/poly.hpp"

namespace ffc {

/// Truncated element of K_inf = F_q((1/t)): digits alpha_i for lo <= i <= hi.
/// An exact value has all digits below lo equal to zero; an inexact one is a
/// representative of the coset alpha + {|x| < q^lo}.
class Laurent {
 public:
  static constexpr int kNoTop = INT_MIN;

  Laurent() = default;
  explicit Laurent(const Field* f) : f_(f) {}  // exact zero
  static Laurent from_poly(const Poly& a);
  static Laurent monomial(const Field* f, Elem c, int k);
  /// Digits d[0..] at indices lo, lo+1, ...; `exact` false means known only for i >= lo.
  static Laurent from_digits(const Field* f, int lo, std::vector<Elem> d, bool exact);
  /// a / b expanded down to index `floor` (exact when the division terminates there).
  static Laurent ratio(const Poly& a, const Poly& b, int floor);

  const Field* field() const { return f_; }
  bool exact() const { return exact_; }
  /// Lowest known index (INT_MIN for exact values).
  int floor() const { return exact_ ? INT_MIN : lo_; }
  /// Index of the top nonzero known digit, kNoTop if every known digit is zero.
  int top() const;
  /// Index of the lowest stored digit.
  int low() const { return lo_; }
  bool is_zero() const { return top() == kNoTop; }
  /// log_q |alpha|; throws if the value is an inexact zero (magnitude unknown).
  int abs_log() const;
  /// Upper bound for log_q |alpha| valid for every element of the coset.
  int abs_log_bound() const;
  Elem digit(int i) const;

  Laurent& operator+=(const Laurent& o);
  Laurent& operator-=(const Laurent& o);
  friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
  friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }
  friend Laurent operator*(const Laurent& a, const Laurent& b);
  Laurent operator-() const;
  Laurent shifted(int k) const;  // times t^k
  /// Forget digits below `floor`.
  Laurent truncated(int floor) const;
  friend bool operator==(const Laurent& a, const Laurent& b);

 private:
  void normalize();
  const Field* f_ = nullptr;
  int lo_ = 0;
  std::vector<Elem> d_;
  bool exact_ = true;
};

/// psi(alpha) as a power of zeta_p; throws when digit -1 is not known.
int psi_exp(const Laurent& a);
CycNum psi(const Laurent& a);

Laurent parse_laurent(std::string_view text, const Field* f);
std::string format(const Laurent& a);

/// Coordinate ball {x : |x - center| < q^radius_log}.
struct CoordBall {
  Laurent center;
  int radius_log = 0;
};

/// Exact Haar integral of a function that is constant on cosets of
/// {|x| < q^-depth}^n inside `box`: sum of fn over digit representatives times
/// the cell measure. With `check_depth`, the value is recomputed at depth+1 and
/// a std::logic_error is thrown on mismatch.
CycNum haar_integrate(const Field& f, const std::vector<CoordBall>& box, int depth,
                      const std::function<CycNum(const std::vector<Laurent>&)>& fn, bool check_depth = false);
/// Same for integrands of the form [x in S] * zeta^e(x): fn returns e in [0,p) or -1.
CycNum haar_integrate_char(const Field& f, const std::vector<CoordBall>& box, int depth,
                           const std::function<int(const std::vector<Laurent>&)>& fn, bool check_depth = false);

/// {alpha in T : |r alpha - a| < q^-Q}, r monic, (a, r) = 1, |a| < |r|.
struct Ball {
  Poly a, r;
  int Q = 0;
  /// Haar measure q^{-deg r - Q}.
  mpq_class measure() const;
  /// Needs alpha known down to index -deg r - Q.
  bool contains(const Laurent& alpha) const;
};
std::string format(const Ball& b);

std::vector<Ball> farey_dissect(const Field* f, int Q);
/// Index of the unique ball containing alpha (nullopt only if alpha is not in T).
std::optional<size_t> farey_locate(const std::vector<Ball>& balls, const Laurent& alpha);

/// Haar measure of {x in T : |x^2 - a| < |b|}; a must be known down to index
/// log_q|b|. Returns 0 for b = 0. Enumerates x to depth max(1, -log_q|b| - 1).
mpq_class measure_parabola(const Laurent& a, const Laurent& b, bool check_depth = false);

}  // namespace ffc
