#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffcubes/dualform.hpp"
#include "ffcubes/form.hpp"
#include "ffcubes/laurent.hpp"
#include "ffcubes/poly.hpp"

namespace ffc {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Budget {
  std::uint64_t max_bytes = 2ull << 30;
  std::uint64_t max_tuples = 20'000'000'000ull;  // exhaustive enumeration
  int threads = 1;
};

enum class CountMethod { exhaustive, mitm, line_filtered };
const char* to_string(CountMethod m);

struct CountReport {
  std::uint64_t value = 0;
  std::string params;
  CountMethod method = CountMethod::mitm;
  double wall_time = 0;  // seconds
};

/// Weight on x/P. Annulus: [|x/P| = q^-1] = prod chi_T - prod chi_{t^-1 T}.
/// Box: |x/P - x0| < q^-N, optionally with x = b mod M coordinatewise.
struct Weight {
  enum class Kind { annulus, box };
  Kind kind = Kind::annulus;
  std::vector<Laurent> center;
  int N = 0;
  Poly M;                // zero polynomial: no congruence
  std::vector<Poly> b;

  static Weight annulus() { return {}; }
  static Weight box(std::vector<Laurent> x0, int N);
  /// Integer-valued at every x in O^n; false outside the support.
  bool contains_box(const std::vector<Poly>& x, const Poly& P) const;
};

// Engines: count x with x_i in cands[i] and sum_i coeff_i x_i^3 = target.

std::uint64_t solve_count_mitm(const std::vector<std::vector<Poly>>& cands, const std::vector<Poly>& coeff,
                               const Poly& target, const Budget& budget = {});
std::uint64_t solve_count_exhaustive(const std::vector<std::vector<Poly>>& cands, const std::vector<Poly>& coeff,
                                     const Poly& target, const Budget& budget = {});
/// Calls visit(x) on every solution (meet-in-the-middle with solution lists).
void solve_enumerate(const std::vector<std::vector<Poly>>& cands, const std::vector<Poly>& coeff, const Poly& target,
                     const std::function<void(const std::vector<Poly>&)>& visit, const Budget& budget = {});

/// All x with deg x < B (|x| < q^B) in index order.
std::vector<Poly> polys_below(const Field* f, int B);

/// N(P) with |P| = q^B: #{x : |x_i| < q^B, F(x) = 0}.
CountReport count_N(const DiagonalForm& F, int B, CountMethod m = CountMethod::mitm, const Budget& budget = {});
/// N(w, P) = sum_{F(x) = 0} w(x / P).
CountReport count_Nw(const DiagonalForm& F, const Poly& P, const Weight& w, CountMethod m = CountMethod::mitm,
                     const Budget& budget = {});

struct CircReport {
  CountReport circ;              // N deg P = B, off the lines
  std::uint64_t total = 0;       // N
  std::uint64_t on_lines = 0;    // solutions removed by the filter
  std::uint64_t line_points = 0; // |union of lines within the box|, enumerated from the line parametrization
  std::vector<LineDesc> lines;
};
/// N deg(P) = B: solutions not on any line of lines_of(F). n = 4, characteristic > 3.
CircReport count_N_circ(const DiagonalForm& F, int B, const Budget& budget = {});

/// M(P) = #{x in O^6 : x1^3 + x2^3 + x3^3 = x4^3 + x5^3 + x6^3, |x_i| < q^B}.
CountReport count_M(const Field* f, int B, CountMethod m = CountMethod::mitm, const Budget& budget = {});

/// Waring's B = ceil(deg P / 3) + 1, or ceil(deg P / 3) for the strict variant.
int waring_B(const Poly& P, bool strict = false);
/// R_n(P) = #{x : |x_i| < q^B, x_1^3 + ... + x_n^3 = P}.
CountReport count_R(const Field* f, int n, const Poly& P, bool strict = false, CountMethod m = CountMethod::mitm,
                    const Budget& budget = {});

/// F_p-span of the cubes of polynomials of degree <= ceil(D/3) + 1, tested on degree <= D.
class Jq3 {
 public:
  Jq3(const Field* f, int D);
  bool contains(const Poly& P) const;
  int D() const { return D_; }
  std::size_t generator_count() const { return generators_; }
  /// dim over F_p of the span intersected with {deg <= D}.
  int dimension() const;

 private:
  std::vector<int> to_vec(const Poly& P) const;
  const Field* f_;
  int D_, len_;
  std::size_t generators_ = 0;
  std::vector<std::vector<int>> basis_;  // echelon, pivot = highest nonzero index
  std::vector<int> pivots_;
};
Jq3 jq3_closure(const Field* f, int D);

/// #{x in O^n : F(Mx + b) = 0, |(Mx + b)/P - x0| < q^-N}; needs |b_i| < |M|.
CountReport count_congruence(const DiagonalForm& F, const Poly& P, const Poly& M, const std::vector<Poly>& b,
                             const std::vector<Laurent>& x0, int N, CountMethod m = CountMethod::mitm,
                             const Budget& budget = {});

}  // namespace ffc
