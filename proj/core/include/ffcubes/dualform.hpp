#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ffcubes/form.hpp"
#include "ffcubes/poly.hpp"

namespace ffc {

enum class DualMethod { char2_closed_form, resultant_sqrt };

struct DualEval {
  Poly value;  // F*(c); zero exactly on the dual hypersurface
  DualMethod method;
};

/// Characteristic > 3: Q_n(0) = F*(c)^2 where Q_0(z) = z and
/// Q_k(z) = Res_w(Q_{k-1}(w), (z - w)^2 - u_k), u_k = c_k^3 prod_{i != k} F_i.
/// Each step uses Q_k(z) = E(z)^2 - u_k O(z)^2 with Q_{k-1}(z + s) = E(z) + s O(z),
/// s^2 = u_k. With `cross_check`, every step is compared against a Sylvester
/// resultant at test points and std::logic_error is thrown on mismatch.
Poly dual_square(const DiagonalForm& F, const std::vector<Poly>& c, bool cross_check = false);

/// F*(c). Characteristic 2: sum_i c_i^3 prod_{j != i} F_j. Otherwise the square
/// root of dual_square, signed so the leading coefficient has the smaller code.
DualEval dual_eval(const DiagonalForm& F, const std::vector<Poly>& c, bool cross_check = false);
bool dual_is_zero(const DiagonalForm& F, const std::vector<Poly>& c);

enum class SolutionClass { nonzero, special, ordinary };
const char* to_string(SolutionClass s);
/// n = 4 only. Special: F*(c) = 0, all c_i != 0 and for some pairing
/// {i,j},{k,l}: F_j c_i^3 = F_i c_j^3 and F_l c_k^3 = F_k c_l^3.
SolutionClass classify_solution(const DiagonalForm& F, const std::vector<Poly>& c);

struct DualCount {
  std::uint64_t ordinary = 0, special = 0, total = 0;
};
/// Nonzero c with every deg c_i <= C and F*(c) = 0, split by class (n = 4) or
/// all counted as ordinary (other n).
DualCount dual_count(const DiagonalForm& F, int C);

/// Binary cubic form g0 y^3 + g1 y^2 z + g2 y z^2 + g3 z^3 over O.
struct BinaryCubic {
  Poly g[4];
  Poly eval(const Poly& y, const Poly& z) const;
};

/// F_1 = lambda rho_1^3, F_2 = lambda rho_2^3, F_3 = mu rho_3^3, F_4 = mu rho_4^3,
/// rho_1 rho_2' - rho_2 rho_1' = rho_3 rho_4' - rho_4 rho_3' = 1.
/// x(y, z) = (rho_2' y_1 - rho_2 z_1, -rho_1' y_1 + rho_1 z_1,
///            rho_4' y_2 - rho_4 z_2, -rho_3' y_2 + rho_3 z_2)
/// and F(x(y, z)) = G_1(y_1, z_1) + G_2(y_2, z_2) = Ftilde(y, z).
struct SpecialSetup {
  Poly rho[4], rhop[4];
  Poly lambda, mu;
  BinaryCubic G1, G2;
  std::vector<Poly> x_of(const Poly& y1, const Poly& y2, const Poly& z1, const Poly& z2) const;
  Poly Ftilde(const Poly& y1, const Poly& y2, const Poly& z1, const Poly& z2) const;
  /// F_0(j) = lambda j_1^3 + mu j_2^3.
  Poly F0(const Poly& j1, const Poly& j2) const;
  /// c(d) = (rho_1 d_1, rho_2 d_1, rho_3 d_2, rho_4 d_2).
  std::vector<Poly> c_of(const Poly& d1, const Poly& d2) const;
};

/// Setups for the pairing {1,2},{3,4}; empty when F_1/F_2 or F_3/F_4 is not a
/// cube in K. Every setup is checked symbolically (throws std::logic_error).
std::vector<SpecialSetup> special_param(const DiagonalForm& F);

/// Line b_i x_i + b_j x_j = b_k x_k + b_l x_l = 0 (indices 0-based).
struct LineDesc {
  int i, j, k, l;
  Poly bi, bj, bk, bl;
  bool contains(const std::vector<Poly>& x) const;
  std::string str() const;  // 1-based "(i j | k l) : b_i,b_j ; b_k,b_l"
};
std::vector<LineDesc> lines_of(const DiagonalForm& F);

}  // namespace ffc
