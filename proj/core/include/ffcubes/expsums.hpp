#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ffcubes/cyc.hpp"
#include "ffcubes/dualform.hpp"
#include "ffcubes/form.hpp"
#include "ffcubes/laurent.hpp"
#include "ffcubes/poly.hpp"
#include "ffcubes/residue.hpp"

namespace ffc {

// Complete linear sums. r may be non-monic; |x| < |r| in every case.

/// sum_{|x| < |r|} psi(a x / r) = |r| [r | a].
CycNum linear_full_sum(const Poly& a, const Poly& r);
/// Direct summation over all x.
CycNum linear_full_sum_brute(const Poly& a, const Poly& r);
/// Through the trace functional mu(a): |r| if mu(a) = 0, else 0.
CycNum linear_full_sum_functional(const Poly& a, const Poly& r);

/// sum'_{|x| < |w|^k} psi(a x / w^k), w monic irreducible, k >= 1.
CycNum ramanujan_sum(const Poly& a, const Poly& w, int k);
CycNum ramanujan_sum_brute(const Poly& a, const Poly& w, int k);
CycNum ramanujan_sum_functional(const Poly& a, const Poly& w, int k);

/// Units of O/r as residue indices (Poly::from_index order), r monic.
std::vector<std::uint64_t> unit_residues(const Poly& r);
/// phi(r) = #(O/r)^*.
std::uint64_t totient(const Poly& r);

/// sum_{|x| < |r|} psi((b x^3 + c x) / r) in Z[C_p].
ZetaSum one_dim_sum(const ResidueCtx& R, const Poly& b, const Poly& c);
/// S_r(a, c) = sum_{|x| < |r|} psi((a B x^3 + c x) / r), gcd(a, r) = 1, r monic.
CycNum S_r_ac(const Poly& B, const Poly& r, const Poly& a, const Poly& c);

/// S_r(c) = sum'_a prod_i S_r(a F_i, c_i), r monic. Always a rational integer.
CycNum S_r_c(const DiagonalForm& F, const Poly& r, const std::vector<Poly>& c);
/// Same value as an integer; uses the modular embedding when the int64 group
/// ring could overflow. Throws std::length_error beyond phi(r)|r|^n >= 2^60.
long long S_r_c_int(const DiagonalForm& F, const Poly& r, const std::vector<Poly>& c);
/// sum'_a sum_{x in (O/r)^n} psi((a F(x) + c.x) / r) by direct polynomial arithmetic.
CycNum S_r_c_brute(const DiagonalForm& F, const Poly& r, const std::vector<Poly>& c);
/// Upper bound phi(r)|r|^n for |S_r(c)|.
mpz_class S_r_c_bound(const DiagonalForm& F, const Poly& r);

/// S_r(c) for every c in the product box cands[0] x ... x cands[n-1]
/// (c_0 varies fastest). Computed in F_l through ZetaModMap(p, which) and
/// lifted; requires S_r_c_bound < l/2.
std::vector<long long> S_r_box(const DiagonalForm& F, const Poly& r, const std::vector<std::vector<Poly>>& cands,
                               int which = 0);

/// {r, c} for square-full r: prod over w^k || r of |gcd(w^k, c)|, except
/// |w|^-1 when k >= 3 and w || c.
mpq_class bracket(const Poly& r, const Poly& c);

struct VanishingReport {
  long long value = 0;    // S_{w^k}(c)
  bool sum_is_zero = false;
  bool divides = false;   // w | F*(c)
  bool ok() const { return divides || sum_is_zero; }
};
VanishingReport vanishing_check(const DiagonalForm& F, const Poly& w, int k, const std::vector<Poly>& c);

/// T(alpha) = sum_{|x| < q^B} psi(alpha x^3). alpha must be known down to index 2 - 3B.
CycNum weyl_sum(const Laurent& alpha, int B);

/// T_r(j) = sum'_a sum_{h in (O/r)^2} psi(a Ftilde(j, h) / r).
CycNum T_r_j(const SpecialSetup& s, const Poly& r, const Poly& j1, const Poly& j2);
/// Closed form at r = w^2 when w does not divide 6 lambda mu j1 j2 prod rho_i;
/// nullopt otherwise.
std::optional<CycNum> T_r_j_closed(const SpecialSetup& s, const Poly& w, const Poly& j1, const Poly& j2);

struct HasseWeilRow {
  int degree;
  long long sum;           // sum over monic r of this degree coprime to disc(F) F*(c)
  double normalized;       // running sum of S_r(c) / |r|^{(n+1)/2}
  double growth_ref;       // q^{degree/2}
};
std::vector<HasseWeilRow> avg_hasse_weil(const DiagonalForm& F, const std::vector<Poly>& c, int Z);

struct SquarefullReport {
  mpz_class sum_abs;       // sum |S_r(c)|; every S_r(c) is a rational integer
  mpz_class sum_sq;        // sum |S_r(c)|^2
  std::uint64_t tuples = 0;   // #R(C)
  std::uint64_t counted = 0;  // c with F*(c) != 0
  std::uint64_t moduli = 0;   // square-full r with |r| = q^Y
  double ratio = 0;           // sum_abs / (q^{Y(1 + n/2 + (n - t)/6)} #R(C))
};
/// R(C): |c_i| = q^{C_i} for i in T, c_j = 0 otherwise (T 0-based).
SquarefullReport avg_squarefull(const DiagonalForm& F, const std::vector<int>& T, const std::vector<int>& C, int Y);

struct AuditRow {
  std::string family, r, c;
  mpq_class abs_sq;
  double bound_sq = 0;
  double ratio = 0;
};
/// Families: "hua" (1-D sums at prime powers against |w|^{2k/3}), "prime-power"
/// (against |w|^{k/2}{w^k,c}^{1/4}, k >= 2), "deligne" (S_w(c) against
/// |w|^{(n+1)/2}, rows with w | F*(c) flagged in the family name), "trivial" (r = 1).
std::vector<AuditRow> audit_bounds(const std::string& family, const DiagonalForm& F, int max_deg, int max_k,
                                   int samples, std::uint64_t seed);
std::string audit_csv(const std::vector<AuditRow>& rows, int q, int n);

}  // namespace ffc
