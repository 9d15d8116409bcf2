#include "ffcubes/counting.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace ffc {

const char* to_string(CountMethod m) {
  switch (m) {
    case CountMethod::exhaustive:
      return "exhaustive";
    case CountMethod::mitm:
      return "meet-in-middle";
    case CountMethod::line_filtered:
      return "line-filtered";
  }
  return "?";
}

Weight Weight::box(std::vector<Laurent> x0, int N) {
  if (N < 0) throw std::invalid_argument("box radius exponent must be >= 0");
  Weight w;
  w.kind = Kind::box;
  w.center = std::move(x0);
  w.N = N;
  return w;
}

bool Weight::contains_box(const std::vector<Poly>& x, const Poly& P) const {
  for (size_t i = 0; i < x.size(); ++i) {
    if (!M.is_zero() && !divides(M, x[i] - b[i])) return false;
    const Laurent& c = center[i];
    if (!c.exact() && c.floor() > -N) throw std::invalid_argument("box center not known to the box radius");
    Laurent diff = Laurent::ratio(x[i], P, -N) - c;
    int top = diff.top();
    if (top != Laurent::kNoTop && top >= -N) return false;
  }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Fixed-width packing of polynomials of degree < D into a 64-bit key.
class Packer {
 public:
  Packer(const Field* f, int D) : f_(f), D_(std::max(D, 1)) {
    bits_ = 1;
    while ((1 << bits_) < f->q()) ++bits_;
    if (bits_ * D_ > 64)
      throw BudgetExceeded("sum values need " + std::to_string(bits_ * D_) + " bits; the packed key holds 64");
    mask_ = (bits_ == 64) ? ~0ull : ((1ull << bits_) - 1);
  }
  std::uint64_t pack(const Poly& a) const {
    if (a.deg() >= D_) throw std::logic_error("value exceeds packing width");
    std::uint64_t k = 0;
    for (int i = a.deg(); i >= 0; --i) k = (k << bits_) | a.coeff(i);
    return k;
  }
  std::uint64_t add(std::uint64_t x, std::uint64_t y) const {
    if (f_->p() == 2) return x ^ y;
    std::uint64_t out = 0;
    for (int i = 0; i < D_; ++i) {
      int sh = i * bits_;
      Elem s = f_->add(static_cast<Elem>((x >> sh) & mask_), static_cast<Elem>((y >> sh) & mask_));
      out |= static_cast<std::uint64_t>(s) << sh;
    }
    return out;
  }
  std::uint64_t neg(std::uint64_t x) const {
    if (f_->p() == 2) return x;
    std::uint64_t out = 0;
    for (int i = 0; i < D_; ++i) {
      int sh = i * bits_;
      out |= static_cast<std::uint64_t>(f_->neg(static_cast<Elem>((x >> sh) & mask_))) << sh;
    }
    return out;
  }

 private:
  const Field* f_;
  int D_, bits_;
  std::uint64_t mask_;
};

struct Prepared {
  const Field* f;
  int n;
  std::vector<std::vector<std::uint64_t>> vals;  // packed coeff_i x^3
  std::uint64_t target;
  Packer packer;
};

Prepared prepare(const std::vector<std::vector<Poly>>& cands, const std::vector<Poly>& coeff, const Poly& target) {
  if (cands.size() != coeff.size() || cands.empty()) throw std::invalid_argument("one candidate list per coefficient");
  const Field* f = coeff[0].field();
  int D = target.deg() + 1;
  for (size_t i = 0; i < cands.size(); ++i) {
    int md = -1;
    for (const auto& x : cands[i]) md = std::max(md, x.deg());
    if (md >= 0) D = std::max(D, coeff[i].deg() + 3 * md + 1);
  }
  Packer pk(f, D);
  Prepared pr{f, static_cast<int>(cands.size()), {}, pk.pack(target), pk};
  for (size_t i = 0; i < cands.size(); ++i) {
    std::vector<std::uint64_t> v;
    v.reserve(cands[i].size());
    for (const auto& x : cands[i]) v.push_back(pk.pack(coeff[i] * x * x * x));
    pr.vals.push_back(std::move(v));
  }
  return pr;
}

// Enumerate every tuple of [lo, hi) coordinates, calling visit(index vector, packed sum).
template <class Visit>
void enumerate_half(const Prepared& pr, int lo, int hi, Visit&& visit) {
  const int m = hi - lo;
  std::vector<size_t> idx(static_cast<size_t>(m), 0);
  for (int i = lo; i < hi; ++i)
    if (pr.vals[i].empty()) return;
  // partial sums so each step costs one add per changed coordinate
  std::vector<std::uint64_t> partial(static_cast<size_t>(m + 1), 0);
  for (int i = 0; i < m; ++i) partial[i + 1] = pr.packer.add(partial[i], pr.vals[lo + i][0]);
  while (true) {
    visit(idx, partial[m]);
    int j = m - 1;
    while (j >= 0 && idx[j] + 1 == pr.vals[lo + j].size()) {
      idx[j] = 0;
      --j;
    }
    if (j < 0) return;
    ++idx[j];
    for (int i = j; i < m; ++i) partial[i + 1] = pr.packer.add(partial[i], pr.vals[lo + i][idx[i]]);
  }
}

std::uint64_t half_size(const Prepared& pr, int lo, int hi) {
  std::uint64_t s = 1;
  for (int i = lo; i < hi; ++i) s *= pr.vals[i].size();
  return s;
}

}  // namespace

std::uint64_t solve_count_mitm(const std::vector<std::vector<Poly>>& cands, const std::vector<Poly>& coeff,
                               const Poly& target, const Budget& budget) {
  Prepared pr = prepare(cands, coeff, target);
  const int h = (pr.n + 1) / 2;
  const std::uint64_t left = half_size(pr, 0, h);
  if (left * 48 > budget.max_bytes)
    throw BudgetExceeded("meet-in-the-middle table needs about " + std::to_string(left * 48 >> 20) + " MiB");
  std::unordered_map<std::uint64_t, std::uint64_t> table;
  table.reserve(static_cast<size_t>(std::min<std::uint64_t>(left, 1u << 26)));
  enumerate_half(pr, 0, h, [&](const std::vector<size_t>&, std::uint64_t s) { ++table[s]; });
  if (h == pr.n) {
    auto it = table.find(pr.target);
    return it == table.end() ? 0 : it->second;
  }
  // Probe: left sum = target - right sum. Parallel over the first right coordinate.
  const int threads = std::max(1, budget.threads);
  const size_t first = pr.vals[h].size();
  std::vector<std::uint64_t> partial(static_cast<size_t>(threads), 0);
  auto work = [&](int tid) {
    Prepared local = pr;
    for (size_t v = static_cast<size_t>(tid); v < first; v += static_cast<size_t>(threads)) {
      local.vals[h] = {pr.vals[h][v]};
      enumerate_half(local, h, pr.n, [&](const std::vector<size_t>&, std::uint64_t s) {
        auto it = table.find(local.packer.add(local.target, local.packer.neg(s)));
        if (it != table.end()) partial[tid] += it->second;
      });
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::uint64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

std::uint64_t solve_count_exhaustive(const std::vector<std::vector<Poly>>& cands, const std::vector<Poly>& coeff,
                                     const Poly& target, const Budget& budget) {
  const int n = static_cast<int>(cands.size());
  std::uint64_t total = 1;
  for (const auto& c : cands) {
    if (c.empty()) return 0;
    total *= c.size();
  }
  if (total > budget.max_tuples)
    throw BudgetExceeded("exhaustive enumeration needs " + std::to_string(total) + " tuples");
  std::vector<std::vector<Poly>> cubes(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (const auto& x : cands[i]) cubes[i].push_back(coeff[i] * x * x * x);
  std::uint64_t count = 0;
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t v = t;
    Poly s = -target;
    for (int i = 0; i < n; ++i) {
      s += cubes[i][v % cands[i].size()];
      v /= cands[i].size();
    }
    if (s.is_zero()) ++count;
  }
  return count;
}

void solve_enumerate(const std::vector<std::vector<Poly>>& cands, const std::vector<Poly>& coeff, const Poly& target,
                     const std::function<void(const std::vector<Poly>&)>& visit, const Budget& budget) {
  Prepared pr = prepare(cands, coeff, target);
  const int h = (pr.n + 1) / 2;
  const std::uint64_t left = half_size(pr, 0, h);
  if (left * (48 + 8 * static_cast<std::uint64_t>(h)) > budget.max_bytes)
    throw BudgetExceeded("solution table needs about " + std::to_string(left * 64 >> 20) + " MiB");
  std::unordered_map<std::uint64_t, std::vector<std::vector<size_t>>> table;
  enumerate_half(pr, 0, h, [&](const std::vector<size_t>& idx, std::uint64_t s) { table[s].push_back(idx); });
  std::vector<Poly> x(static_cast<size_t>(pr.n));
  auto emit = [&](const std::vector<size_t>& li, const std::vector<size_t>& ri) {
    for (int i = 0; i < h; ++i) x[i] = cands[i][li[i]];
    for (int i = h; i < pr.n; ++i) x[i] = cands[i][ri[i - h]];
    visit(x);
  };
  if (h == pr.n) {
    auto it = table.find(pr.target);
    if (it != table.end())
      for (const auto& li : it->second) emit(li, {});
    return;
  }
  enumerate_half(pr, h, pr.n, [&](const std::vector<size_t>& ri, std::uint64_t s) {
    auto it = table.find(pr.packer.add(pr.target, pr.packer.neg(s)));
    if (it == table.end()) return;
    for (const auto& li : it->second) emit(li, ri);
  });
}

std::vector<Poly> polys_below(const Field* f, int B) {
  std::vector<Poly> out;
  if (B < 0) return out;
  const std::uint64_t size = ipow_u64(static_cast<std::uint64_t>(f->q()), B);
  out.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) out.push_back(Poly::from_index(f, i));
  return out;
}

namespace {

std::uint64_t run_engine(const std::vector<std::vector<Poly>>& cands, const std::vector<Poly>& coeff,
                         const Poly& target, CountMethod m, const Budget& budget) {
  if (m == CountMethod::exhaustive) return solve_count_exhaustive(cands, coeff, target, budget);
  return solve_count_mitm(cands, coeff, target, budget);
}

std::string form_params(const DiagonalForm& F, const std::string& extra) {
  return "field=" + F.field()->spec() + " form=" + F.str() + " " + extra;
}

}  // namespace

CountReport count_N(const DiagonalForm& F, int B, CountMethod m, const Budget& budget) {
  auto t0 = Clock::now();
  std::vector<std::vector<Poly>> cands(static_cast<size_t>(F.n()), polys_below(F.field(), B));
  CountReport rep;
  rep.value = run_engine(cands, F.coeffs(), Poly(F.field()), m, budget);
  rep.method = m;
  rep.params = form_params(F, "B=" + std::to_string(B));
  rep.wall_time = seconds_since(t0);
  return rep;
}

CountReport count_Nw(const DiagonalForm& F, const Poly& P, const Weight& w, CountMethod m, const Budget& budget) {
  auto t0 = Clock::now();
  const Field* f = F.field();
  const int B = P.deg();
  if (B < 0) throw std::invalid_argument("P must be nonzero");
  CountReport rep;
  rep.method = m;
  if (w.kind == Weight::Kind::annulus) {
    std::vector<std::vector<Poly>> big(static_cast<size_t>(F.n()), polys_below(f, B));
    std::vector<std::vector<Poly>> small(static_cast<size_t>(F.n()), polys_below(f, B - 1));
    std::uint64_t a = run_engine(big, F.coeffs(), Poly(f), m, budget);
    // At B = 0 both boxes are {0}, which always solves F = 0.
    std::uint64_t b = B >= 1 ? run_engine(small, F.coeffs(), Poly(f), m, budget) : 1;
    rep.value = a - b;
    rep.params = form_params(F, "P=" + format(P) + " weight=annulus");
  } else {
    if (static_cast<int>(w.center.size()) != F.n()) throw std::invalid_argument("box center has the wrong dimension");
    std::vector<std::vector<Poly>> cands(static_cast<size_t>(F.n()));
    for (const auto& y : polys_below(f, B)) {
      for (int i = 0; i < F.n(); ++i) {
        Weight one = w;
        one.center = {w.center[i]};
        if (!w.M.is_zero()) one.b = {w.b[i]};
        if (one.contains_box({y}, P)) cands[i].push_back(y);
      }
    }
    rep.value = run_engine(cands, F.coeffs(), Poly(f), m, budget);
    rep.params = form_params(F, "P=" + format(P) + " weight=box N=" + std::to_string(w.N));
  }
  rep.wall_time = seconds_since(t0);
  return rep;
}

CircReport count_N_circ(const DiagonalForm& F, int B, const Budget& budget) {
  auto t0 = Clock::now();
  const Field* f = F.field();
  if (F.n() != 4) throw std::invalid_argument("count_N_circ needs n = 4");
  if (f->p() == 2) throw std::invalid_argument("count_N_circ: line classification needs characteristic > 3");
  CircReport rep;
  rep.lines = lines_of(F);
  auto xs = polys_below(f, B);
  std::vector<std::vector<Poly>> cands(4, xs);
  solve_enumerate(
      cands, F.coeffs(), Poly(f),
      [&](const std::vector<Poly>& x) {
        ++rep.total;
        for (const auto& L : rep.lines) {
          if (L.contains(x)) {
            ++rep.on_lines;
            return;
          }
        }
      },
      budget);
  // Independent count of the union: x_i = b_j u, x_j = -b_i u, x_k = b_l v, x_l = -b_k v.
  std::set<std::vector<std::uint64_t>> pts;
  for (const auto& L : rep.lines) {
    auto multiples = [&](const Poly& p1, const Poly& p2) {
      return polys_below(f, std::max(B - std::max(p1.deg(), p2.deg()), 0));
    };
    for (const auto& u : multiples(L.bi, L.bj)) {
      for (const auto& v : multiples(L.bk, L.bl)) {
        std::vector<Poly> x(4);
        x[L.i] = L.bj * u;
        x[L.j] = -(L.bi * u);
        x[L.k] = L.bl * v;
        x[L.l] = -(L.bk * v);
        bool inside = true;
        for (const auto& xi : x)
          if (xi.deg() >= B) inside = false;
        if (!inside) continue;
        if (!F.eval(x).is_zero()) throw std::logic_error("line point is not a solution");
        std::vector<std::uint64_t> key;
        for (const auto& xi : x) key.push_back(xi.index());
        pts.insert(key);
      }
    }
  }
  rep.line_points = pts.size();
  rep.circ.value = rep.total - rep.on_lines;
  rep.circ.method = CountMethod::line_filtered;
  rep.circ.params = form_params(F, "B=" + std::to_string(B) + " lines=" + std::to_string(rep.lines.size()));
  rep.circ.wall_time = seconds_since(t0);
  return rep;
}

CountReport count_M(const Field* f, int B, CountMethod m, const Budget& budget) {
  auto t0 = Clock::now();
  CountReport rep;
  rep.method = m;
  rep.params = "field=" + f->spec() + " B=" + std::to_string(B);
  auto xs = polys_below(f, B);
  Poly one = Poly::constant(f, 1);
  if (m == CountMethod::exhaustive) {
    std::vector<std::vector<Poly>> cands(6, xs);
    std::vector<Poly> coeff = {one, one, one, -one, -one, -one};
    rep.value = solve_count_exhaustive(cands, coeff, Poly(f), budget);
  } else {
    // sum_v cnt(v)^2 over three-cube sums v
    std::vector<std::vector<Poly>> cands(3, xs);
    Prepared pr = prepare(cands, {one, one, one}, Poly(f));
    const std::uint64_t tuples = half_size(pr, 0, 3);
    if (tuples * 48 > budget.max_bytes)
      throw BudgetExceeded("three-cube table needs about " + std::to_string(tuples * 48 >> 20) + " MiB");
    std::unordered_map<std::uint64_t, std::uint64_t> cnt;
    enumerate_half(pr, 0, 3, [&](const std::vector<size_t>&, std::uint64_t s) { ++cnt[s]; });
    std::uint64_t total = 0;
    for (const auto& [v, c] : cnt) total += c * c;
    rep.value = total;
  }
  rep.wall_time = seconds_since(t0);
  return rep;
}

int waring_B(const Poly& P, bool strict) {
  int d = std::max(P.deg(), 0);
  int b = (d + 2) / 3;
  return strict ? b : b + 1;
}

CountReport count_R(const Field* f, int n, const Poly& P, bool strict, CountMethod m, const Budget& budget) {
  auto t0 = Clock::now();
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const int B = waring_B(P, strict);
  std::vector<std::vector<Poly>> cands(static_cast<size_t>(n), polys_below(f, B));
  std::vector<Poly> coeff(static_cast<size_t>(n), Poly::constant(f, 1));
  CountReport rep;
  rep.value = run_engine(cands, coeff, P, m, budget);
  rep.method = m;
  rep.params = "field=" + f->spec() + " n=" + std::to_string(n) + " P=" + format(P) + " B=" + std::to_string(B);
  rep.wall_time = seconds_since(t0);
  return rep;
}

Jq3::Jq3(const Field* f, int D) : f_(f), D_(D) {
  if (D < 0) throw std::invalid_argument("D must be >= 0");
  const int g = (D + 2) / 3 + 1;  // generator degree bound
  len_ = (3 * g + 1) * f->h();
  pivots_.clear();
  for (const auto& x : polys_below(f, g + 1)) {
    if (x.is_zero()) continue;
    ++generators_;
    std::vector<int> v = to_vec(x * x * x);
    // reduce against the basis (pivot = highest nonzero coordinate)
    for (size_t k = 0; k < basis_.size(); ++k) {
      int pv = pivots_[k];
      if (v[pv]) {
        int fac = v[pv];
        for (int i = 0; i <= pv; ++i) v[i] = ((v[i] - fac * basis_[k][i]) % f->p() + f->p()) % f->p();
      }
    }
    int top = -1;
    for (int i = len_ - 1; i >= 0; --i)
      if (v[i]) {
        top = i;
        break;
      }
    if (top < 0) continue;
    int inv = 1;
    while ((inv * v[top]) % f->p() != 1) ++inv;
    for (auto& e : v) e = (e * inv) % f->p();
    // keep the basis fully reduced at the new pivot
    for (auto& b : basis_) {
      if (b[top]) {
        int fac = b[top];
        for (int i = 0; i <= top; ++i) b[i] = ((b[i] - fac * v[i]) % f->p() + f->p()) % f->p();
      }
    }
    basis_.push_back(std::move(v));
    pivots_.push_back(top);
  }
}

std::vector<int> Jq3::to_vec(const Poly& P) const {
  std::vector<int> v(static_cast<size_t>(len_), 0);
  const int h = f_->h();
  for (int i = 0; i <= P.deg(); ++i) {
    if ((i + 1) * h > len_) throw std::invalid_argument("polynomial degree beyond the closure window");
    auto c = f_->coords(P.coeff(i));
    for (int j = 0; j < h; ++j) v[i * h + j] = c[j];
  }
  return v;
}

bool Jq3::contains(const Poly& P) const {
  if (P.deg() > D_) throw std::invalid_argument("membership is only computed up to degree D");
  std::vector<int> v = to_vec(P);
  for (size_t k = 0; k < basis_.size(); ++k) {
    int pv = pivots_[k];
    if (v[pv]) {
      int fac = v[pv];
      for (int i = 0; i <= pv; ++i) v[i] = ((v[i] - fac * basis_[k][i]) % f_->p() + f_->p()) % f_->p();
    }
  }
  for (int e : v)
    if (e) return false;
  return true;
}

int Jq3::dimension() const {
  int dim = 0;
  for (int pv : pivots_)
    if (pv < (D_ + 1) * f_->h()) ++dim;
  return dim;
}

Jq3 jq3_closure(const Field* f, int D) { return Jq3(f, D); }

CountReport count_congruence(const DiagonalForm& F, const Poly& P, const Poly& M, const std::vector<Poly>& b,
                             const std::vector<Laurent>& x0, int N, CountMethod m, const Budget& budget) {
  if (M.is_zero()) throw std::invalid_argument("modulus M must be nonzero");
  if (static_cast<int>(b.size()) != F.n()) throw std::invalid_argument("b has the wrong dimension");
  for (const auto& bi : b)
    if (bi.deg() >= M.deg()) throw std::invalid_argument("need |b| < |M|");
  Weight w = Weight::box(x0, N);
  w.M = M;
  w.b = b;
  CountReport rep = count_Nw(F, P, w, m, budget);
  rep.params += " M=" + format(M);
  return rep;
}

}  // namespace ffc
