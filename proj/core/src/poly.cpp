#include "ffcubes/poly.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>
#include <stdexcept>

namespace ffc {

namespace {

const Field* pick(const Poly& a, const Poly& b) {
  const Field* f = a.field() ? a.field() : b.field();
  if (!f) throw std::logic_error("polynomial without field");
  return f;
}

}  // namespace

std::uint64_t ipow_u64(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

Poly::Poly(const Field* f, std::vector<Elem> coeffs) : f_(f), c_(std::move(coeffs)) { trim(); }

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::constant(const Field* f, Elem c) { return Poly(f, {c}); }

Poly Poly::monomial(const Field* f, Elem c, int k) {
  if (c == 0) return Poly(f);
  std::vector<Elem> v(static_cast<size_t>(k) + 1, 0);
  v[k] = c;
  return Poly(f, std::move(v));
}

Poly Poly::from_index(const Field* f, std::uint64_t idx) {
  std::vector<Elem> v;
  const std::uint64_t q = static_cast<std::uint64_t>(f->q());
  while (idx) {
    v.push_back(static_cast<Elem>(idx % q));
    idx /= q;
  }
  return Poly(f, std::move(v));
}

std::uint64_t Poly::index() const {
  std::uint64_t r = 0;
  const std::uint64_t q = static_cast<std::uint64_t>(f_ ? f_->q() : 2);
  for (int i = deg(); i >= 0; --i) r = r * q + c_[i];
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  f_ = pick(*this, o);
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] = f_->add(c_[i], o.c_[i]);
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  f_ = pick(*this, o);
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] = f_->sub(c_[i], o.c_[i]);
  trim();
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  const Field* f = pick(a, b);
  if (a.is_zero() || b.is_zero()) return Poly(f);
  std::vector<Elem> r(a.c_.size() + b.c_.size() - 1, 0);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    Elem ai = a.c_[i];
    if (!ai) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] = f->add(r[i + j], f->mul(ai, b.c_[j]));
  }
  return Poly(f, std::move(r));
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& x : r.c_) x = f_->neg(x);
  return r;
}

Poly Poly::scaled(Elem s) const {
  if (s == 0) return Poly(f_);
  Poly r = *this;
  for (auto& x : r.c_) x = f_->mul(x, s);
  return r;
}

Poly Poly::shifted(int k) const {
  if (is_zero()) return *this;
  Poly r = *this;
  r.c_.insert(r.c_.begin(), static_cast<size_t>(k), 0);
  return r;
}

std::strong_ordering operator<=>(const Poly& a, const Poly& b) {
  if (a.deg() != b.deg()) return a.deg() <=> b.deg();
  for (int i = a.deg(); i >= 0; --i)
    if (a.c_[i] != b.c_[i]) return a.c_[i] <=> b.c_[i];
  return std::strong_ordering::equal;
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  const Field* f = pick(a, b);
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (a.deg() < b.deg()) return {Poly(f), a};
  std::vector<Elem> r = a.coeffs();
  std::vector<Elem> quo(static_cast<size_t>(a.deg() - b.deg() + 1), 0);
  Elem inv = f->inv(b.lc());
  const auto& bc = b.coeffs();
  int db = b.deg();
  for (int k = a.deg() - db; k >= 0; --k) {
    Elem c = f->mul(r[k + db], inv);
    quo[k] = c;
    if (!c) continue;
    for (int i = 0; i <= db; ++i) r[k + i] = f->sub(r[k + i], f->mul(c, bc[i]));
  }
  r.resize(static_cast<size_t>(db));
  return {Poly(f, std::move(quo)), Poly(f, std::move(r))};
}

Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }
Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

bool divides(const Poly& d, const Poly& a) {
  if (d.is_zero()) return a.is_zero();
  return (a % d).is_zero();
}

Poly make_monic(const Poly& a) {
  if (a.is_zero()) return a;
  return a.scaled(a.field()->inv(a.lc()));
}

Poly gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = x % y;
    x = std::move(y);
    y = std::move(r);
  }
  return make_monic(x);
}

Xgcd xgcd(const Poly& a, const Poly& b) {
  const Field* f = pick(a, b);
  Poly r0 = a, r1 = b, s0 = Poly::constant(f, 1), s1(f), u0(f), u1 = Poly::constant(f, 1);
  while (!r1.is_zero()) {
    auto [qq, rr] = divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(rr);
    Poly s2 = s0 - qq * s1, u2 = u0 - qq * u1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    u0 = std::move(u1);
    u1 = std::move(u2);
  }
  if (r0.is_zero()) return {r0, s0, u0};
  Elem inv = f->inv(r0.lc());
  return {r0.scaled(inv), s0.scaled(inv), u0.scaled(inv)};
}

Poly pow(const Poly& a, unsigned e) {
  Poly r = Poly::constant(a.field(), 1), b = a;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

Poly powmod(Poly a, std::uint64_t e, const Poly& m) {
  Poly r = Poly::constant(m.field(), 1) % m;
  a = a % m;
  while (e) {
    if (e & 1) r = (r * a) % m;
    e >>= 1;
    if (e) a = (a * a) % m;
  }
  return r;
}

Poly derivative(const Poly& a) {
  const Field* f = a.field();
  if (a.deg() < 1) return Poly(f);
  std::vector<Elem> r(static_cast<size_t>(a.deg()), 0);
  for (int i = 1; i <= a.deg(); ++i) r[i - 1] = f->mul(f->from_int(i), a.coeff(i));
  return Poly(f, std::move(r));
}

Elem eval(const Poly& a, Elem x) {
  const Field* f = a.field();
  Elem r = 0;
  for (int i = a.deg(); i >= 0; --i) r = f->add(f->mul(r, x), a.coeff(i));
  return r;
}

int valuation(const Poly& a, const Poly& w) {
  if (a.is_zero()) throw std::domain_error("valuation of zero");
  int v = 0;
  Poly x = a;
  while (true) {
    auto [qq, rr] = divmod(x, w);
    if (!rr.is_zero()) return v;
    x = std::move(qq);
    ++v;
  }
}

int deg_gcd(const Poly& a, const Poly& b) { return gcd(a, b).deg(); }

Poly parse_poly(std::string_view text, const Field* f) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty polynomial");
  Poly out(f);
  size_t i = 0;
  while (i < s.size()) {
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
      neg = s[i] == '-';
      ++i;
    } else if (i != 0) {
      throw std::invalid_argument("syntax error at position " + std::to_string(i));
    }
    // A term runs to the next top-level '+'/'-'; coefficients of extension
    // fields may be parenthesized, e.g. (1+g)*t^2.
    size_t j = i;
    int depth = 0;
    while (j < s.size()) {
      if (s[j] == '(') ++depth;
      if (s[j] == ')') --depth;
      if (depth == 0 && (s[j] == '+' || s[j] == '-') && j > i && s[j - 1] != '^') break;
      ++j;
    }
    std::string term = s.substr(i, j - i);
    if (term.empty()) throw std::invalid_argument("syntax error at position " + std::to_string(i));
    Elem c = 1;
    int k = 0;
    auto tpos = term.rfind('t');
    if (tpos == std::string::npos) {
      std::string cs = term;
      if (cs.front() == '(' && cs.back() == ')') cs = cs.substr(1, cs.size() - 2);
      c = f->parse_elem(cs);
    } else {
      std::string cs = term.substr(0, tpos);
      if (!cs.empty()) {
        if (cs.back() != '*')
          throw std::invalid_argument("syntax error at position " + std::to_string(i + tpos) + ": expected '*'");
        cs.pop_back();
        if (cs.size() >= 2 && cs.front() == '(' && cs.back() == ')') cs = cs.substr(1, cs.size() - 2);
        c = f->parse_elem(cs);
      }
      std::string rest = term.substr(tpos + 1);
      if (rest.empty()) {
        k = 1;
      } else {
        if (rest.front() != '^')
          throw std::invalid_argument("syntax error at position " + std::to_string(i + tpos + 1));
        try {
          size_t used = 0;
          k = std::stoi(rest.substr(1), &used);
          if (used != rest.size() - 1 || k < 0) throw std::invalid_argument("");
        } catch (const std::exception&) {
          throw std::invalid_argument("bad exponent at position " + std::to_string(i + tpos + 2));
        }
      }
    }
    Poly term_poly = Poly::monomial(f, c, k);
    if (neg) out -= term_poly;
    else out += term_poly;
    i = j;
  }
  return out;
}

std::string format(const Poly& a) {
  if (a.is_zero()) return "0";
  const Field* f = a.field();
  std::string s;
  for (int i = a.deg(); i >= 0; --i) {
    Elem c = a.coeff(i);
    if (!c) continue;
    if (!s.empty()) s += "+";
    std::string cs = f->format(c);
    bool compound = cs.find('+') != std::string::npos;
    if (i == 0) {
      s += compound && !s.empty() ? "(" + cs + ")" : cs;
      continue;
    }
    if (c != 1) s += (compound ? "(" + cs + ")" : cs) + "*";
    s += "t";
    if (i > 1) s += "^" + std::to_string(i);
  }
  return s;
}

Poly Factorization::product() const {
  const Field* f = field;
  Poly r = Poly::constant(f, unit);
  for (const auto& [w, k] : factors) r = r * pow(w, static_cast<unsigned>(k));
  return r;
}

namespace {

// p-th root of a polynomial whose exponents are all multiples of p.
Poly pth_root(const Poly& a) {
  const Field* f = a.field();
  int p = f->p();
  std::vector<Elem> r(static_cast<size_t>(a.deg() / p + 1), 0);
  std::uint64_t e = ipow_u64(static_cast<std::uint64_t>(p), f->h() - 1);
  for (int i = 0; i <= a.deg(); i += p) r[i / p] = f->pow(a.coeff(i), e);
  return Poly(f, std::move(r));
}

void square_free(const Poly& a, int mult, std::vector<std::pair<Poly, int>>& out) {
  const Field* f = a.field();
  Poly c = gcd(a, derivative(a));
  Poly w = a / c;
  int i = 1;
  while (w.deg() > 0) {
    Poly y = gcd(w, c);
    Poly fac = w / y;
    if (fac.deg() > 0) out.push_back({make_monic(fac), i * mult});
    w = y;
    c = c / y;
    ++i;
  }
  if (c.deg() > 0) square_free(pth_root(make_monic(c)), mult * f->p(), out);
}

Poly frob_power(const Poly& a, int d, const Poly& m) {
  // a^(q^d) mod m
  Poly r = a % m;
  for (int i = 0; i < d; ++i) r = powmod(r, static_cast<std::uint64_t>(m.field()->q()), m);
  return r;
}

void equal_degree(const Poly& g, int d, std::mt19937_64& rng, std::vector<Poly>& out) {
  if (g.deg() == d) {
    out.push_back(make_monic(g));
    return;
  }
  const Field* f = g.field();
  int q = f->q();
  while (true) {
    std::vector<Elem> v(static_cast<size_t>(g.deg()));
    for (auto& x : v) x = static_cast<Elem>(rng() % static_cast<std::uint64_t>(q));
    Poly a(f, v);
    if (a.deg() < 1) continue;
    Poly b(f);
    if (f->p() == 2) {
      // Trace map a + a^2 + ... + a^(2^(h d - 1)).
      Poly term = a % g;
      b = term;
      for (int i = 1; i < f->h() * d; ++i) {
        term = (term * term) % g;
        b += term;
      }
    } else {
      // a^((q^d - 1)/2) = N^((q-1)/2), N = a^(1 + q + ... + q^(d-1)).
      Poly norm = Poly::constant(f, 1), fr = a % g;
      for (int i = 0; i < d; ++i) {
        norm = (norm * fr) % g;
        fr = powmod(fr, static_cast<std::uint64_t>(q), g);
      }
      b = powmod(norm, static_cast<std::uint64_t>((q - 1) / 2), g) - Poly::constant(f, 1);
    }
    Poly h1 = gcd(b, g);
    if (h1.deg() > 0 && h1.deg() < g.deg()) {
      equal_degree(h1, d, rng, out);
      equal_degree(g / h1, d, rng, out);
      return;
    }
  }
}

}  // namespace

Factorization factor(const Poly& a) {
  if (a.is_zero()) throw std::domain_error("factor: zero polynomial");
  const Field* f = a.field();
  Factorization res;
  res.field = f;
  res.unit = a.lc();
  Poly m = make_monic(a);
  std::vector<std::pair<Poly, int>> sqf;
  if (m.deg() > 0) square_free(m, 1, sqf);
  std::mt19937_64 rng(0x5eedULL);
  for (const auto& [g0, mult] : sqf) {
    Poly g = g0;
    Poly t = Poly::t(f);
    for (int d = 1; g.deg() > 0; ++d) {
      if (2 * d > g.deg()) {
        res.factors.push_back({make_monic(g), mult});
        break;
      }
      Poly h = frob_power(t, d, g) - t;
      Poly gd = gcd(h, g);
      if (gd.deg() > 0) {
        std::vector<Poly> parts;
        equal_degree(gd, d, rng, parts);
        for (auto& w : parts) res.factors.push_back({w, mult});
        g = g / gd;
      }
    }
  }
  // Merge duplicates (a prime can surface from different square-free layers).
  std::sort(res.factors.begin(), res.factors.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<Poly, int>> merged;
  for (auto& fk : res.factors) {
    if (!merged.empty() && merged.back().first == fk.first) merged.back().second += fk.second;
    else merged.push_back(fk);
  }
  res.factors = std::move(merged);
  return res;
}

bool is_irreducible(const Poly& a) {
  if (a.deg() < 1) return false;
  auto fz = factor(a);
  return fz.factors.size() == 1 && fz.factors[0].second == 1;
}

Decomposition decompose(const Poly& r, FullMode mode) {
  if (r.is_zero() || !r.is_monic()) throw std::invalid_argument("decompose: r must be monic and nonzero");
  const Field* f = r.field();
  Decomposition d{Poly::constant(f, 1), Poly::constant(f, 1), Poly::constant(f, 1), Poly::constant(f, 1)};
  int threshold = mode == FullMode::cube ? 3 : 2;
  for (const auto& [w, k] : factor(r).factors) {
    Poly wk = pow(w, static_cast<unsigned>(k));
    if (k >= threshold) d.full_part = d.full_part * wk;
    else d.free_part = d.free_part * wk;
    if (k <= 2) d.eta = d.eta * w;
    if (k == 1) d.m = d.m * w;
  }
  return d;
}

bool is_square_full(const Poly& r) {
  for (const auto& [w, k] : factor(r).factors)
    if (k < 2) return false;
  return true;
}

std::optional<Poly> cube_root(const Poly& a) {
  const Field* f = a.field();
  if (a.is_zero()) return a;
  if (a.deg() % 3 != 0) return std::nullopt;
  const auto& roots = f->cube_roots(a.lc());
  if (roots.empty()) return std::nullopt;
  int m = a.deg() / 3;
  if (f->p() == 3) {
    std::vector<Elem> r(static_cast<size_t>(m) + 1, 0);
    for (int i = 0; i <= a.deg(); ++i) {
      if (a.coeff(i) == 0) continue;
      if (i % 3 != 0) return std::nullopt;
      r[i / 3] = f->cube_roots(a.coeff(i)).front();
    }
    Poly R(f, r);
    if (pow(R, 3) == a) return R;
    return std::nullopt;
  }
  // Top-down solve: coefficient of t^(2m+k) in R^3 is 3 r_m^2 r_k + (known).
  std::vector<Elem> r(static_cast<size_t>(m) + 1, 0);
  r[m] = roots.front();
  Elem denom = f->inv(f->mul(f->from_int(3), f->mul(r[m], r[m])));
  for (int k = m - 1; k >= 0; --k) {
    r[k] = 0;
    Poly cur(f, r);
    Poly cube = pow(cur, 3);
    Elem diff = f->sub(a.coeff(2 * m + k), cube.coeff(2 * m + k));
    r[k] = f->mul(diff, denom);
  }
  Poly R(f, r);
  if (pow(R, 3) == a) return R;
  return std::nullopt;
}

std::optional<Poly> square_root(const Poly& a) {
  const Field* f = a.field();
  if (a.is_zero()) return a;
  if (a.deg() % 2 != 0) return std::nullopt;
  auto lr = f->sqrt(a.lc());
  if (!lr) return std::nullopt;
  int m = a.deg() / 2;
  std::vector<Elem> r(static_cast<size_t>(m) + 1, 0);
  if (f->p() == 2) {
    for (int i = 0; i <= a.deg(); ++i) {
      if (a.coeff(i) == 0) continue;
      if (i % 2 != 0) return std::nullopt;
      r[i / 2] = *f->sqrt(a.coeff(i));
    }
  } else {
    r[m] = *lr;
    Elem denom = f->inv(f->mul(f->from_int(2), r[m]));
    for (int k = m - 1; k >= 0; --k) {
      // coefficient of t^(m+k) in R^2 is 2 r_m r_k + sum_{i+j=m+k, k<i,j<m} r_i r_j
      Elem known = 0;
      for (int i = k + 1; i < m; ++i) {
        int j = m + k - i;
        if (j > k && j < m) known = f->add(known, f->mul(r[i], r[j]));
      }
      r[k] = f->mul(f->sub(a.coeff(m + k), known), denom);
    }
  }
  Poly R(f, r);
  if (R * R == a) return R;
  return std::nullopt;
}

std::vector<std::pair<Poly, Poly>> cube_ratio_all(const Poly& fi, const Poly& fj) {
  if (fi.is_zero() || fj.is_zero()) throw std::invalid_argument("cube_ratio: zero coefficient");
  const Field* f = fi.field();
  Poly g = gcd(fi, fj);
  Poly A = fi / g, B = fj / g;
  Elem u = B.lc();
  Poly Bm = make_monic(B);
  Poly Au = A.scaled(f->inv(u));
  auto b = cube_root(Bm);
  if (!b) return {};
  Poly bm = make_monic(*b);  // the monic cube root
  if (pow(bm, 3) != Bm) return {};
  auto a = cube_root(Au);
  if (!a) return {};
  std::vector<std::pair<Poly, Poly>> out;
  for (Elem w : f->cube_roots(1)) out.push_back({a->scaled(w), bm});
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::pair<Poly, Poly>> cube_ratio(const Poly& fi, const Poly& fj) {
  auto all = cube_ratio_all(fi, fj);
  if (all.empty()) return std::nullopt;
  return all.front();
}

Poly crt(const Poly& a1, const Poly& r1, const Poly& a2, const Poly& r2) {
  if (gcd(r1, r2).deg() != 0) throw std::invalid_argument("crt: moduli are not coprime");
  Xgcd x = xgcd(r1, r2);  // s r1 + u r2 = 1
  Poly m = r1 * r2;
  return (a1 * x.u * r2 + a2 * x.s * r1) % m;
}

std::vector<Poly> monic_enum(const Field* f, int deg) {
  std::vector<Poly> out;
  std::uint64_t count = ipow_u64(static_cast<std::uint64_t>(f->q()), deg);
  out.reserve(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    Poly low = Poly::from_index(f, idx);
    out.push_back(low + Poly::monomial(f, 1, deg));
  }
  return out;
}

std::vector<Poly> irreducible_enum(const Field* f, int deg) {
  std::vector<Poly> out;
  if (deg < 1) return out;
  for (auto& r : monic_enum(f, deg))
    if (is_irreducible(r)) out.push_back(std::move(r));
  return out;
}

std::vector<Poly> monic_upto(const Field* f, int d) {
  std::vector<Poly> out;
  for (int k = 0; k <= d; ++k) {
    auto v = monic_enum(f, k);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

Poly sylvester_resultant(const std::vector<Poly>& A, const std::vector<Poly>& B) {
  int m = static_cast<int>(A.size()) - 1, n = static_cast<int>(B.size()) - 1;
  if (m < 0 || n < 0) throw std::invalid_argument("sylvester_resultant: empty polynomial");
  const Field* f = A.front().field() ? A.front().field() : B.front().field();
  int N = m + n;
  if (N == 0) return Poly::constant(f, 1);
  std::vector<std::vector<Poly>> M(N, std::vector<Poly>(N, Poly(f)));
  // Rows hold coefficients from the top degree down.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) M[i][i + j] = A[m - j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) M[n + i][i + j] = B[n - j];
  bool negate = false;
  Poly prev = Poly::constant(f, 1);
  for (int k = 0; k < N - 1; ++k) {
    if (M[k][k].is_zero()) {
      int s = k + 1;
      while (s < N && M[s][k].is_zero()) ++s;
      if (s == N) return Poly(f);
      std::swap(M[k], M[s]);
      negate = !negate;
    }
    for (int i = k + 1; i < N; ++i) {
      for (int j = k + 1; j < N; ++j) M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev;
      M[i][k] = Poly(f);
    }
    prev = M[k][k];
  }
  Poly det = M[N - 1][N - 1];
  return negate ? -det : det;
}

}  // namespace ffc
