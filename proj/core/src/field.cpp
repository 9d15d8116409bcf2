#include "ffcubes/field.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace ffc {

namespace {

constexpr int kMaxTabled = 1024;
constexpr int kMaxOrder = 1 << 16;

// Conway polynomials, ascending coefficients.
const std::map<int, std::pair<int, std::vector<int>>>& default_moduli() {
  static const std::map<int, std::pair<int, std::vector<int>>> table = {
      {4, {2, {1, 1, 1}}},       {8, {2, {1, 1, 0, 1}}},       {9, {3, {2, 2, 1}}},
      {16, {2, {1, 1, 0, 0, 1}}}, {25, {5, {2, 4, 1}}},         {27, {3, {1, 2, 0, 1}}},
      {32, {2, {1, 0, 1, 0, 0, 1}}},
  };
  return table;
}

using SmallPoly = std::vector<int>;  // ascending over F_p

void trim(SmallPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

SmallPoly smallmod(SmallPoly a, const SmallPoly& m, int p) {
  trim(a);
  int dm = static_cast<int>(m.size()) - 1;
  int inv_lc = 1;
  for (int k = 1; k < p; ++k)
    if (k * m.back() % p == 1) inv_lc = k;
  while (static_cast<int>(a.size()) - 1 >= dm) {
    int shift = static_cast<int>(a.size()) - 1 - dm;
    int f = a.back() * inv_lc % p;
    for (int i = 0; i <= dm; ++i) a[i + shift] = ((a[i + shift] - f * m[i]) % p + p) % p;
    trim(a);
  }
  return a;
}

bool small_irreducible(const SmallPoly& m, int p) {
  int h = static_cast<int>(m.size()) - 1;
  if (h <= 0) return false;
  if (h == 1) return true;
  // Trial division by every monic polynomial of degree 1..h/2.
  for (int d = 1; d <= h / 2; ++d) {
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long idx = 0; idx < count; ++idx) {
      SmallPoly div(d + 1);
      long long v = idx;
      for (int i = 0; i < d; ++i) {
        div[i] = static_cast<int>(v % p);
        v /= p;
      }
      div[d] = 1;
      if (smallmod(m, div, p).empty()) return false;
    }
  }
  return true;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

long long parse_int(std::string_view s, const char* what) {
  s = strip(s);
  if (s.empty()) throw std::invalid_argument(std::string("empty ") + what);
  bool neg = false;
  if (s.front() == '-' || s.front() == '+') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) throw std::invalid_argument(std::string("bad ") + what);
  long long v = 0;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw std::invalid_argument(std::string("bad ") + what + ": '" + std::string(s) + "'");
    v = v * 10 + (ch - '0');
    if (v > (1LL << 40)) throw std::invalid_argument(std::string(what) + " too large");
  }
  return neg ? -v : v;
}

// Parses a polynomial in `var` with integer coefficients; ascending result
// reduced mod p (p == 0 keeps raw integers).
std::vector<long long> parse_int_poly(std::string_view text, char var) {
  std::vector<long long> out;
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty polynomial");
  size_t i = 0;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (i != 0) {
      throw std::invalid_argument("expected '+' or '-' at position " + std::to_string(i));
    }
    size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
    std::string term = s.substr(i, j - i);
    if (term.empty()) throw std::invalid_argument("empty term at position " + std::to_string(i));
    long long coef = 1;
    int exp = 0;
    auto vpos = term.find(var);
    if (vpos == std::string::npos) {
      coef = parse_int(term, "coefficient");
    } else {
      std::string c = term.substr(0, vpos);
      if (!c.empty()) {
        if (c.back() != '*') throw std::invalid_argument("expected '*' before variable in '" + term + "'");
        c.pop_back();
        coef = parse_int(c, "coefficient");
      }
      std::string rest = term.substr(vpos + 1);
      if (rest.empty()) {
        exp = 1;
      } else {
        if (rest.front() != '^') throw std::invalid_argument("bad exponent in '" + term + "'");
        exp = static_cast<int>(parse_int(rest.substr(1), "exponent"));
        if (exp < 0) throw std::invalid_argument("negative exponent in '" + term + "'");
      }
    }
    if (static_cast<int>(out.size()) <= exp) out.resize(exp + 1, 0);
    out[exp] += sign * coef;
    i = j;
  }
  return out;
}

}  // namespace

bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::shared_ptr<const Field> Field::make(int p, int h, std::vector<int> modulus, FieldOptions opt) {
  if (!is_prime(p)) throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
  if (p == 3 && !opt.allow_char3) throw std::invalid_argument("characteristic 3 is not supported");
  if (h < 1) throw std::invalid_argument("h must be positive");
  long long q = 1;
  for (int i = 0; i < h; ++i) {
    q *= p;
    if (q > kMaxOrder) throw std::invalid_argument("field order exceeds 65536");
  }
  if (h > 1 && q > kMaxTabled) throw std::invalid_argument("extension fields are limited to q <= 1024");
  if (h == 1) {
    modulus = {0, 1};
  } else {
    for (int& c : modulus) c = ((c % p) + p) % p;
    SmallPoly m(modulus.begin(), modulus.end());
    trim(m);
    if (static_cast<int>(m.size()) != h + 1) throw std::invalid_argument("modulus must have degree h");
    if (m.back() != 1) throw std::invalid_argument("modulus must be monic");
    if (!small_irreducible(m, p)) throw std::invalid_argument("modulus is reducible over F_p");
    modulus = m;
  }
  auto f = std::shared_ptr<Field>(new Field());
  f->p_ = p;
  f->h_ = h;
  f->q_ = static_cast<int>(q);
  f->mod_ = std::move(modulus);
  f->build();
  return f;
}

std::shared_ptr<const Field> Field::of_order(int q, FieldOptions opt) {
  if (is_prime(q)) return make(q, 1, {}, opt);
  auto it = default_moduli().find(q);
  if (it == default_moduli().end())
    throw std::invalid_argument("no bundled modulus for q = " + std::to_string(q) + "; use p=,h=,mod=");
  int p = it->second.first;
  int h = 0;
  for (int v = q; v > 1; v /= p) ++h;
  return make(p, h, it->second.second, opt);
}

std::shared_ptr<const Field> Field::parse(std::string_view spec, FieldOptions opt) {
  std::map<std::string, std::string> kv;
  std::string s(spec);
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    auto eq = part.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("field spec: expected key=value in '" + part + "'");
    kv[std::string(strip(part.substr(0, eq)))] = std::string(strip(part.substr(eq + 1)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (kv.count("q")) {
    if (kv.size() != 1) throw std::invalid_argument("field spec: q= cannot be combined with other keys");
    return of_order(static_cast<int>(parse_int(kv["q"], "q")), opt);
  }
  if (!kv.count("p")) throw std::invalid_argument("field spec: missing p=");
  int p = static_cast<int>(parse_int(kv["p"], "p"));
  int h = kv.count("h") ? static_cast<int>(parse_int(kv["h"], "h")) : 1;
  std::vector<int> mod;
  if (h > 1) {
    if (!kv.count("mod")) throw std::invalid_argument("field spec: h > 1 needs mod=");
    for (long long c : parse_int_poly(kv["mod"], 'g')) mod.push_back(static_cast<int>(((c % p) + p) % p));
  }
  return make(p, h, mod, opt);
}

std::string Field::spec() const {
  if (h_ == 1) return "q=" + std::to_string(q_);
  std::string m;
  for (int i = h_; i >= 0; --i) {
    int c = mod_[i];
    if (c == 0) continue;
    if (!m.empty()) m += "+";
    if (i == 0) {
      m += std::to_string(c);
    } else {
      if (c != 1) m += std::to_string(c) + "*";
      m += "g";
      if (i > 1) m += "^" + std::to_string(i);
    }
  }
  return "p=" + std::to_string(p_) + ",h=" + std::to_string(h_) + ",mod=" + m;
}

Elem Field::slow_add(Elem a, Elem b) const {
  if (h_ == 1) return static_cast<Elem>((a + b) % static_cast<Elem>(p_));
  Elem r = 0, scale = 1;
  for (int i = 0; i < h_; ++i) {
    Elem d = (a % p_ + b % p_) % p_;
    r += d * scale;
    scale *= p_;
    a /= p_;
    b /= p_;
  }
  return r;
}

Elem Field::slow_mul(Elem a, Elem b) const {
  if (h_ == 1) return static_cast<Elem>(static_cast<std::uint64_t>(a) * b % static_cast<std::uint64_t>(p_));
  std::vector<int> ca = coords(a), cb = coords(b);
  SmallPoly prod(2 * h_ - 1, 0);
  for (int i = 0; i < h_; ++i)
    for (int j = 0; j < h_; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p_;
  SmallPoly r = smallmod(prod, SmallPoly(mod_.begin(), mod_.end()), p_);
  r.resize(h_, 0);
  return from_coords(r);
}

void Field::build() {
  neg_.resize(q_);
  for (int a = 0; a < q_; ++a) {
    std::vector<int> c = coords(static_cast<Elem>(a));
    for (int& x : c) x = (p_ - x) % p_;
    neg_[a] = from_coords(c);
  }
  tabled_ = false;
  if (q_ <= kMaxTabled) {
    add_.resize(static_cast<size_t>(q_) * q_);
    mul_.resize(static_cast<size_t>(q_) * q_);
    for (int a = 0; a < q_; ++a)
      for (int b = 0; b < q_; ++b) {
        add_[a * q_ + b] = static_cast<std::uint16_t>(slow_add(a, b));
        mul_[a * q_ + b] = static_cast<std::uint16_t>(slow_mul(a, b));
      }
    tabled_ = true;
  }
  inv_.assign(q_, 0);
  // Multiplicative group is cyclic; find inverses through powers of a generator.
  for (Elem g = 1; g < static_cast<Elem>(q_); ++g) {
    Elem x = 1;
    int order = 0;
    do {
      x = mul(x, g);
      ++order;
    } while (x != 1);
    if (order == q_ - 1) {
      std::vector<Elem> powers(q_ - 1);
      x = 1;
      for (int k = 0; k < q_ - 1; ++k) {
        powers[k] = x;
        x = mul(x, g);
      }
      for (int k = 0; k < q_ - 1; ++k) inv_[powers[k]] = powers[(q_ - 1 - k) % (q_ - 1)];
      break;
    }
  }
  trace_.assign(q_, 0);
  for (int a = 0; a < q_; ++a) {
    Elem x = static_cast<Elem>(a), s = 0;
    for (int i = 0; i < h_; ++i) {
      s = add(s, x);
      x = pow(x, static_cast<std::uint64_t>(p_));
    }
    trace_[a] = static_cast<int>(s);  // lies in F_p, whose codes are 0..p-1
  }
  sqrt_.assign(q_, -1);
  cube_roots_.assign(q_, {});
  for (int y = 0; y < q_; ++y) {
    Elem yy = mul(y, y);
    if (sqrt_[yy] < 0) sqrt_[yy] = y;
    cube_roots_[mul(yy, y)].push_back(static_cast<Elem>(y));
  }
}

Elem Field::from_int(long long v) const {
  long long r = v % p_;
  if (r < 0) r += p_;
  return static_cast<Elem>(r);
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw std::domain_error("inverse of zero in F_q");
  return inv_[a];
}

Elem Field::pow(Elem a, std::uint64_t e) const {
  Elem r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

std::vector<int> Field::coords(Elem a) const {
  std::vector<int> c(h_);
  for (int i = 0; i < h_; ++i) {
    c[i] = static_cast<int>(a % p_);
    a /= p_;
  }
  return c;
}

Elem Field::from_coords(std::span<const int> c) const {
  Elem r = 0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) r = r * p_ + static_cast<Elem>(((c[i] % p_) + p_) % p_);
  return r;
}

std::optional<Elem> Field::sqrt(Elem a) const {
  if (sqrt_[a] < 0) return std::nullopt;
  return static_cast<Elem>(sqrt_[a]);
}

Elem Field::nonsquare() const {
  if (p_ == 2) throw std::domain_error("no nonsquare in char 2");
  for (Elem a = 1; a < static_cast<Elem>(q_); ++a)
    if (!is_square(a)) return a;
  throw std::logic_error("odd field without nonsquare");
}

std::string Field::format(Elem a) const {
  if (h_ == 1) return std::to_string(a);
  if (a == 0) return "0";
  std::vector<int> c = coords(a);
  std::string s;
  for (int i = 0; i < h_; ++i) {
    if (c[i] == 0) continue;
    if (!s.empty()) s += "+";
    if (i == 0) {
      s += std::to_string(c[i]);
      continue;
    }
    if (c[i] != 1) s += std::to_string(c[i]) + "*";
    s += "g";
    if (i > 1) s += "^" + std::to_string(i);
  }
  return s;
}

Elem Field::parse_elem(std::string_view text) const {
  std::vector<long long> c = parse_int_poly(text, 'g');
  if (h_ == 1 && c.size() > 1) throw std::invalid_argument("generator g used in a prime field");
  for (long long v : c)
    if (v >= p_ || v <= -p_) throw std::invalid_argument("coefficient " + std::to_string(v) + " not in F_" + std::to_string(p_));
  // Reduce powers of g modulo the field modulus.
  SmallPoly sp(c.size());
  for (size_t i = 0; i < c.size(); ++i) sp[i] = static_cast<int>(((c[i] % p_) + p_) % p_);
  if (h_ > 1) sp = smallmod(sp, SmallPoly(mod_.begin(), mod_.end()), p_);
  sp.resize(h_, 0);
  return from_coords(sp);
}

}  // namespace ffc
