#include "ffcubes/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace ffc {

Laurent Laurent::from_poly(const Poly& a) {
  Laurent r(a.field());
  r.d_ = a.coeffs();
  r.normalize();
  return r;
}

Laurent Laurent::monomial(const Field* f, Elem c, int k) {
  Laurent r(f);
  if (c) {
    r.lo_ = k;
    r.d_ = {c};
  }
  return r;
}

Laurent Laurent::from_digits(const Field* f, int lo, std::vector<Elem> d, bool exact) {
  Laurent r(f);
  r.lo_ = lo;
  r.d_ = std::move(d);
  r.exact_ = exact;
  r.normalize();
  return r;
}

Laurent Laurent::ratio(const Poly& a, const Poly& b, int floor) {
  int s = std::max(0, -floor);
  auto [quo, rem] = divmod(a.shifted(s), b);
  Laurent r = from_poly(quo).shifted(-s);
  if (rem.is_zero()) return r;
  return r.truncated(floor);
}

void Laurent::normalize() {
  while (!d_.empty() && d_.back() == 0) d_.pop_back();
  if (exact_) {
    size_t z = 0;
    while (z < d_.size() && d_[z] == 0) ++z;
    if (z) {
      d_.erase(d_.begin(), d_.begin() + static_cast<long>(z));
      lo_ += static_cast<int>(z);
    }
    if (d_.empty()) lo_ = 0;
  }
}

int Laurent::top() const { return d_.empty() ? kNoTop : lo_ + static_cast<int>(d_.size()) - 1; }

int Laurent::abs_log() const {
  if (d_.empty()) throw std::domain_error(exact_ ? "log of zero" : "magnitude undetermined at this precision");
  return top();
}

int Laurent::abs_log_bound() const {
  if (!d_.empty()) return top();
  return exact_ ? kNoTop : lo_ - 1;
}

Elem Laurent::digit(int i) const {
  if (!exact_ && i < lo_) throw std::domain_error("digit below precision floor");
  if (i < lo_ || i > top() || d_.empty()) return 0;
  return d_[static_cast<size_t>(i - lo_)];
}

namespace {

const Field* pick(const Laurent& a, const Laurent& b) {
  const Field* f = a.field() ? a.field() : b.field();
  if (!f) throw std::logic_error("Laurent value without field");
  return f;
}

}  // namespace

Laurent& Laurent::operator+=(const Laurent& o) {
  f_ = pick(*this, o);
  bool ex = exact_ && o.exact_;
  int lo;
  if (ex) {
    lo = std::min(d_.empty() ? o.lo_ : lo_, o.d_.empty() ? lo_ : o.lo_);
  } else {
    lo = std::max(floor(), o.floor());
  }
  int hi = std::max(top(), o.top());
  std::vector<Elem> r;
  if (hi != kNoTop && hi >= lo) {
    r.resize(static_cast<size_t>(hi - lo + 1));
    for (int i = lo; i <= hi; ++i) {
      Elem x = (i >= lo_ && i <= top()) ? d_[i - lo_] : 0;
      Elem y = (i >= o.lo_ && i <= o.top()) ? o.d_[i - o.lo_] : 0;
      r[i - lo] = f_->add(x, y);
    }
  }
  lo_ = lo;
  d_ = std::move(r);
  exact_ = ex;
  normalize();
  return *this;
}

Laurent Laurent::operator-() const {
  Laurent r = *this;
  for (auto& x : r.d_) x = f_->neg(x);
  return r;
}

Laurent& Laurent::operator-=(const Laurent& o) { return *this += -o; }

Laurent operator*(const Laurent& a, const Laurent& b) {
  const Field* f = pick(a, b);
  if ((a.exact_ && a.d_.empty()) || (b.exact_ && b.d_.empty())) return Laurent(f);
  bool ex = a.exact_ && b.exact_;
  long long fl = LLONG_MIN;
  if (!a.exact_) fl = std::max(fl, static_cast<long long>(a.lo_) + b.abs_log_bound());
  if (!b.exact_) fl = std::max(fl, static_cast<long long>(b.lo_) + a.abs_log_bound());
  Laurent r(f);
  r.exact_ = ex;
  if (a.d_.empty() || b.d_.empty()) {
    r.lo_ = static_cast<int>(fl);
    return r;
  }
  std::vector<Elem> c(a.d_.size() + b.d_.size() - 1, 0);
  for (size_t i = 0; i < a.d_.size(); ++i) {
    if (!a.d_[i]) continue;
    for (size_t j = 0; j < b.d_.size(); ++j) c[i + j] = f->add(c[i + j], f->mul(a.d_[i], b.d_[j]));
  }
  r.lo_ = a.lo_ + b.lo_;
  r.d_ = std::move(c);
  if (!ex) {
    r.exact_ = true;
    r.normalize();
    return r.truncated(static_cast<int>(fl));
  }
  r.normalize();
  return r;
}

Laurent Laurent::shifted(int k) const {
  Laurent r = *this;
  r.lo_ += k;
  if (r.exact_ && r.d_.empty()) r.lo_ = 0;
  return r;
}

Laurent Laurent::truncated(int fl) const {
  if (!exact_ && fl <= lo_) return *this;
  Laurent r(f_);
  r.exact_ = false;
  r.lo_ = fl;
  int hi = top();
  if (hi != kNoTop && hi >= fl) {
    r.d_.resize(static_cast<size_t>(hi - fl + 1));
    for (int i = fl; i <= hi; ++i) r.d_[i - fl] = (i >= lo_) ? d_[i - lo_] : 0;
  }
  r.normalize();
  return r;
}

bool operator==(const Laurent& a, const Laurent& b) {
  if (a.exact_ != b.exact_) return false;
  if (a.exact_) return a.d_ == b.d_ && (a.d_.empty() || a.lo_ == b.lo_);
  return a.lo_ == b.lo_ && a.d_ == b.d_;
}

int psi_exp(const Laurent& a) {
  if (!a.exact() && a.floor() > -1) throw std::domain_error("character undetermined at this precision");
  return a.field()->trace(a.digit(-1));
}

CycNum psi(const Laurent& a) { return CycNum::zeta_pow(a.field()->p(), psi_exp(a)); }

Laurent parse_laurent(std::string_view text, const Field* f) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  std::optional<int> lo;
  if (auto at = s.find('@'); at != std::string::npos) {
    std::string tail = s.substr(at + 1);
    if (tail.rfind("lo=", 0) != 0) throw std::invalid_argument("expected @lo=<int>");
    lo = std::stoi(tail.substr(3));
    s = s.substr(0, at);
  }
  if (s.empty()) throw std::invalid_argument("empty Laurent literal");
  Laurent out(f);
  size_t i = 0;
  while (i < s.size()) {
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
      neg = s[i] == '-';
      ++i;
    } else if (i != 0) {
      throw std::invalid_argument("syntax error at position " + std::to_string(i));
    }
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
    std::string cs = tpos == std::string::npos ? term : term.substr(0, tpos);
    if (tpos != std::string::npos) {
      std::string ks = term.substr(tpos + 1);
      if (ks.empty()) {
        k = 1;
      } else if (ks[0] == '^') {
        k = std::stoi(ks.substr(1));
      } else {
        throw std::invalid_argument("syntax error in term '" + term + "'");
      }
      if (!cs.empty()) {
        if (cs.back() != '*') throw std::invalid_argument("syntax error in term '" + term + "'");
        cs.pop_back();
      }
    }
    if (!cs.empty()) {
      if (cs.front() == '(' && cs.back() == ')') cs = cs.substr(1, cs.size() - 2);
      c = f->parse_elem(cs);
    }
    if (neg) c = f->neg(c);
    out += Laurent::monomial(f, c, k);
    i = j;
  }
  if (lo) {
    if (!out.is_zero() && out.low() < *lo) throw std::invalid_argument("term below the @lo precision floor");
    return out.truncated(*lo);
  }
  return out;
}

std::string format(const Laurent& a) {
  std::string s;
  const Field* f = a.field();
  if (!a.is_zero()) {
    const int lo = a.low();
    for (int i = a.top(); i >= lo; --i) {
      Elem c = a.digit(i);
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
      if (i != 1) s += "^" + std::to_string(i);
    }
  }
  if (s.empty()) s = "0";
  if (!a.exact()) s += " @lo=" + std::to_string(a.floor());
  return s;
}

namespace {

struct DigitPos {
  int coord;
  int index;
};

// Enumerate every representative of the box at the given depth, calling visit
// with the coordinate vector. Returns log_q of the cell measure.
long long enumerate_box(const Field& f, const std::vector<CoordBall>& box, int depth,
                        const std::function<void(const std::vector<Laurent>&)>& visit) {
  const int n = static_cast<int>(box.size());
  long long cell_log = 0;
  std::vector<DigitPos> pos;
  for (int i = 0; i < n; ++i) {
    const auto& b = box[i];
    if (!b.center.exact() && b.center.floor() > -depth)
      throw std::domain_error("box center known only above the integration depth");
    if (b.radius_log - 1 >= -depth) {
      cell_log += -depth;
      for (int k = b.radius_log - 1; k >= -depth; --k) pos.push_back({i, k});
    } else {
      cell_log += b.radius_log;
    }
  }
  std::vector<Laurent> x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = box[i].center;
  std::vector<Elem> val(pos.size(), 0);
  const Elem q = static_cast<Elem>(f.q());
  while (true) {
    visit(x);
    size_t k = pos.size();
    size_t j = 0;
    for (; j < k; ++j) {
      const auto& dp = pos[k - 1 - j];
      Elem old = val[k - 1 - j];
      Elem nv = old + 1 == q ? 0 : old + 1;
      val[k - 1 - j] = nv;
      x[dp.coord] += Laurent::monomial(&f, f.sub(nv, old), dp.index);
      if (nv != 0) break;
    }
    if (j == k) break;
  }
  return cell_log;
}

}  // namespace

CycNum haar_integrate(const Field& f, const std::vector<CoordBall>& box, int depth,
                      const std::function<CycNum(const std::vector<Laurent>&)>& fn, bool check_depth) {
  CycNum acc(f.p());
  long long cl = enumerate_box(f, box, depth, [&](const std::vector<Laurent>& x) { acc += fn(x); });
  CycNum res = acc * qpow(f.q(), cl);
  if (check_depth) {
    CycNum again = haar_integrate(f, box, depth + 1, fn, false);
    if (!(again == res)) throw std::logic_error("integrand not constant at the stated depth");
  }
  return res;
}

CycNum haar_integrate_char(const Field& f, const std::vector<CoordBall>& box, int depth,
                           const std::function<int(const std::vector<Laurent>&)>& fn, bool check_depth) {
  ZetaSum acc(f.p());
  long long cl = enumerate_box(f, box, depth, [&](const std::vector<Laurent>& x) {
    int e = fn(x);
    if (e >= 0) acc.add_power(e);
  });
  CycNum res = acc.to_cyc_scaled(qpow(f.q(), cl));
  if (check_depth) {
    CycNum again = haar_integrate_char(f, box, depth + 1, fn, false);
    if (!(again == res)) throw std::logic_error("integrand not constant at the stated depth");
  }
  return res;
}

mpq_class Ball::measure() const { return qpow(r.field()->q(), -(r.deg() + Q)); }

bool Ball::contains(const Laurent& alpha) const {
  int need = -(r.deg() + Q);
  if (!alpha.exact() && alpha.floor() > need) throw std::domain_error("alpha known too coarsely for this ball");
  Laurent d = Laurent::from_poly(r) * alpha - Laurent::from_poly(a);
  int tp = d.top();
  return tp == Laurent::kNoTop || tp < -Q;
}

std::string format(const Ball& b) {
  return "(" + format(b.a) + "/" + format(b.r) + ", radius=q^-" + std::to_string(b.r.deg() + b.Q) + ")";
}

std::vector<Ball> farey_dissect(const Field* f, int Q) {
  if (Q < 1) throw std::invalid_argument("farey_dissect needs Q >= 1");
  std::vector<Ball> out;
  for (const Poly& r : monic_upto(f, Q)) {
    const std::uint64_t na = ipow_u64(static_cast<std::uint64_t>(f->q()), r.deg());
    for (std::uint64_t i = 0; i < na; ++i) {
      Poly a = Poly::from_index(f, i);
      if (r.deg() == 0) {
        out.push_back({a, r, Q});
        continue;
      }
      if (gcd(a, r).is_one()) out.push_back({a, r, Q});
    }
  }
  return out;
}

std::optional<size_t> farey_locate(const std::vector<Ball>& balls, const Laurent& alpha) {
  for (size_t i = 0; i < balls.size(); ++i)
    if (balls[i].contains(alpha)) return i;
  return std::nullopt;
}

namespace {

long long parabola_count(const Field& f, const Laurent& a, int M, int m) {
  long long count = 0;
  CoordBall ball{Laurent(&f), 0};
  enumerate_box(f, {ball}, m, [&](const std::vector<Laurent>& x) {
    Laurent d = x[0] * x[0] - a;
    int tp = d.top();
    if (tp == Laurent::kNoTop || tp < M) ++count;
  });
  return count;
}

}  // namespace

mpq_class measure_parabola(const Laurent& a, const Laurent& b, bool check_depth) {
  if (b.is_zero()) {
    if (!b.exact()) throw std::domain_error("|b| undetermined at this precision");
    return 0;
  }
  const Field& f = *a.field();
  int M = b.abs_log();
  if (!a.exact() && a.floor() > M) throw std::domain_error("a known too coarsely for |b|");
  Laurent at = a.exact() ? a : a.truncated(M);
  int m = std::max(1, -M - 1);
  mpq_class res = mpq_class(static_cast<long>(parabola_count(f, at, M, m))) * qpow(f.q(), -m);
  if (check_depth) {
    mpq_class again = mpq_class(static_cast<long>(parabola_count(f, at, M, m + 1))) * qpow(f.q(), -(m + 1));
    if (again != res) throw std::logic_error("parabola measure changed at depth +1");
  }
  return res;
}

}  // namespace ffc
