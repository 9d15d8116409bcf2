// ffcubes: experiment runner over the core library.
//
// Exit codes: 0 all checks passed, 1 a check failed (witness printed),
// 2 budget exceeded, 64 usage or input error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ffcubes/counting.hpp"
#include "ffcubes/delta.hpp"
#include "ffcubes/dualform.hpp"
#include "ffcubes/expsums.hpp"
#include "ffcubes/fit.hpp"
#include "ffcubes/waring.hpp"

using namespace ffc;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitCheck = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUsage = 64;

const char* kSigmaNote =
    "sigma_inf is the density of the Haar push-forward of x -> x_1^3 + ... + x_n^3 at P t^{-3B}, "
    "resolved at q^-K; it is a modeling choice checked only through the ratio column";

struct Globals {
  std::string field = "q=2";
  int q = 0;
  double budget_mib = 2048;
  std::uint64_t max_tuples = 20'000'000'000ull;
  int threads = 1;
  std::string csv, json, manifest, config;
  bool paranoid = false;
  std::string inject;
};

struct Outcome {
  Json json;
  std::string csv;
  bool ok = true;
  std::string check;
  Json witness;
  std::vector<std::string> notes;

  void fail(std::string what, Json w) {
    if (ok) {
      ok = false;
      check = std::move(what);
      witness = std::move(w);
    }
  }
};

std::string fmt_double(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string str(const mpq_class& v) { return v.get_str(); }

std::vector<int> parse_range(const std::string& s) {
  std::vector<int> out;
  auto dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      int lo = std::stoi(s.substr(0, dots)), hi = std::stoi(s.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument("empty range");
      for (int b = lo; b <= hi; ++b) out.push_back(b);
    } else {
      std::stringstream in(s);
      std::string part;
      while (std::getline(in, part, ',')) out.push_back(std::stoi(part));
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad range '" + s + "' (expected lo..hi or a comma list)");
  }
  if (out.empty()) throw std::invalid_argument("empty range '" + s + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

// Characteristic 3 only makes sense for subcommands that never touch a cubic form.
FieldPtr make_field(const Globals& g, bool allow_char3 = false) {
  FieldOptions opt;
  opt.allow_char3 = allow_char3;
  if (g.q > 0) return Field::of_order(g.q, opt);
  return Field::parse(g.field, opt);
}

Budget make_budget(const Globals& g) {
  Budget b;
  b.max_bytes = static_cast<std::uint64_t>(g.budget_mib * 1024.0 * 1024.0);
  b.max_tuples = g.max_tuples;
  b.threads = std::max(1, g.threads);
  return b;
}

std::string vec_str(const std::vector<Poly>& c) {
  std::string s;
  for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + format(c[i]);
  return s;
}

// Rows of B,count,log_q_count,slope_vs_prev with a least-squares fit.
void count_table(Outcome& out, int q, const std::vector<std::pair<int, std::uint64_t>>& rows) {
  std::ostringstream csv;
  csv << "B,count,log_q_count,slope_vs_prev\n";
  Json jr = Json::array();
  double prev = 0;
  bool have_prev = false;
  for (const auto& [B, v] : rows) {
    Json r;
    r["B"] = B;
    r["count"] = v;
    csv << B << ',' << v << ',';
    if (v > 0) {
      double l = std::log(static_cast<double>(v)) / std::log(static_cast<double>(q));
      csv << fmt_double(l);
      r["log_q_count"] = fmt_double(l);
      if (have_prev) {
        csv << ',' << fmt_double(l - prev);
        r["slope_vs_prev"] = fmt_double(l - prev);
      } else {
        csv << ',';
      }
      prev = l;
      have_prev = true;
    } else {
      csv << ",,";
      have_prev = false;
    }
    csv << '\n';
    jr.push_back(r);
  }
  out.csv = csv.str();
  out.json["rows"] = jr;
  try {
    FitReport fr = fit_exponent(q, rows);
    out.json["fit"] = {{"slope", fmt_double(fr.slope)}, {"intercept", fmt_double(fr.intercept)}};
  } catch (const std::invalid_argument&) {
    out.json["fit"] = nullptr;
  }
}

// ---- subcommands -----------------------------------------------------------

struct CountArgs {
  std::string form = "1,1,1,1,1,1", B, method = "mitm";
  bool circ = false, cross_check = false;
};

Outcome run_count(const Globals& g, const CountArgs& a) {
  auto f = make_field(g);
  DiagonalForm F = DiagonalForm::parse(f, a.form);
  Budget budget = make_budget(g);
  CountMethod m = a.method == "exhaustive" ? CountMethod::exhaustive : CountMethod::mitm;
  if (a.method != "mitm" && a.method != "exhaustive") throw std::invalid_argument("method must be mitm or exhaustive");
  Outcome out;
  out.json["field"] = f->spec();
  out.json["form"] = F.str();
  out.json["quantity"] = a.circ ? "N_circ" : "N";
  out.json["method"] = a.method;
  std::vector<std::pair<int, std::uint64_t>> rows;
  for (int B : parse_range(a.B)) {
    std::uint64_t v;
    if (a.circ) {
      CircReport c = count_N_circ(F, B, budget);
      v = c.circ.value;
      if (c.circ.value + c.on_lines != c.total || c.on_lines != c.line_points)
        out.fail("line accounting", {{"B", B}, {"N", c.total}, {"N_circ", c.circ.value}, {"on_lines", c.on_lines},
                                     {"line_points", c.line_points}});
    } else {
      v = count_N(F, B, m, budget).value;
      if (a.cross_check) {
        CountMethod other = m == CountMethod::mitm ? CountMethod::exhaustive : CountMethod::mitm;
        std::uint64_t w = count_N(F, B, other, budget).value;
        if (w != v) out.fail("engine agreement", {{"B", B}, {a.method, v}, {to_string(other), w}});
      }
    }
    rows.push_back({B, v});
  }
  count_table(out, f->q(), rows);
  return out;
}

struct MsumArgs {
  std::string B = "1..6";
  int check_upto = 2;
};

Outcome run_msum(const Globals& g, const MsumArgs& a) {
  auto f = make_field(g);
  Budget budget = make_budget(g);
  Outcome out;
  out.json["field"] = f->spec();
  out.json["quantity"] = "M";
  std::vector<std::pair<int, std::uint64_t>> rows;
  const std::uint64_t q = static_cast<std::uint64_t>(f->q());
  for (int B : parse_range(a.B)) {
    std::uint64_t v = count_M(f.get(), B, CountMethod::mitm, budget).value;
    if (v < ipow_u64(q, 3 * B)) out.fail("M >= q^3B", {{"B", B}, {"M", v}});
    if (B <= a.check_upto) {
      std::uint64_t checked = v + (g.inject == "msum" ? 1 : 0);
      std::uint64_t e = count_M(f.get(), B, CountMethod::exhaustive, budget).value;
      if (checked != e) out.fail("mitm = exhaustive", {{"B", B}, {"mitm", checked}, {"exhaustive", e}});
    }
    rows.push_back({B, v});
  }
  count_table(out, f->q(), rows);
  if (rows.size() >= 2 && rows.back().second > 0 && rows[rows.size() - 2].second > 0) {
    double last = std::log(static_cast<double>(rows.back().second) / static_cast<double>(rows[rows.size() - 2].second)) /
                  std::log(static_cast<double>(q));
    out.json["final_successive_slope"] = fmt_double(last);
    // Soft gate: flagged, never failed.
    out.json["slope_above_3.6"] = last > 3.6;
  }
  return out;
}

struct WaringArgs {
  int n = 7;
  std::string P;
  int Y = -1, K = 6;
  bool weyl = false;
};

Outcome run_waring(const Globals& g, const WaringArgs& a) {
  auto f = make_field(g);
  Poly P = parse_poly(a.P, f.get());
  const int Y = a.Y >= 0 ? a.Y : waring_B(P);
  WaringReport rep = waring_report(f.get(), a.n, P, Y, a.K, make_budget(g));
  Outcome out;
  out.csv = rep.csv();
  out.json["field"] = f->spec();
  out.json["n"] = rep.n;
  out.json["P"] = rep.P;
  out.json["B"] = rep.B;
  out.json["Y"] = rep.Y;
  out.json["K"] = rep.K;
  out.json["in_Jq3"] = rep.in_jq3;
  out.json["R_n"] = rep.R;
  Json series = Json::array();
  for (const auto& r : rep.series)
    series.push_back({{"Y", r.Y}, {"increment", r.increment.str()}, {"partial", r.partial.str()},
                      {"increment_abs", fmt_double(r.increment_abs, 10)}});
  out.json["series"] = series;
  out.json["sigma_inf"] = str(rep.sigma);
  out.json["sigma_inf_next"] = str(rep.sigma_next);
  out.json["prediction"] = fmt_double(rep.prediction);
  out.json["ratio"] = fmt_double(rep.ratio);
  out.json["note"] = kSigmaNote;
  out.notes.push_back(std::string("note: ") + kSigmaNote);
  if (!rep.in_jq3) {
    out.json["status_detail"] = "globally obstructed: P is outside the cube span, no positivity check";
  } else if (a.n >= 7 && rep.R == 0) {
    out.fail("R_n(P) >= 1", {{"P", rep.P}, {"n", rep.n}, {"R_n", rep.R}});
  }
  if (a.weyl) {
    WeylAudit w = weyl_minor_audit(f.get(), rep.B);
    out.json["weyl_audit"] = {{"B", rep.B}, {"reps", w.reps}, {"minor", w.minor}, {"max_abs_sq", str(w.max_abs_sq)},
                              {"delta_fit", std::isinf(w.delta_fit) ? std::string("inf") : fmt_double(w.delta_fit)}};
  }
  return out;
}

struct DeltaArgs {
  int n = 2, degP = 1, Q = -1;
  std::string form, P, method = "product";
  bool partition = true;
};

Outcome run_delta(const Globals& g, const DeltaArgs& a) {
  auto f = make_field(g);
  std::string form = a.form;
  if (form.empty()) {
    for (int i = 0; i < a.n; ++i) form += i ? ",1" : "1";
  }
  DiagonalForm F = DiagonalForm::parse(f, form);
  Poly P = a.P.empty() ? Poly::monomial(f.get(), 1, a.degP) : parse_poly(a.P, f.get());
  DeltaConfig cfg(F, P, Weight::annulus(), a.Q);
  cfg.paranoid = g.paranoid;
  cfg.budget = make_budget(g);
  RhsMethod m = RhsMethod::product;
  if (a.method == "per_c") m = RhsMethod::per_c;
  else if (a.method == "generic") m = RhsMethod::generic;
  else if (a.method != "product") throw std::invalid_argument("method must be product, per_c or generic");
  DeltaReport r = delta_verify(cfg, m);
  Outcome out;
  out.json["field"] = f->spec();
  out.json["form"] = F.str();
  out.json["P"] = format(P);
  out.json["Q"] = cfg.Q;
  out.json["method"] = to_string(m);
  out.json["lhs"] = str(r.lhs);
  out.json["rhs"] = r.rhs.str();
  out.json["equal"] = r.equal;
  out.json["moduli"] = r.moduli;
  out.json["theta_cells"] = r.cells;
  out.json["c_terms"] = r.c_terms;
  if (!r.equal) out.fail("delta identity", {{"P", format(P)}, {"lhs", str(r.lhs)}, {"rhs", r.rhs.str()}});
  std::ostringstream csv;
  csv << "P,Q,lhs,rhs,equal";
  if (a.partition) {
    NEEReport ne = partition_NEE(cfg);
    Json pieces{{"N0", ne.N0.str()}, {"E1", ne.E1.str()}, {"E2", ne.E2.str()}};
    if (ne.split_E2) {
      pieces["E2_ord"] = ne.E2_ord.str();
      pieces["E2_spec"] = ne.E2_spec.str();
    }
    out.json["pieces"] = pieces;
    out.json["dual_zeros"] = ne.dual_zeros;
    out.json["partition_ok"] = ne.ok;
    if (!ne.ok)
      out.fail("N0 + E1 + E2 = N", {{"P", format(P)}, {"lhs", str(ne.lhs)}, {"N0", ne.N0.str()},
                                    {"E1", ne.E1.str()}, {"E2", ne.E2.str()}});
    csv << ",N0,E1,E2";
    csv << '\n' << format(P) << ',' << cfg.Q << ',' << str(r.lhs) << ',' << r.rhs.str() << ',' << r.equal << ','
        << ne.N0.str() << ',' << ne.E1.str() << ',' << ne.E2.str() << '\n';
  } else {
    csv << '\n' << format(P) << ',' << cfg.Q << ',' << str(r.lhs) << ',' << r.rhs.str() << ',' << r.equal << '\n';
  }
  out.csv = csv.str();
  return out;
}

struct DualArgs {
  std::string form = "1,1,1,1", C = "0..1";
};

Outcome run_dual(const Globals& g, const DualArgs& a) {
  auto f = make_field(g);
  DiagonalForm F = DiagonalForm::parse(f, a.form);
  Outcome out;
  out.json["field"] = f->spec();
  out.json["form"] = F.str();
  std::ostringstream csv;
  csv << "C,ordinary,special,total\n";
  Json rows = Json::array();
  for (int C : parse_range(a.C)) {
    DualCount d = dual_count(F, C);
    csv << C << ',' << d.ordinary << ',' << d.special << ',' << d.total << '\n';
    rows.push_back({{"C", C}, {"ordinary", d.ordinary}, {"special", d.special}, {"total", d.total}});
    if (d.ordinary + d.special != d.total)
      out.fail("class split", {{"C", C}, {"ordinary", d.ordinary}, {"special", d.special}, {"total", d.total}});
  }
  out.json["rows"] = rows;
  out.csv = csv.str();
  return out;
}

struct AuditArgs {
  std::string family = "deligne", form = "1,1,1,1";
  int max_deg = 1, max_k = 3, samples = 20;
  std::uint64_t seed = 1;
};

// Closed-form S_r(c) against the direct sum over (O/r)^* x (O/r)^n.
void audit_sr(Outcome& out, const Globals& g, const DiagonalForm& F, const AuditArgs& a) {
  const Field* f = F.field();
  std::mt19937_64 rng(a.seed);
  std::ostringstream csv;
  csv << "r,c,closed,brute\n";
  Json rows = Json::array();
  bool injected = false;
  for (const Poly& r : monic_upto(f, a.max_deg)) {
    const std::uint64_t box = ipow_u64(static_cast<std::uint64_t>(f->q()), std::max(r.deg(), 1));
    for (int s = 0; s < a.samples; ++s) {
      std::vector<Poly> c;
      for (int i = 0; i < F.n(); ++i) c.push_back(Poly::from_index(f, rng() % box));
      CycNum closed = S_r_c(F, r, c);
      if (g.inject == "sr" && !injected) {
        closed += CycNum::rational(f->p(), 1);
        injected = true;
      }
      CycNum brute = S_r_c_brute(F, r, c);
      csv << format(r) << ",\"" << vec_str(c) << "\"," << closed.str() << ',' << brute.str() << '\n';
      rows.push_back({{"r", format(r)}, {"c", vec_str(c)}, {"closed", closed.str()}, {"brute", brute.str()}});
      if (!(closed == brute))
        out.fail("S_r(c) closed form = direct sum",
                 {{"r", format(r)}, {"c", vec_str(c)}, {"closed", closed.str()}, {"brute", brute.str()}});
    }
  }
  out.csv = csv.str();
  out.json["rows"] = rows;
}

Outcome run_audit(const Globals& g, const AuditArgs& a) {
  auto f = make_field(g);
  Outcome out;
  out.json["field"] = f->spec();
  out.json["family"] = a.family;
  if (a.family == "weyl") {
    WeylAudit w = weyl_minor_audit(f.get(), a.max_deg);
    out.json["B"] = a.max_deg;
    out.json["reps"] = w.reps;
    out.json["minor"] = w.minor;
    out.json["max_abs_sq"] = str(w.max_abs_sq);
    out.json["delta_fit"] = std::isinf(w.delta_fit) ? std::string("inf") : fmt_double(w.delta_fit);
    out.csv = "B,reps,minor,max_abs_sq,delta_fit\n" + std::to_string(a.max_deg) + ',' + std::to_string(w.reps) + ',' +
              std::to_string(w.minor) + ',' + str(w.max_abs_sq) + ',' + out.json["delta_fit"].get<std::string>() + '\n';
    return out;
  }
  DiagonalForm F = DiagonalForm::parse(f, a.form);
  out.json["form"] = F.str();
  if (a.family == "sr-closed") {
    audit_sr(out, g, F, a);
    return out;
  }
  auto rows = audit_bounds(a.family, F, a.max_deg, a.max_k, a.samples, a.seed);
  out.csv = audit_csv(rows, f->q(), F.n());
  Json jr = Json::array();
  for (const auto& r : rows)
    jr.push_back({{"family", r.family}, {"r", r.r}, {"c", r.c}, {"abs_sq", str(r.abs_sq)},
                  {"bound_sq", fmt_double(r.bound_sq)}, {"ratio", fmt_double(r.ratio)}});
  out.json["rows"] = jr;
  return out;
}

struct DissectArgs {
  int Q = 2, B = 1;
  std::string alpha;
};

Outcome run_dissect(const Globals& g, const DissectArgs& a) {
  auto f = make_field(g, true);
  auto balls = farey_dissect(f.get(), a.Q);
  Outcome out;
  out.json["field"] = f->spec();
  out.json["Q"] = a.Q;
  std::ostringstream csv;
  csv << "a,r,measure\n";
  mpq_class total = 0;
  Json jb = Json::array();
  for (const Ball& b : balls) {
    total += b.measure();
    csv << format(b.a) << ',' << format(b.r) << ',' << str(b.measure()) << '\n';
    jb.push_back({{"a", format(b.a)}, {"r", format(b.r)}, {"measure", str(b.measure())}});
  }
  out.json["balls"] = jb;
  out.json["total_measure"] = str(total);
  if (total != 1) out.fail("measures sum to 1", {{"Q", a.Q}, {"total", str(total)}});
  if (!a.alpha.empty()) {
    Laurent alpha = parse_laurent(a.alpha, f.get());
    auto k = farey_locate(balls, alpha);
    out.json["alpha"] = format(alpha);
    out.json["ball"] = k ? Json(format(balls[*k])) : Json(nullptr);
    ArcVerdict v = arc_classify(f.get(), ArcConfig::waring(a.B), alpha);
    out.json["arc"] = {{"B", a.B}, {"major", v.major}, {"a", format(v.a)}, {"r", format(v.r)}, {"witness", v.witness()}};
  }
  out.csv = csv.str();
  return out;
}

struct LinesArgs {
  std::string form = "1,1,1,1";
  int B = -1;
};

Outcome run_lines(const Globals& g, const LinesArgs& a) {
  auto f = make_field(g);
  DiagonalForm F = DiagonalForm::parse(f, a.form);
  auto lines = lines_of(F);
  Outcome out;
  out.json["field"] = f->spec();
  out.json["form"] = F.str();
  std::ostringstream csv;
  csv << "line\n";
  Json jl = Json::array();
  for (const auto& l : lines) {
    csv << '"' << l.str() << "\"\n";
    jl.push_back(l.str());
  }
  out.json["lines"] = jl;
  if (a.B >= 0) {
    CircReport c = count_N_circ(F, a.B, make_budget(g));
    out.json["B"] = a.B;
    out.json["N"] = c.total;
    out.json["N_circ"] = c.circ.value;
    out.json["on_lines"] = c.on_lines;
    out.json["line_points"] = c.line_points;
    if (c.circ.value + c.on_lines != c.total || c.on_lines != c.line_points)
      out.fail("N = N_circ + line points", {{"B", a.B}, {"N", c.total}, {"N_circ", c.circ.value},
                                            {"on_lines", c.on_lines}, {"line_points", c.line_points}});
  }
  out.csv = csv.str();
  return out;
}

struct SpecialArgs {
  std::string form = "1,1,1,1", P = "t", r = "1,t,t^2,t^2+t";
  int setup = 0;
};

Outcome run_special(const Globals& g, const SpecialArgs& a) {
  auto f = make_field(g);
  DiagonalForm F = DiagonalForm::parse(f, a.form);
  Poly P = parse_poly(a.P, f.get());
  auto setups = special_param(F);
  Outcome out;
  out.json["field"] = f->spec();
  out.json["form"] = F.str();
  out.json["P"] = format(P);
  out.json["setups"] = setups.size();
  std::ostringstream csv;
  csv << "r,lhs,rhs,cells,cells_ok,ok\n";
  Json rows = Json::array();
  if (setups.empty()) {
    out.json["status_detail"] = "no special setups: both sides are 0";
  } else {
    if (a.setup < 0 || a.setup >= static_cast<int>(setups.size())) throw std::invalid_argument("setup index out of range");
    DeltaConfig cfg(F, P);
    cfg.paranoid = g.paranoid;
    cfg.budget = make_budget(g);
    for (const std::string& rs : split(a.r, ',')) {
      Poly r = parse_poly(rs, f.get());
      SpecialTransformReport rep = special_transform_verify(setups[static_cast<size_t>(a.setup)], cfg, r);
      csv << format(r) << ',' << rep.lhs.str() << ',' << rep.rhs.str() << ',' << rep.cells << ',' << rep.cells_ok << ','
          << rep.ok << '\n';
      rows.push_back({{"r", format(r)}, {"lhs", rep.lhs.str()}, {"rhs", rep.rhs.str()}, {"cells", rep.cells},
                      {"cells_ok", rep.cells_ok}, {"avg_routes_agree", rep.avg_routes_agree}, {"ok", rep.ok}});
      if (!rep.ok)
        out.fail("special transform identity", {{"r", format(r)}, {"setup", rep.setup}, {"lhs", rep.lhs.str()},
                                                {"rhs", rep.rhs.str()}});
    }
  }
  out.json["rows"] = rows;
  out.csv = csv.str();
  return out;
}

// ---- plumbing --------------------------------------------------------------

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// key=value lines become "--key value" arguments placed before the command
// line ones, so the command line wins under the take-last policy.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    kv.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }
  return kv;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw std::invalid_argument("cannot write '" + path + "'");
  o << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact experiments on diagonal cubic forms over F_q[t]", "ffcubes"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FFCUBES_VERSION));

  Globals g;
  app.add_option("--field", g.field, "Field spec, e.g. q=5 or p=2,h=2,mod=g^2+g+1")->capture_default_str();
  app.add_option("--q", g.q, "Shorthand for --field q=Q");
  app.add_option("--budget", g.budget_mib, "Memory budget in MiB")->capture_default_str();
  app.add_option("--max-tuples", g.max_tuples, "Tuple budget for exhaustive enumeration")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")->capture_default_str();
  app.add_option("--csv", g.csv, "Emit CSV, to PATH if given")->expected(0, 1);
  app.add_option("--json", g.json, "Emit JSON (default), to PATH if given")->expected(0, 1);
  app.add_option("--manifest", g.manifest, "Manifest path (default: next to the output file, else stderr)");
  app.add_option("--config", g.config, "key=value file mirroring the long flags; flags override it");
  app.add_flag("--paranoid-depth", g.paranoid, "Re-check every integration depth at +1");
  app.add_option("--inject-fault", g.inject, "Corrupt a checked value (test harness)")
      ->check(CLI::IsMember({"msum", "sr"}));

  std::set<std::string> flags{"paranoid-depth", "circ", "cross-check", "weyl", "no-partition"};

  CountArgs ca;
  auto* count = app.add_subcommand("count", "N(P) = #{|x_i| < q^B : F(x) = 0} over a range of B");
  count->add_option("--form", ca.form, "Comma separated coefficients")->capture_default_str();
  count->add_option("--B", ca.B, "B, lo..hi or a comma list")->required();
  count->add_option("--method", ca.method, "mitm or exhaustive")->capture_default_str();
  count->add_flag("--circ", ca.circ, "Count solutions off the lines (n = 4, characteristic > 3)");
  count->add_flag("--cross-check", ca.cross_check, "Also run the other engine and compare");

  MsumArgs ma;
  auto* msum = app.add_subcommand("msum", "M(P): six-variable equal-sums count");
  msum->add_option("--B", ma.B, "B range")->capture_default_str();
  msum->add_option("--check-upto", ma.check_upto, "Cross-check exhaustively up to this B")->capture_default_str();

  WaringArgs wa;
  auto* waring = app.add_subcommand("waring", "R_n(P) against the singular series prediction");
  waring->add_option("--n", wa.n, "Number of cubes")->capture_default_str();
  waring->add_option("--P", wa.P, "Target polynomial")->required();
  waring->add_option("--Y", wa.Y, "Series truncation (default B)");
  waring->add_option("--K", wa.K, "sigma_inf resolution")->capture_default_str();
  waring->add_flag("--weyl", wa.weyl, "Add the minor-arc Weyl audit at level B");

  DeltaArgs da;
  bool no_partition = false;
  auto* delta = app.add_subcommand("delta-verify", "Both sides of the delta-method identity");
  delta->add_option("--n", da.n, "Variables when --form is omitted (all ones)")->capture_default_str();
  delta->add_option("--form", da.form, "Comma separated coefficients");
  delta->add_option("--degP", da.degP, "P = t^degP unless --P is given")->capture_default_str();
  delta->add_option("--P", da.P, "P");
  delta->add_option("--Q", da.Q, "Q (default: smallest admissible)");
  delta->add_option("--method", da.method, "product, per_c or generic")->capture_default_str();
  delta->add_flag("--no-partition", no_partition, "Skip the N0/E1/E2 split");

  DualArgs dl;
  auto* dual = app.add_subcommand("dual-count", "Zeros of the dual form in deg <= C boxes");
  dual->add_option("--form", dl.form, "Comma separated coefficients")->capture_default_str();
  dual->add_option("--C", dl.C, "C range")->capture_default_str();

  AuditArgs aa;
  auto* audit = app.add_subcommand("audit", "Exponential sum bound audits");
  audit->add_option("--family", aa.family, "hua, prime-power, deligne, trivial, sr-closed or weyl")
      ->check(CLI::IsMember({"hua", "prime-power", "deligne", "trivial", "sr-closed", "weyl"}))
      ->capture_default_str();
  audit->add_option("--form", aa.form, "Comma separated coefficients")->capture_default_str();
  audit->add_option("--max-deg", aa.max_deg, "Largest modulus degree (weyl: B)")->capture_default_str();
  audit->add_option("--max-k", aa.max_k, "Largest prime power exponent")->capture_default_str();
  audit->add_option("--samples", aa.samples, "Sampled c per modulus")->capture_default_str();
  audit->add_option("--seed", aa.seed, "Sampling seed")->capture_default_str();

  DissectArgs xa;
  auto* dissect = app.add_subcommand("dissect", "Farey dissection of T at level Q");
  dissect->add_option("--Q", xa.Q, "Level")->capture_default_str();
  dissect->add_option("--alpha", xa.alpha, "Locate this Laurent series and classify its arc");
  dissect->add_option("--B", xa.B, "Arc level for --alpha")->capture_default_str();

  LinesArgs la;
  auto* lines = app.add_subcommand("lines", "Lines on the n = 4 surface");
  lines->add_option("--form", la.form, "Comma separated coefficients")->capture_default_str();
  lines->add_option("--B", la.B, "Also check N = N_circ + line points at this B");

  SpecialArgs sa;
  auto* special = app.add_subcommand("special-verify", "Special-solution transform identity per modulus");
  special->add_option("--form", sa.form, "Comma separated coefficients")->capture_default_str();
  special->add_option("--P", sa.P, "P")->capture_default_str();
  special->add_option("--r", sa.r, "Comma separated moduli")->capture_default_str();
  special->add_option("--setup", sa.setup, "Setup index")->capture_default_str();

  // Splice config file values in ahead of the command line.
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (!config_path.empty()) {
    std::vector<std::pair<std::string, std::string>> kv;
    try {
      kv = read_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << "ffcubes: " << e.what() << "\n";
      return kExitUsage;
    }
    std::vector<std::string> extra;
    for (const auto& [k, v] : kv) {
      if (flags.count(k)) {
        if (v == "1" || v == "true" || v == "yes" || v == "on") extra.push_back("--" + k);
      } else {
        extra.push_back("--" + k);
        if (!v.empty()) extra.push_back(v);
      }
    }
    auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& s) {
      return app.get_subcommand_no_throw(s) != nullptr;
    });
    if (sub != args.end()) args.insert(sub + 1, extra.begin(), extra.end());
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // Name the offending word when it is not a subcommand.
    for (const auto& s : args) {
      if (s.empty() || s[0] == '-') continue;
      if (!app.get_subcommand_no_throw(s)) {
        std::cerr << "ffcubes: unknown subcommand '" << s << "'\n";
        break;
      }
      break;
    }
    std::cerr << "ffcubes: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  da.partition = !no_partition;

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();

  Outcome out;
  try {
    if (name == "count") out = run_count(g, ca);
    else if (name == "msum") out = run_msum(g, ma);
    else if (name == "waring") out = run_waring(g, wa);
    else if (name == "delta-verify") out = run_delta(g, da);
    else if (name == "dual-count") out = run_dual(g, dl);
    else if (name == "audit") out = run_audit(g, aa);
    else if (name == "dissect") out = run_dissect(g, xa);
    else if (name == "lines") out = run_lines(g, la);
    else out = run_special(g, sa);
  } catch (const BudgetExceeded& e) {
    Json j{{"status", "budget_exceeded"}, {"subcommand", name}, {"message", e.what()}};
    std::cout << j.dump(2) << "\n";
    std::cerr << "ffcubes: budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ffcubes: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "ffcubes: " << e.what() << "\n";
    return kExitUsage;
  }

  // Manifest: resolved options in declaration order.
  Json config;
  for (CLI::App* scope : {&app, chosen}) {
    for (const CLI::Option* o : scope->get_options()) {
      std::string key = o->get_single_name();
      if (key.empty() || key == "help" || key == "version" || key == "config" || key == "manifest") continue;
      if (o->count() > 0) {
        const auto& res = o->results();
        config[key] = res.empty() ? std::string("true") : res.back();
      } else {
        config[key] = o->get_default_str();
      }
    }
  }
  if (g.q > 0) config["field"] = "q=" + std::to_string(g.q);
  Json manifest{{"tool", "ffcubes"},
                {"version", FFCUBES_VERSION},
                {"subcommand", name},
                {"config", config},
                {"field", out.json.contains("field") ? out.json["field"] : Json(nullptr)},
                {"status", out.ok ? "ok" : "check_failed"}};
  if (!config_path.empty()) manifest["config_file"] = config_path;
  if (!out.ok) manifest["witness"] = {{"check", out.check}, {"witness", out.witness}};

  const bool want_csv = app.get_option("--csv")->count() > 0;
  const std::string out_path = want_csv ? g.csv : g.json;
  std::string text;
  if (want_csv) {
    text = out.csv;
  } else {
    Json j{{"subcommand", name}, {"status", out.ok ? "ok" : "check_failed"}};
    for (auto& [k, v] : out.json.items()) j[k] = v;
    if (!out.ok) j["failed_check"] = {{"check", out.check}, {"witness", out.witness}};
    text = j.dump(2) + "\n";
  }
  try {
    if (out_path.empty()) {
      std::cout << text;
    } else {
      write_text(out_path, text);
      manifest["output"] = out_path;
    }
    std::string mpath = !g.manifest.empty() ? g.manifest : out_path.empty() ? "" : out_path + ".manifest.json";
    if (mpath.empty()) std::cerr << "manifest: " << manifest.dump() << "\n";
    else write_text(mpath, manifest.dump(2) + "\n");
  } catch (const std::invalid_argument& e) {
    std::cerr << "ffcubes: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& n : out.notes) std::cerr << n << "\n";

  if (!out.ok) {
    std::cerr << "ffcubes: check failed: " << out.check << "\nwitness: " << out.witness.dump() << "\n";
    return kExitCheck;
  }
  return 0;
}
