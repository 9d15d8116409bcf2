#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ffc {

/// An element of F_q, stored as its code a0 + a1*p + ... + a_{h-1}*p^{h-1}
/// where (a0, ..., a_{h-1}) are the coordinates in the basis 1, g, ..., g^{h-1}.
/// Codes order elements lexicographically on coordinates (highest first).
using Elem = std::uint32_t;

struct FieldOptions {
  /// Characteristic 3 is refused unless asked for explicitly. The background
  /// suites (characters, Farey arcs, parabola measures) run over F_3 as well.
  bool allow_char3 = false;
};

/// The finite field F_q, q = p^h, given by an irreducible modulus over F_p.
/// Immutable after construction.
class Field {
 public:
  /// modulus is ascending and monic of degree h; ignored (may be empty) for h = 1.
  static std::shared_ptr<const Field> make(int p, int h, std::vector<int> modulus = {},
                                           FieldOptions opt = {});
  /// `q=<int>` (prime, or a prime power with a bundled default modulus) or
  /// `p=<int>,h=<int>,mod=<poly in g>`.
  static std::shared_ptr<const Field> parse(std::string_view spec, FieldOptions opt = {});
  static std::shared_ptr<const Field> of_order(int q, FieldOptions opt = {});

  int p() const { return p_; }
  int h() const { return h_; }
  int q() const { return q_; }
  const std::vector<int>& modulus() const { return mod_; }
  /// Canonical spec string; parse(spec()) rebuilds an identical field.
  std::string spec() const;

  Elem from_int(long long v) const;
  Elem add(Elem a, Elem b) const { return tabled_ ? add_[a * q_ + b] : slow_add(a, b); }
  Elem mul(Elem a, Elem b) const { return tabled_ ? mul_[a * q_ + b] : slow_mul(a, b); }
  Elem neg(Elem a) const { return neg_[a]; }
  Elem sub(Elem a, Elem b) const { return add(a, neg_[b]); }
  /// Throws std::domain_error on zero.
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t e) const;

  /// Absolute trace to F_p, as a residue in [0, p).
  int trace(Elem a) const { return trace_[a]; }
  std::vector<int> coords(Elem a) const;
  Elem from_coords(std::span<const int> c) const;

  bool is_square(Elem a) const { return sqrt_[a] >= 0; }
  std::optional<Elem> sqrt(Elem a) const;
  /// All y with y^3 = a, ascending by code.
  const std::vector<Elem>& cube_roots(Elem a) const { return cube_roots_[a]; }
  bool is_cube(Elem a) const { return !cube_roots_[a].empty(); }
  /// Smallest non-square by code. Throws in characteristic 2.
  Elem nonsquare() const;

  std::string format(Elem a) const;
  Elem parse_elem(std::string_view text) const;

 private:
  Field() = default;
  void build();
  Elem slow_add(Elem a, Elem b) const;
  Elem slow_mul(Elem a, Elem b) const;

  int p_ = 0, h_ = 0, q_ = 0;
  std::vector<int> mod_;
  bool tabled_ = false;
  std::vector<std::uint16_t> add_, mul_;
  std::vector<Elem> neg_, inv_;
  std::vector<int> trace_;
  std::vector<std::int64_t> sqrt_;
  std::vector<std::vector<Elem>> cube_roots_;
};

using FieldPtr = std::shared_ptr<const Field>;

bool is_prime(long long n);

}  // namespace ffc
