#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ffcubes/field.hpp"
#include "ffcubes/poly.hpp"

namespace ffc {

/// F(x) = sum_i F_i x_i^3 with every F_i nonzero. Characteristic 3 is rejected.
class DiagonalForm {
 public:
  DiagonalForm(FieldPtr field, std::vector<Poly> coeffs);
  /// Comma separated coefficients, e.g. "1,1,t,2*t+1".
  static DiagonalForm parse(FieldPtr field, std::string_view text);

  const Field* field() const { return field_.get(); }
  const FieldPtr& field_ptr() const { return field_; }
  int n() const { return static_cast<int>(F_.size()); }
  const std::vector<Poly>& coeffs() const { return F_; }
  const Poly& operator[](int i) const { return F_[static_cast<size_t>(i)]; }
  /// log_q H_F = max deg F_i.
  int height_log() const;
  /// prod F_i, used wherever the bad primes of F must be excluded.
  Poly disc() const;
  Poly eval(const std::vector<Poly>& x) const;
  std::string str() const;

 private:
  FieldPtr field_;
  std::vector<Poly> F_;
};

}  // namespace ffc
