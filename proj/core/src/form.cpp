#include "ffcubes/form.hpp"

#include <stdexcept>

namespace ffc {

DiagonalForm::DiagonalForm(FieldPtr field, std::vector<Poly> coeffs) : field_(std::move(field)), F_(std::move(coeffs)) {
  if (!field_) throw std::invalid_argument("form needs a field");
  if (field_->p() == 3) throw std::invalid_argument("characteristic 3 is not supported for cubic forms");
  if (F_.empty()) throw std::invalid_argument("form needs at least one coefficient");
  for (const auto& c : F_)
    if (c.is_zero()) throw std::invalid_argument("form coefficients must be nonzero");
}

DiagonalForm DiagonalForm::parse(FieldPtr field, std::string_view text) {
  std::vector<Poly> F;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    F.push_back(parse_poly(text.substr(start, end - start), field.get()));
    start = end + 1;
  }
  return DiagonalForm(std::move(field), std::move(F));
}

int DiagonalForm::height_log() const {
  int h = 0;
  for (const auto& c : F_) h = std::max(h, c.deg());
  return h;
}

Poly DiagonalForm::disc() const {
  Poly d = Poly::constant(field(), 1);
  for (const auto& c : F_) d = d * c;
  return d;
}

Poly DiagonalForm::eval(const std::vector<Poly>& x) const {
  if (static_cast<int>(x.size()) != n()) throw std::invalid_argument("point has the wrong dimension");
  Poly s(field());
  for (int i = 0; i < n(); ++i) s += F_[i] * x[i] * x[i] * x[i];
  return s;
}

std::string DiagonalForm::str() const {
  std::string s;
  for (int i = 0; i < n(); ++i) {
    if (i) s += ",";
    s += format(F_[i]);
  }
  return s;
}

}  // namespace ffc
