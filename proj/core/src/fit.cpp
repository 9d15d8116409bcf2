#include "ffcubes/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ffc {

FitReport fit_exponent(int q, const std::vector<std::pair<int, std::uint64_t>>& series) {
  if (q < 2) throw std::invalid_argument("fit_exponent needs q >= 2");
  std::vector<std::pair<int, double>> pts;
  for (const auto& [b, n] : series)
    if (n > 0) pts.emplace_back(b, std::log(static_cast<double>(n)) / std::log(static_cast<double>(q)));
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 2) throw std::invalid_argument("fit_exponent needs at least two nonzero counts");
  FitReport r;
  for (const auto& pt : pts) r.B.push_back(pt.first);
  for (size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].first == pts[i - 1].first) throw std::invalid_argument("repeated parameter in series");
    r.successive.push_back((pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first));
  }
  double mx = 0, my = 0;
  for (const auto& [b, y] : pts) {
    mx += b;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0;
  for (const auto& [b, y] : pts) {
    sxy += (b - mx) * (y - my);
    sxx += (b - mx) * (b - mx);
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  return r;
}

}  // namespace ffc
