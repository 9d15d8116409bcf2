#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ffc {

struct FitReport {
  std::vector<int> B;                // parameters kept (nonzero counts)
  std::vector<double> successive;    // log_q(N_{B+1} / N_B) per consecutive pair
  double slope = 0;                  // least-squares slope of log_q N against B
  double intercept = 0;
};
/// Growth exponent of counts N_B ~ c q^{e B}. Zero counts are dropped;
/// throws std::invalid_argument with fewer than two points left.
FitReport fit_exponent(int q, const std::vector<std::pair<int, std::uint64_t>>& series);

}  // namespace ffc
