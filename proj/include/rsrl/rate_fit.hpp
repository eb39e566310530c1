#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace rsrl {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t num_points = 0;
};

struct FitWindow {
  double n_min = 0.0;
  double n_max = 1e300;
};

class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMinFitPoints = 5;

/// Ordinary least squares of ln(error) on ln(n) over snapshots with
/// n in [n_min, n_max] and error > 0. Throws FitError with fewer than five
/// usable points.
RateFit fit_loglog(std::span<const std::size_t> steps, std::span<const double> errors, FitWindow window = {});

}  // namespace rsrl
