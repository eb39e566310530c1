#include "rsrl/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace rsrl {

RateFit fit_loglog(std::span<const std::size_t> steps, std::span<const double> errors, FitWindow window) {
  if (steps.size() != errors.size()) throw std::invalid_argument("fit_loglog: steps and errors differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto n = static_cast<double>(steps[i]);
    if (n < window.n_min || n > window.n_max || !(errors[i] > 0.0) || steps[i] == 0) continue;
    lx.push_back(std::log(n));
    ly.push_back(std::log(errors[i]));
  }
  if (lx.size() < kMinFitPoints)
    throw FitError("fit_loglog: need at least " + std::to_string(kMinFitPoints) + " positive points in the window, got " +
                   std::to_string(lx.size()));

  const auto m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_loglog: all snapshots share one n");

  RateFit fit;
  fit.num_points = lx.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // a perfectly flat series is fit exactly
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace rsrl
