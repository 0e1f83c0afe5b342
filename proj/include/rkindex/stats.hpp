#pragma once

// Small regression helpers used by the experiment reports.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rkindex::stats {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = a + b x.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

struct QuadraticFit {
  std::array<double, 3> coef{};  // a + b x + c x^2
  double t_quadratic = 0.0;      // t statistic of c
  double p_quadratic = 1.0;      // two-sided p-value of c, n - 3 dof
  double r2 = 0.0;
  std::size_t n = 0;
};

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of y = b x.
double slope_through_origin(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> xs);

/// max/min of strictly positive values; NaN with fewer than two values.
double spread(std::span<const double> xs);

}  // namespace rkindex::stats
