#include "rkindex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "rkindex/error.hpp"

namespace rkindex::stats {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  require(x.size() == y.size(), "regression inputs differ in length");
  require(x.size() >= min_n, "too few points for regression");
}

double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted) {
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - fitted).squaredNorm();
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 2);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[static_cast<std::size_t>(i)];
    target(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
  return {beta(0), beta(1), r_squared(target, design * beta), x.size()};
}

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 4);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = xi;
    design(i, 2) = xi * xi;
    target(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd fitted = design * beta;
  const double dof = static_cast<double>(n - 3);
  const double sigma2 = (target - fitted).squaredNorm() / dof;
  const Eigen::MatrixXd cov = sigma2 * (design.transpose() * design).inverse();

  QuadraticFit fit;
  fit.coef = {beta(0), beta(1), beta(2)};
  fit.r2 = r_squared(target, fitted);
  fit.n = x.size();
  const double se = std::sqrt(cov(2, 2));
  if (se > 0.0 && std::isfinite(se)) {
    fit.t_quadratic = beta(2) / se;
    boost::math::students_t dist(dof);
    fit.p_quadratic = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(fit.t_quadratic)));
  } else {
    fit.t_quadratic = beta(2) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    fit.p_quadratic = beta(2) == 0.0 ? 1.0 : 0.0;
  }
  return fit;
}

double slope_through_origin(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 1);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  require(sxx > 0.0, "slope through origin needs a non-zero x");
  return sxy / sxx;
}

double median(std::vector<double> xs) {
  require(!xs.empty(), "median of an empty list");
  const auto mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double spread(std::span<const double> xs) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  require(*lo > 0.0, "spread needs strictly positive values");
  return *hi / *lo;
}

}  // namespace rkindex::stats
