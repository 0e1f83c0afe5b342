#pragma once

// Rk-index, top-percentile indicators and uncited counts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rkindex/rankcore.hpp"
#include "rkindex/synthdist.hpp"
#include "rkindex/table.hpp"

namespace rkindex::indicators {

struct RkParams {
  std::size_t k = 10;
  double offset = 20.0;
  double scale = 1000.0;

  void validate() const;
};

struct RkResult {
  std::string label;
  double rk = 0.0;
  std::size_t k = 0;
  double offset = 0.0;
  double scale = 0.0;
  std::vector<std::uint64_t> rank1s;
};

/// scale * geometric mean of 1/(offset + rank1) over the given ranks.
double rk_from_rank1s(std::span<const std::uint64_t> rank1s, double offset = 20.0,
                      double scale = 1000.0);

RkResult rk_index(const ranks::TopKRanks& top, double offset = 20.0, double scale = 1000.0);

/// Rk when a unit holds world ranks 1..k: scale / geomean(offset+1 .. offset+k).
double rk_upper_bound(std::size_t k = 10, double offset = 20.0, double scale = 1000.0);

enum class PercentileMode { empirical, analytic };

std::string_view to_string(PercentileMode mode) noexcept;

struct PercentileResult {
  std::string label;
  double x = 0.0;
  PercentileMode mode = PercentileMode::empirical;
  double value = 0.0;
  double threshold = 0.0;
};

/// Citation value of the world entry at the top-x% cutoff rank;
/// +inf when the cutoff rank is 0.
double world_threshold(const ranks::WorldIndex& world, double x_percent);

/// Counts owned papers with Rank 1 <= cutoff among the given world positions.
std::size_t count_in_top(const ranks::WorldIndex& world, std::span<const std::size_t> positions,
                         double x_percent);

PercentileResult empirical_ptop(const ranks::WorldIndex& world, std::string_view label,
                                double x_percent);

double standard_normal_cdf(double z);

/// P(C > c) for C ~ lognormal(mu, sigma).
double lognormal_survival(double mu, double sigma, double c);

/// N * P(C > threshold), the non-integer top-x% count expected from the
/// series' own distribution at the world threshold.
PercentileResult analytic_ptop(const synth::LognormalSpec& spec, const ranks::WorldIndex& world,
                               double x_percent);

std::size_t count_uncited(const synth::CitationSeries& series);

/// rk * local_share; experimental collaborative correction, share in (0, 1].
double fractional_rk(const RkResult& rk, double local_share);

inline const std::vector<double>& default_percentiles() {
  static const std::vector<double> xs{10.0, 1.0, 0.5, 0.1, 0.01};
  return xs;
}

/// Column name for a percentile, e.g. 0.1 -> "ptop_0.1".
std::string ptop_column(double x_percent);

/// label,P,P0,ptop_<x>...,rk for every unit of a synthetic world. Empirical
/// percentile counts; P0 is empty for synthetic series. Units with fewer than
/// k papers get an empty rk cell.
Table indicator_table(const ranks::WorldIndex& world, const RkParams& params,
                      std::span<const double> xs);

/// label,x,mode,value,threshold with one empirical and (when `specs` is
/// given) one analytic row per unit and x.
Table percentile_table(const ranks::WorldIndex& world, std::span<const synth::LognormalSpec> specs,
                       std::span<const double> xs);

}  // namespace rkindex::indicators
