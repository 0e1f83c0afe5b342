#include "rkindex/indicators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rkindex/error.hpp"

namespace rkindex::indicators {

void RkParams::validate() const {
  require(k >= 1, "k must be >= 1");
  require(std::isfinite(offset) && offset >= 0.0, "offset must be finite and >= 0");
  require(std::isfinite(scale) && scale > 0.0, "scale must be finite and > 0");
}

double rk_from_rank1s(std::span<const std::uint64_t> rank1s, double offset, double scale) {
  require(!rank1s.empty(), "Rk-index needs at least one rank");
  require(std::isfinite(offset) && offset >= 0.0, "offset must be finite and >= 0");
  require(std::isfinite(scale) && scale > 0.0, "scale must be finite and > 0");
  std::vector<double> inverses;
  inverses.reserve(rank1s.size());
  for (auto r : rank1s) {
    require(r >= 1, "ranks are 1-based");
    inverses.push_back(1.0 / (offset + static_cast<double>(r)));
  }
  return scale * ranks::geometric_mean(inverses);
}

RkResult rk_index(const ranks::TopKRanks& top, double offset, double scale) {
  require(top.pairs.size() == top.k, "top-k rank set is incomplete");
  RkResult out{top.label, 0.0, top.k, offset, scale, top.rank1s()};
  out.rk = rk_from_rank1s(out.rank1s, offset, scale);
  return out;
}

double rk_upper_bound(std::size_t k, double offset, double scale) {
  std::vector<std::uint64_t> best(k);
  for (std::size_t i = 0; i < k; ++i) best[i] = i + 1;
  return rk_from_rank1s(best, offset, scale);
}

std::string_view to_string(PercentileMode mode) noexcept {
  return mode == PercentileMode::empirical ? "empirical" : "analytic";
}

double world_threshold(const ranks::WorldIndex& world, double x_percent) {
  const auto cut = world.cutoff_rank(x_percent);
  if (cut == 0) return std::numeric_limits<double>::infinity();
  return world.entries()[cut - 1].value;
}

std::size_t count_in_top(const ranks::WorldIndex& world, std::span<const std::size_t> positions,
                         double x_percent) {
  const auto cut = world.cutoff_rank(x_percent);
  std::size_t count = 0;
  for (auto pos : positions)
    if (world.rank1_at(pos) <= cut) ++count;
  return count;
}

PercentileResult empirical_ptop(const ranks::WorldIndex& world, std::string_view label,
                                double x_percent) {
  const auto positions = world.positions_of(label);
  return {std::string(label), x_percent, PercentileMode::empirical,
          static_cast<double>(count_in_top(world, positions, x_percent)),
          world_threshold(world, x_percent)};
}

double standard_normal_cdf(double z) {
  // erfc keeps full relative accuracy deep in the upper tail, where
  // 1 - 0.5*erfc(-z/sqrt2) would cancel.
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double lognormal_survival(double mu, double sigma, double c) {
  require(c > 0.0, "citation value must be > 0");
  require(sigma > 0.0 && std::isfinite(sigma), "sigma must be > 0");
  if (std::isinf(c)) return 0.0;
  const double z = (std::log(c) - mu) / sigma;
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

PercentileResult analytic_ptop(const synth::LognormalSpec& spec, const ranks::WorldIndex& world,
                               double x_percent) {
  spec.validate();
  require(world.size() > 0, "world is empty");
  const auto cut = world.cutoff_rank(x_percent);
  if (cut == 0)
    fail(Errc::invalid_argument, "top " + format_double(x_percent) + "% of a " +
                                     std::to_string(world.size()) + "-paper world is empty");
  const double threshold = world.entries()[cut - 1].value;
  const double p = lognormal_survival(spec.mu, spec.sigma, threshold);
  return {spec.label, x_percent, PercentileMode::analytic, static_cast<double>(spec.n) * p, threshold};
}

std::size_t count_uncited(const synth::CitationSeries& series) {
  if (series.origin != synth::Origin::real)
    fail(Errc::invalid_argument,
         "uncited count is undefined for synthetic series '" + series.label + "'");
  std::size_t zeros = 0;
  for (double v : series.values)
    if (v == 0.0) ++zeros;
  return zeros;
}

double fractional_rk(const RkResult& rk, double local_share) {
  require(local_share > 0.0 && local_share <= 1.0, "local share must lie in (0, 1]");
  return rk.rk * local_share;
}

std::string ptop_column(double x_percent) { return "ptop_" + format_double(x_percent); }

Table indicator_table(const ranks::WorldIndex& world, const RkParams& params,
                      std::span<const double> xs) {
  params.validate();
  Table t;
  t.name = "indicators";
  t.columns = {"label", "P", "P0"};
  for (double x : xs) t.columns.push_back(ptop_column(x));
  t.columns.push_back("rk");
  t.meta["k"] = params.k;
  t.meta["offset"] = params.offset;
  t.meta["scale"] = params.scale;
  t.meta["tie_policy"] = std::string(ranks::to_string(world.tie_policy()));
  t.meta["world_size"] = world.size();

  for (std::uint32_t o = 0; o < world.labels().size(); ++o) {
    const auto positions = world.positions_of(o);
    std::vector<Cell> row{world.labels()[o], static_cast<std::int64_t>(positions.size()),
                          std::monostate{}};
    for (double x : xs)
      row.emplace_back(static_cast<std::int64_t>(count_in_top(world, positions, x)));
    if (positions.size() >= params.k) {
      const auto pairs = ranks::rank_pairs_at(world, positions);
      const auto top = ranks::top_k(world.labels()[o], pairs, params.k);
      row.emplace_back(rk_index(top, params.offset, params.scale).rk);
    } else {
      row.emplace_back(std::monostate{});
    }
    t.add_row(std::move(row));
  }
  return t;
}

Table percentile_table(const ranks::WorldIndex& world, std::span<const synth::LognormalSpec> specs,
                       std::span<const double> xs) {
  Table t;
  t.name = "ptop";
  t.columns = {"label", "x", "mode", "value", "threshold"};
  t.meta["tie_policy"] = std::string(ranks::to_string(world.tie_policy()));
  t.meta["world_size"] = world.size();
  for (std::uint32_t o = 0; o < world.labels().size(); ++o) {
    const auto& label = world.labels()[o];
    const synth::LognormalSpec* spec = nullptr;
    for (const auto& s : specs)
      if (s.label == label) spec = &s;
    for (double x : xs) {
      const auto e = empirical_ptop(world, label, x);
      t.add_row({label, x, std::string(to_string(e.mode)), e.value, e.threshold});
      if (spec && world.cutoff_rank(x) > 0) {
        const auto a = analytic_ptop(*spec, world, x);
        t.add_row({label, x, std::string(to_string(a.mode)), a.value, a.threshold});
      }
    }
  }
  return t;
}

}  // namespace rkindex::indicators
