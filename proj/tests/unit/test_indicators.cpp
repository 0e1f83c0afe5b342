#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/special_functions/erf.hpp>

#include "doctest.h"
#include "rkindex/error.hpp"
#include "rkindex/experiments.hpp"
#include "rkindex/indicators.hpp"

using namespace rkindex;
using namespace rkindex::indicators;
using synth::CitationSeries;
using synth::Origin;

namespace {

// exp of the summed logs of each term, computed independently of the library.
double rk_oracle(const std::vector<std::uint64_t>& r, double offset = 20, double scale = 1000) {
  long double logsum = 0;
  for (auto x : r) logsum += std::log(1.0L / (offset + static_cast<long double>(x)));
  return scale * static_cast<double>(std::exp(logsum / r.size()));
}

// World where `label` owns world ranks [first, last] and "rest" owns the others.
ranks::WorldIndex block_world(std::size_t world, std::size_t first, std::size_t last) {
  CitationSeries unit{"unit", {}, Origin::real}, rest{"rest", {}, Origin::real};
  for (std::size_t r = 1; r <= world; ++r)
    (r >= first && r <= last ? unit : rest).values.push_back(static_cast<double>(world - r + 1));
  return ranks::WorldIndex::build(std::vector<CitationSeries>{unit, rest});
}

}  // namespace

TEST_CASE("Rk of ranks 1..10 is the upper bound 39.47") {
  std::vector<std::uint64_t> best(10);
  std::iota(best.begin(), best.end(), 1);
  const double rk = rk_from_rank1s(best);
  CHECK(std::abs(rk - 39.47) < 0.01);
  CHECK(rk == doctest::Approx(rk_oracle(best)).epsilon(1e-13));
  CHECK(rk == doctest::Approx(rk_upper_bound()).epsilon(1e-15));
}

TEST_CASE("Rk of constant and spaced ranks") {
  CHECK(rk_from_rank1s(std::vector<std::uint64_t>(10, 280)) ==
        doctest::Approx(1000.0 / 300.0).epsilon(1e-14));
  const std::vector<std::uint64_t> spaced{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  CHECK(rk_from_rank1s(spaced) == doctest::Approx(rk_oracle(spaced)).epsilon(1e-13));
  CHECK(std::abs(rk_from_rank1s(spaced) - 14.52) < 0.01);
}

TEST_CASE("Rk parameters") {
  const std::vector<std::uint64_t> r{3, 9, 27};
  CHECK(rk_from_rank1s(r, 0, 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(rk_from_rank1s(r, 5, 100) == doctest::Approx(rk_oracle(r, 5, 100)).epsilon(1e-13));
  CHECK_THROWS_AS(rk_from_rank1s(std::vector<std::uint64_t>{}), Error);
  CHECK_THROWS_AS((RkParams{0, 20, 1000}.validate()), Error);
  CHECK_THROWS_AS((RkParams{10, -1, 1000}.validate()), Error);
  CHECK_THROWS_AS((RkParams{10, 20, 0}.validate()), Error);
}

TEST_CASE("rk_index keeps its inputs and propagates insufficient papers") {
  ranks::TopKRanks top{"u", 3, {{5, 1, 0}, {7, 2, 0}, {9, 3, 0}}};
  const auto r = rk_index(top);
  CHECK(r.label == "u");
  CHECK(r.k == 3);
  CHECK(r.offset == 20);
  CHECK(r.rank1s == std::vector<std::uint64_t>{5, 7, 9});
  CHECK(r.rk == doctest::Approx(rk_oracle({5, 7, 9})).epsilon(1e-13));

  const std::vector<ranks::RankPair> nine(9, ranks::RankPair{1, 1, 0});
  try {
    rk_index(ranks::top_k("u", nine, 10));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_papers);
  }
}

TEST_CASE("empirical P_top") {
  const auto w = block_world(1000, 1, 50);
  const auto p1 = empirical_ptop(w, "unit", 1);
  CHECK(p1.value == 10);
  CHECK(p1.mode == PercentileMode::empirical);
  CHECK(p1.threshold == 991);
  CHECK(empirical_ptop(w, "unit", 100).value == 50);
  CHECK(empirical_ptop(w, "rest", 100).value == 950);
  CHECK(empirical_ptop(block_world(1000, 11, 60), "unit", 1).value == 0);
  CHECK_THROWS_AS(empirical_ptop(w, "nobody", 1), Error);
  CHECK(std::isinf(world_threshold(w, 0.05)));
}

TEST_CASE("paper grid cutoff for 0.1% is rank 280") {
  const auto ens = synth::generate(synth::EnsembleConfig{});
  const auto w = experiments::build_world(ens);
  CHECK(w.cutoff_rank(0.1) == 280);
  double total = 0;
  for (const auto& l : w.labels()) total += empirical_ptop(w, l, 0.1).value;
  CHECK(total == 280);
}

TEST_CASE("lognormal survival") {
  CHECK(lognormal_survival(3.0, 1.1, std::exp(3.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(lognormal_survival(2.0, 0.7, std::exp(2.0 + 0.7 * 1.281552)) - 0.10) < 1e-6);
  CHECK(lognormal_survival(3.0, 1.1, INFINITY) == 0.0);
  CHECK_THROWS_AS(lognormal_survival(3.0, 1.1, 0.0), Error);
  CHECK_THROWS_AS(lognormal_survival(3.0, 1.1, -1.0), Error);
  CHECK_THROWS_AS(lognormal_survival(3.0, 0.0, 1.0), Error);
}

TEST_CASE("normal tail agrees with Boost's erfc to 1e-10") {
  for (double z = -8.0; z <= 8.0; z += 0.0625) {
    const double oracle = 0.5 * boost::math::erfc(-z / std::sqrt(2.0));
    CHECK(std::abs(standard_normal_cdf(z) - oracle) <= 1e-10);
    const double c = std::exp(1.0 + 1.3 * z);
    const double surv = 0.5 * boost::math::erfc(z / std::sqrt(2.0));
    CHECK(std::abs(lognormal_survival(1.0, 1.3, c) - surv) <= 1e-10);
  }
}

TEST_CASE("lognormal survival matches a 1e7-draw Monte Carlo estimate") {
  std::mt19937_64 gen(20240917);
  std::lognormal_distribution<double> dist(3.0, 1.1);
  const int draws = 10'000'000;
  int above = 0;
  for (int i = 0; i < draws; ++i) above += dist(gen) > 100.0;
  const double p_hat = static_cast<double>(above) / draws;
  const double p = lognormal_survival(3.0, 1.1, 100.0);
  const double se = std::sqrt(p * (1 - p) / draws);
  CHECK(std::abs(p_hat - p) < 3 * se);
}

TEST_CASE("analytic P_top in a self-world is close to the nominal count") {
  const synth::LognormalSpec spec{"s", 3.0, 1.1, 100000};
  const auto s = synth::sample_series(spec, 5, 0);
  const auto w = ranks::WorldIndex::build(std::span(&s, 1));
  for (double x : {10.0, 1.0, 0.1}) {
    const auto a = analytic_ptop(spec, w, x);
    const double p = x / 100.0;
    CHECK(a.mode == PercentileMode::analytic);
    CHECK(std::abs(a.value - p * spec.n) < 3 * std::sqrt(spec.n * p * (1 - p)));
    CHECK(a.threshold == w.entries()[w.cutoff_rank(x) - 1].value);
  }
}

TEST_CASE("analytic P_top of a near-degenerate spec is 0 or N") {
  const CitationSeries flat{"flat", std::vector<double>(1000, std::exp(3.0)), Origin::real};
  const auto w = ranks::WorldIndex::build(std::span(&flat, 1));
  CHECK(analytic_ptop({"lo", 2.9, 1e-9, 400}, w, 10).value == 0.0);
  CHECK(analytic_ptop({"hi", 3.1, 1e-9, 400}, w, 10).value == 400.0);
}

TEST_CASE("analytic P_top fails when the cutoff rank is zero") {
  const auto s = synth::sample_series({"s", 3, 1.1, 100}, 1, 0);
  const auto w = ranks::WorldIndex::build(std::span(&s, 1));
  CHECK_THROWS_AS(analytic_ptop({"s", 3, 1.1, 100}, w, 0.5), Error);
  CHECK_NOTHROW(analytic_ptop({"s", 3, 1.1, 100}, w, 1));
}

TEST_CASE("uncited counts") {
  CHECK(count_uncited({"r", {0, 0, 3, 1}, Origin::real}) == 2);
  CHECK(count_uncited({"r", {4, 2, 3, 1}, Origin::real}) == 0);
  CHECK_THROWS_AS(count_uncited({"s", {1.5}, Origin::synthetic}), Error);
}

TEST_CASE("fractional Rk") {
  RkResult r;
  r.rk = 10;
  CHECK(fractional_rk(r, 1.0) == 10);
  CHECK(fractional_rk(r, 0.5) == 5);
  CHECK_THROWS_AS(fractional_rk(r, 0.0), Error);
  CHECK_THROWS_AS(fractional_rk(r, 1.5), Error);
  CHECK_THROWS_AS(fractional_rk(r, -0.1), Error);
}

TEST_CASE("indicator and percentile tables") {
  synth::EnsembleConfig cfg;
  cfg.mu_count = 4;
  cfg.sizes = {50, 5};
  const auto ens = synth::generate(cfg);
  const auto w = experiments::build_world(ens);
  const std::vector<double> xs{10, 1};
  const auto t = indicator_table(w, {}, xs);
  CHECK(t.columns ==
        std::vector<std::string>{"label", "P", "P0", "ptop_10", "ptop_1", "rk"});
  REQUIRE(t.rows.size() == 8);
  CHECK(std::holds_alternative<double>(t.rows[0][5]));
  CHECK(std::holds_alternative<std::monostate>(t.rows[1][5]));  // 5 papers < k
  CHECK(std::holds_alternative<std::monostate>(t.rows[0][2]));  // synthetic: no P0
  CHECK(ptop_column(0.1) == "ptop_0.1");
  CHECK(ptop_column(10) == "ptop_10");

  const auto pt = percentile_table(w, ens.specs, xs);
  CHECK(pt.rows.size() == 8 * 2 * 2);
}
