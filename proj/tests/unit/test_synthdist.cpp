#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "doctest.h"
#include "rkindex/error.hpp"
#include "rkindex/synthdist.hpp"

using namespace rkindex;
using namespace rkindex::synth;

namespace {

EnsembleConfig grid(double a, double b, std::size_t count, std::vector<std::size_t> sizes) {
  EnsembleConfig c;
  c.mu_start = a;
  c.mu_end = b;
  c.mu_count = count;
  c.sizes = std::move(sizes);
  return c;
}

// Two-sided KS statistic of xs against Normal(mu, sigma), with Boost's CDF as
// the reference.
double ks_statistic(std::vector<double> xs, double mu, double sigma) {
  std::sort(xs.begin(), xs.end());
  const boost::math::normal_distribution<double> dist(mu, sigma);
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = boost::math::cdf(dist, xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST_CASE("paper grid has 600 series and 280,000 papers") {
  const EnsembleConfig cfg;
  const auto specs = build_grid(cfg);
  CHECK(specs.size() == 600);
  std::size_t total = 0;
  for (const auto& s : specs) total += s.n;
  CHECK(total == 280000);
  CHECK(cfg.total_papers() == 280000);
  CHECK(specs.front().label == "aa");
  CHECK(specs.back().label == "xb");
  CHECK(specs.front().mu == 4.0);
  CHECK(specs.back().mu == 2.0);
  CHECK(specs[0].n == 800);
  CHECK(specs[1].n == 400);
  CHECK(specs[2].n == 200);
  CHECK(specs[3].mu == doctest::Approx(4.0 - 2.0 / 199).epsilon(1e-14));
}

TEST_CASE("degenerate and three-point grids") {
  const auto one = build_grid(grid(3.0, 3.0, 1, {100}));
  REQUIRE(one.size() == 1);
  CHECK(one[0].mu == 3.0);
  CHECK(one[0].n == 100);

  const auto three = build_grid(grid(4.0, 2.0, 3, {10}));
  REQUIRE(three.size() == 3);
  CHECK(three[0].mu == 4.0);
  CHECK(three[1].mu == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(three[2].mu == 2.0);
}

TEST_CASE("single-point grid with distinct endpoints is rejected") {
  CHECK_THROWS_AS(build_grid(grid(4.0, 2.0, 1, {10})), Error);
  CHECK_THROWS_AS(build_grid(grid(4.0, 2.0, 0, {10})), Error);
  CHECK_THROWS_AS(build_grid(grid(4.0, 2.0, 3, {})), Error);
  CHECK_THROWS_AS(build_grid(grid(4.0, 2.0, 3, {10, 0})), Error);
}

TEST_CASE("labels continue past two letters") {
  CHECK(grid_label(0) == "aa");
  CHECK(grid_label(1) == "ab");
  CHECK(grid_label(26) == "ba");
  CHECK(grid_label(599) == "xb");
  CHECK(grid_label(675) == "zz");
  CHECK(grid_label(676) == "aaa");
  CHECK(grid_label(677) == "aab");
}

TEST_CASE("sample mean of log values is within three standard errors") {
  const LognormalSpec spec{"s", 3.0, 1.1, 10000};
  for (std::uint64_t seed : {0ull, 1ull, 99ull, 123456789ull}) {
    const auto s = sample_series(spec, seed, 0);
    REQUIRE(s.size() == 10000);
    double sum = 0.0;
    for (double v : s.values) {
      REQUIRE(v > 0.0);
      sum += std::log(v);
    }
    CHECK(std::abs(sum / 1e4 - 3.0) < 3.0 * 1.1 / 100.0);
  }
}

TEST_CASE("vanishing sigma gives values near exp(mu)") {
  const auto s = sample_series({"s", 0.0, 1e-12, 5}, 7, 3);
  REQUIRE(s.size() == 5);
  for (double v : s.values) CHECK(std::abs(v - 1.0) < 1e-9);
}

TEST_CASE("sampling is reproducible and stream-dependent") {
  const LognormalSpec spec{"s", 2.5, 1.1, 1000};
  const auto a = sample_series(spec, 42, 5);
  const auto b = sample_series(spec, 42, 5);
  REQUIRE(a.values.size() == b.values.size());
  CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
  CHECK(sample_series(spec, 42, 6).values != a.values);
  CHECK(sample_series(spec, 43, 5).values != a.values);
  CHECK(stream_key(1, 2) != stream_key(2, 1));
}

TEST_CASE("KS statistic of log values passes at 1% in at least 95% of seeds") {
  const std::size_t n = 10000;
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));
  const int seeds = 40;
  int pass = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    auto s = sample_series({"s", 3.0, 1.1, n}, static_cast<std::uint64_t>(seed), 11);
    for (double& v : s.values) v = std::log(v);
    if (ks_statistic(s.values, 3.0, 1.1) < critical) ++pass;
  }
  CHECK(pass >= 0.95 * seeds);
}

TEST_CASE("combine_series concatenates") {
  const auto a = sample_series({"a", 3, 1.1, 800}, 1, 0);
  const auto b = sample_series({"b", 3, 1.1, 800}, 1, 1);
  const auto c = sample_series({"c", 3, 1.1, 400}, 1, 2);
  const std::vector<CitationSeries> parts{a, b, c};
  const auto u = combine_series(parts, "u");
  CHECK(u.size() == 2000);
  CHECK(u.label == "u");
  CHECK(u.values[800] == b.values[0]);

  const auto same = combine_series(std::span(&a, 1), "renamed");
  CHECK(same.values == a.values);
  CHECK(same.label == "renamed");

  CHECK_THROWS_AS(combine_series({}, "x"), Error);
  CitationSeries real{"r", {1.0}, Origin::real};
  const std::vector<CitationSeries> mixed{a, real};
  CHECK_THROWS_AS(combine_series(mixed, "x"), Error);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS((LognormalSpec{"", 1, 1, 1}.validate()), Error);
  CHECK_THROWS_AS((LognormalSpec{"a", 1, 0, 1}.validate()), Error);
  CHECK_THROWS_AS((LognormalSpec{"a", 1, 1, 0}.validate()), Error);
  CHECK_NOTHROW((LognormalSpec{"a", 1, 1, 1}.validate()));
}

TEST_CASE("generate is independent of the worker count") {
  auto cfg = grid(4.0, 2.0, 20, {80, 40, 20});
  cfg.seed = 9;
  const auto one = generate(cfg, 1);
  const auto four = generate(cfg, 4);
  REQUIRE(one.series.size() == 60);
  for (std::size_t i = 0; i < one.series.size(); ++i) {
    CHECK(one.series[i].values == four.series[i].values);
    CHECK(one.series[i].values == sample_series(one.specs[i], 9, i).values);
  }
  CHECK(one.total_papers() == cfg.total_papers());
  CHECK(one.index_of("ab") == 1);
  CHECK(one.spec("ac").n == 20);
  CHECK_THROWS_AS(one.index_of("zz"), Error);
}

TEST_CASE("config text round-trips and rejects bad input") {
  const auto cfg = parse_config(
      "# grid\nmu_start = 4.0\nmu_end=2.0\nmu_count=200\nsizes=800,400,200\nseed=42\n");
  CHECK(cfg.mu_count == 200);
  CHECK(cfg.sizes == std::vector<std::size_t>{800, 400, 200});
  CHECK(cfg.seed == 42);
  CHECK(cfg.sigma == 1.1);
  const auto again = parse_config(cfg.canonical());
  CHECK(again.canonical() == cfg.canonical());
  CHECK(again.hash() == cfg.hash());

  auto other = cfg;
  other.seed = 43;
  CHECK(other.hash() != cfg.hash());

  CHECK_THROWS_AS(parse_config("bogus=1\n"), Error);
  CHECK_THROWS_AS(parse_config("seed=1\nseed=2\n"), Error);
  CHECK_THROWS_AS(parse_config("mu_count=abc\n"), Error);
  CHECK_THROWS_AS(parse_config("mu_count=1\nmu_start=4\nmu_end=2\n"), Error);
  CHECK_THROWS_AS(parse_config("sizes=\n"), Error);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), Error);
  try {
    parse_config("bogus=1\n");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
  }
}

TEST_CASE("config files load; missing files are i/o errors") {
  const auto cfg = load_config(RK_FIXTURES "/paper_grid.cfg");
  CHECK(cfg.total_papers() == 280000);
  try {
    load_config(RK_FIXTURES "/does_not_exist.cfg");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io_error);
  }
}

TEST_CASE("series and values tables") {
  auto cfg = grid(3.0, 2.0, 2, {3});
  const auto ens = generate(cfg);
  const auto st = series_table(ens);
  CHECK(st.columns == std::vector<std::string>{"label", "mu", "sigma", "n"});
  CHECK(st.rows.size() == 2);
  const auto vt = values_table(ens);
  CHECK(vt.columns == std::vector<std::string>{"label", "value"});
  CHECK(vt.rows.size() == 6);
}
