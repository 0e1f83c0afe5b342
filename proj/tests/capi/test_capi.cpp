// Exercises the shared library through its C header only.

#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "rkindex/rkindex.h"

namespace {

const std::string kFix = RK_FIXTURES;

rk_config* small_config() {
  rk_config* cfg = nullptr;
  REQUIRE(rk_config_parse("mu_start=4\nmu_end=2\nmu_count=40\nsizes=80,40,20\nseed=3\n", &cfg) == RK_OK);
  return cfg;
}

}  // namespace

TEST_CASE("primitives") {
  double out = 0;
  const double xs[] = {2, 8};
  CHECK(rk_geometric_mean(xs, 2, &out) == RK_OK);
  CHECK(out == doctest::Approx(4.0));
  const uint64_t best[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(rk_rk_index(best, 10, 20, 1000, &out) == RK_OK);
  CHECK(std::abs(out - 39.47) < 0.01);
  CHECK(rk_lognormal_survival(3, 1.1, std::exp(3.0), &out) == RK_OK);
  CHECK(out == doctest::Approx(0.5));

  const double bad[] = {1, -1};
  CHECK(rk_geometric_mean(bad, 2, &out) == RK_E_INVALID_ARGUMENT);
  CHECK(std::strlen(rk_last_error()) > 0);
  CHECK(rk_geometric_mean(xs, 2, nullptr) == RK_E_INVALID_ARGUMENT);
  CHECK(rk_lognormal_survival(3, 1.1, 0, &out) == RK_E_INVALID_ARGUMENT);
  CHECK(rk_geometric_mean(xs, 2, &out) == RK_OK);
  CHECK(std::string(rk_last_error()).empty());
  CHECK(std::string(rk_status_string(RK_E_PARSE)) == "parse error");
  CHECK(std::string(rk_version()).size() > 0);

  rk_tie_policy tie;
  CHECK(rk_parse_tie_policy("min", &tie) == RK_OK);
  CHECK(tie == RK_TIE_MIN_RANK);
  CHECK(rk_parse_tie_policy("dense", &tie) == RK_E_INVALID_ARGUMENT);
}

TEST_CASE("config handles") {
  rk_config* cfg = nullptr;
  REQUIRE(rk_config_create(&cfg) == RK_OK);
  CHECK(rk_config_total_papers(cfg) == 280000);
  const std::string h0 = rk_config_hash(cfg);
  CHECK(h0.size() == 16);
  CHECK(rk_config_set_seed(cfg, 5) == RK_OK);
  CHECK(rk_config_seed(cfg) == 5);
  CHECK(std::string(rk_config_hash(cfg)) != h0);
  rk_config_free(cfg);

  rk_config* loaded = nullptr;
  CHECK(rk_config_load((kFix + "/paper_grid.cfg").c_str(), &loaded) == RK_OK);
  CHECK(std::string(rk_config_hash(loaded)) == h0);
  rk_config_free(loaded);

  rk_config* bad = nullptr;
  CHECK(rk_config_load((kFix + "/nope.cfg").c_str(), &bad) == RK_E_IO);
  CHECK(rk_config_parse("mu_count=x\n", &bad) == RK_E_PARSE);
  CHECK(bad == nullptr);
  rk_config_free(nullptr);
}

TEST_CASE("ensemble reports") {
  rk_config* cfg = small_config();
  rk_ensemble* ens = nullptr;
  REQUIRE(rk_ensemble_generate(cfg, 2, RK_TIE_ORDINAL, &ens) == RK_OK);
  CHECK(rk_ensemble_series_count(ens) == 120);
  CHECK(rk_ensemble_world_size(ens) == 5600);

  rk_report* r = nullptr;
  REQUIRE(rk_report_series(ens, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 120);
  CHECK(std::string(rk_report_name(r)).rfind("gen_", 0) == 0);
  CHECK(std::string(rk_report_meta(r, "seed")) == "3");
  CHECK(rk_report_meta(r, "nope") == nullptr);
  rk_report_free(r);

  const char* labels[] = {"aa", "ab"};
  rk_indicator_params p;
  rk_indicator_params_default(&p);
  CHECK(p.k == 10);
  REQUIRE(rk_report_ranks(ens, labels, 2, &p, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 20);
  const std::string csv = rk_report_render(r, RK_FORMAT_CSV, 0);
  CHECK(csv.rfind("label,rank2,rank1,value\naa,1,", 0) == 0);
  const std::string json = rk_report_render(r, RK_FORMAT_JSON, 0);
  CHECK(json.find("\"config_hash\"") != std::string::npos);
  CHECK(std::string(rk_report_sidecar(r)).find("\"row_count\": 20") != std::string::npos);
  rk_report_free(r);

  const char* unknown[] = {"zz"};
  CHECK(rk_report_ranks(ens, unknown, 1, &p, &r) == RK_E_UNKNOWN_LABEL);

  REQUIRE(rk_report_indicators(ens, &p, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 120);
  rk_report_free(r);

  const double xs[] = {10, 0.1};
  p.xs = xs;
  p.n_xs = 2;
  REQUIRE(rk_report_ptop(ens, &p, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 120 * 2 * 2);
  rk_report_free(r);

  rk_experiment_options opts;
  rk_experiment_options_default(&opts);
  REQUIRE(rk_run_experiment("fig1", ens, nullptr, &opts, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 99);
  rk_report_free(r);
  CHECK(rk_run_experiment("fig9", ens, nullptr, nullptr, &r) == RK_E_INVALID_ARGUMENT);

  p.k = 0;
  CHECK(rk_report_indicators(ens, &p, &r) == RK_E_INVALID_ARGUMENT);
  rk_ensemble_free(ens);
  rk_config_free(cfg);
}

TEST_CASE("corpus reports") {
  rk_corpus* c = nullptr;
  REQUIRE(rk_corpus_load((kFix + "/bad_rows.csv").c_str(), nullptr, &c) == RK_OK);
  CHECK(rk_corpus_size(c) == 3);
  CHECK(rk_corpus_error_count(c) == 7);
  size_t line = 0;
  CHECK(rk_corpus_diagnostic(c, 0, &line) != nullptr);
  CHECK(line > 1);
  CHECK(rk_corpus_diagnostic(c, 99, &line) == nullptr);
  rk_corpus_free(c);

  REQUIRE(rk_corpus_load((kFix + "/usa_table3.csv").c_str(),
                         (kFix + "/usa_table3.meta.json").c_str(), &c) == RK_OK);
  const char* codes[4] = {};
  CHECK(rk_corpus_countries(c, codes, 4) == 3);
  CHECK(std::string(codes[0]) == "CHN");

  const char* usa[] = {"USA"};
  rk_report* r = nullptr;
  REQUIRE(rk_report_assess(c, usa, 1, RK_SPLIT_DOMESTIC, 0, RK_TIE_ORDINAL, nullptr, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 1);
  const std::string csv = rk_report_render(r, RK_FORMAT_CSV, 0);
  CHECK(csv.find("USA,domestic,5505,237,") != std::string::npos);
  rk_report_free(r);

  REQUIRE(rk_report_assess(c, nullptr, 0, RK_SPLIT_BOTH, 1, RK_TIE_ORDINAL, nullptr, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 3);
  rk_report_free(r);

  const char* nobody[] = {"FRA"};
  CHECK(rk_report_assess(c, nobody, 1, RK_SPLIT_BOTH, 1, RK_TIE_ORDINAL, nullptr, &r) ==
        RK_E_UNKNOWN_LABEL);
  REQUIRE(rk_report_corpus_ranks(c, "KOR", RK_SPLIT_DOMESTIC, RK_TIE_MIN_RANK, nullptr, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 10);
  rk_report_free(r);
  CHECK(rk_report_corpus_ranks(c, "KOR", RK_SPLIT_COLLABORATIVE, RK_TIE_ORDINAL, nullptr, &r) ==
        RK_E_INSUFFICIENT_PAPERS);  // no collaborative KOR papers
  REQUIRE(rk_report_corpus_indicators(c, usa, 1, RK_SPLIT_BOTH, RK_TIE_ORDINAL, nullptr, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 2);
  rk_report_free(r);
  rk_corpus_free(c);

  rk_corpus* w[3] = {};
  for (int i = 0; i < 3; ++i) {
    const std::string base = kFix + "/window" + std::to_string(i + 1);
    REQUIRE(rk_corpus_load((base + ".csv").c_str(), (base + ".meta.json").c_str(), &w[i]) == RK_OK);
  }
  REQUIRE(rk_report_assess_temporal(w, 3, nullptr, 0, RK_TIE_ORDINAL, nullptr, &r) == RK_OK);
  CHECK(rk_report_row_count(r) == 4);
  rk_report_free(r);
  for (auto* h : w) rk_corpus_free(h);

  CHECK(rk_corpus_load((kFix + "/bad_header.csv").c_str(), nullptr, &c) == RK_E_PARSE);
  CHECK(rk_corpus_load((kFix + "/missing.csv").c_str(), nullptr, &c) == RK_E_IO);
}
