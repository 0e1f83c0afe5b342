#include "rkindex/rkindex.h"

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rkindex/error.hpp"
#include "rkindex/experiments.hpp"
#include "rkindex/indicators.hpp"
#include "rkindex/ingest.hpp"
#include "rkindex/rankcore.hpp"
#include "rkindex/synthdist.hpp"
#include "rkindex/table.hpp"

using namespace rkindex;

struct rk_config {
  synth::EnsembleConfig config;
  std::string hash;
};

struct rk_ensemble {
  synth::Ensemble ensemble;
  ranks::WorldIndex world;
};

struct rk_corpus {
  ingest::Corpus corpus;
  std::vector<std::string> diagnostics;
  std::vector<std::size_t> lines;
  std::vector<std::string> countries;
};

struct rk_report {
  Table table;
  std::string rendered;
  std::string sidecar;
  std::string meta_value;
};

namespace {

thread_local std::string last_error;

rk_status status_of(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return RK_E_INVALID_ARGUMENT;
    case Errc::insufficient_papers: return RK_E_INSUFFICIENT_PAPERS;
    case Errc::unknown_label: return RK_E_UNKNOWN_LABEL;
    case Errc::parse_error: return RK_E_PARSE;
    case Errc::io_error: return RK_E_IO;
  }
  return RK_E_INTERNAL;
}

template <typename F>
rk_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return RK_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RK_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RK_E_INTERNAL;
  }
}

void require_out(const void* out) { require(out != nullptr, "output pointer is NULL"); }

indicators::RkParams rk_params(const rk_indicator_params* p) {
  indicators::RkParams out;
  if (p) {
    out.k = p->k;
    out.offset = p->offset;
    out.scale = p->scale;
  }
  out.validate();
  return out;
}

std::vector<double> percentiles(const rk_indicator_params* p) {
  if (!p || !p->xs) return indicators::default_percentiles();
  require(p->n_xs > 0, "percentile list is empty");
  return {p->xs, p->xs + p->n_xs};
}

ranks::TiePolicy tie_of(rk_tie_policy tie) {
  switch (tie) {
    case RK_TIE_ORDINAL: return ranks::TiePolicy::ordinal;
    case RK_TIE_MIN_RANK: return ranks::TiePolicy::min_rank;
  }
  fail(Errc::invalid_argument, "unknown tie policy");
}

std::vector<ingest::SplitKind> splits_of(rk_split split) {
  switch (split) {
    case RK_SPLIT_DOMESTIC: return {ingest::SplitKind::domestic};
    case RK_SPLIT_COLLABORATIVE: return {ingest::SplitKind::collaborative};
    case RK_SPLIT_BOTH: return {ingest::SplitKind::domestic, ingest::SplitKind::collaborative};
  }
  fail(Errc::invalid_argument, "unknown split");
}

std::vector<std::string> strings(const char* const* items, std::size_t n) {
  require(n == 0 || items != nullptr, "string list is NULL");
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(items[i] != nullptr, "string list holds NULL");
    out.emplace_back(items[i]);
  }
  return out;
}

ingest::AssessParams assess_params(rk_tie_policy tie, const rk_indicator_params* p) {
  ingest::AssessParams out;
  out.rk = rk_params(p);
  out.tie_policy = tie_of(tie);
  if (p) out.local_share = p->local_share;
  require(out.local_share >= 0.0 && out.local_share <= 1.0, "local share must lie in [0, 1]");
  return out;
}

rk_report* wrap(Table t) { return new rk_report{std::move(t), {}, {}, {}}; }

Json xs_json(const std::vector<double>& xs) {
  Json j = Json::array();
  for (double x : xs) j.push_back(x);
  return j;
}

}  // namespace

extern "C" {

const char* rk_last_error(void) { return last_error.c_str(); }

const char* rk_status_string(rk_status status) {
  switch (status) {
    case RK_OK: return "ok";
    case RK_E_INVALID_ARGUMENT: return "invalid argument";
    case RK_E_INSUFFICIENT_PAPERS: return "insufficient papers";
    case RK_E_UNKNOWN_LABEL: return "unknown label";
    case RK_E_PARSE: return "parse error";
    case RK_E_IO: return "i/o error";
    case RK_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rk_version(void) { return RKINDEX_VERSION_STRING; }

rk_status rk_parse_tie_policy(const char* text, rk_tie_policy* out) {
  return guarded([&] {
    require(text != nullptr, "tie policy is NULL");
    require_out(out);
    *out = ranks::parse_tie_policy(text) == ranks::TiePolicy::ordinal ? RK_TIE_ORDINAL
                                                                      : RK_TIE_MIN_RANK;
  });
}

rk_status rk_geometric_mean(const double* xs, size_t n, double* out) {
  return guarded([&] {
    require(n == 0 || xs != nullptr, "values are NULL");
    require_out(out);
    *out = ranks::geometric_mean(std::span<const double>(xs, n));
  });
}

rk_status rk_rk_index(const uint64_t* rank1s, size_t n, double offset, double scale, double* out) {
  return guarded([&] {
    require(n == 0 || rank1s != nullptr, "ranks are NULL");
    require_out(out);
    *out = indicators::rk_from_rank1s(std::span<const std::uint64_t>(rank1s, n), offset, scale);
  });
}

rk_status rk_lognormal_survival(double mu, double sigma, double c, double* out) {
  return guarded([&] {
    require_out(out);
    *out = indicators::lognormal_survival(mu, sigma, c);
  });
}

// --- config ------------------------------------------------------------------

rk_status rk_config_create(rk_config** out) {
  return guarded([&] {
    require_out(out);
    synth::EnsembleConfig cfg;
    *out = new rk_config{cfg, cfg.hash()};
  });
}

rk_status rk_config_load(const char* path, rk_config** out) {
  return guarded([&] {
    require(path != nullptr, "config path is NULL");
    require_out(out);
    auto cfg = synth::load_config(path);
    *out = new rk_config{cfg, cfg.hash()};
  });
}

rk_status rk_config_parse(const char* text, rk_config** out) {
  return guarded([&] {
    require(text != nullptr, "config text is NULL");
    require_out(out);
    auto cfg = synth::parse_config(text);
    *out = new rk_config{cfg, cfg.hash()};
  });
}

rk_status rk_config_set_seed(rk_config* config, uint64_t seed) {
  return guarded([&] {
    require(config != nullptr, "config is NULL");
    config->config.seed = seed;
    config->hash = config->config.hash();
  });
}

uint64_t rk_config_seed(const rk_config* config) { return config ? config->config.seed : 0; }

uint64_t rk_config_total_papers(const rk_config* config) {
  return config ? config->config.total_papers() : 0;
}

const char* rk_config_hash(const rk_config* config) { return config ? config->hash.c_str() : ""; }

void rk_config_free(rk_config* config) { delete config; }

// --- ensembles ---------------------------------------------------------------

rk_status rk_ensemble_generate(const rk_config* config, unsigned jobs, rk_tie_policy tie,
                               rk_ensemble** out) {
  return guarded([&] {
    require(config != nullptr, "config is NULL");
    require_out(out);
    const auto policy = tie_of(tie);
    auto ens = synth::generate(config->config, jobs == 0 ? 1 : jobs);
    auto world = experiments::build_world(ens, policy);
    *out = new rk_ensemble{std::move(ens), std::move(world)};
  });
}

size_t rk_ensemble_series_count(const rk_ensemble* e) { return e ? e->ensemble.series.size() : 0; }

size_t rk_ensemble_world_size(const rk_ensemble* e) { return e ? e->world.size() : 0; }

void rk_ensemble_free(rk_ensemble* ensemble) { delete ensemble; }

void rk_indicator_params_default(rk_indicator_params* params) {
  if (!params) return;
  const indicators::RkParams d;
  *params = rk_indicator_params{d.k, d.offset, d.scale, nullptr, 0, 0.0};
}

void rk_experiment_options_default(rk_experiment_options* options) {
  if (!options) return;
  const experiments::RunOptions d;
  *options = rk_experiment_options{d.sample_size, d.fig4_mu_min};
}

rk_status rk_report_series(const rk_ensemble* e, rk_report** out) {
  return guarded([&] {
    require(e != nullptr, "ensemble is NULL");
    require_out(out);
    auto t = synth::series_table(e->ensemble);
    experiments::stamp_run(t, "gen", {e->ensemble, e->world, {}});
    t.name += "_series";
    *out = wrap(std::move(t));
  });
}

rk_status rk_report_values(const rk_ensemble* e, rk_report** out) {
  return guarded([&] {
    require(e != nullptr, "ensemble is NULL");
    require_out(out);
    auto t = synth::values_table(e->ensemble);
    experiments::stamp_run(t, "gen", {e->ensemble, e->world, {}});
    t.name += "_values";
    *out = wrap(std::move(t));
  });
}

rk_status rk_report_ranks(const rk_ensemble* e, const char* const* labels, size_t n_labels,
                          const rk_indicator_params* params, rk_report** out) {
  return guarded([&] {
    require(e != nullptr, "ensemble is NULL");
    require_out(out);
    const auto p = rk_params(params);
    auto wanted = strings(labels, n_labels);
    if (wanted.empty())
      for (const auto& s : e->ensemble.series) wanted.push_back(s.label);
    auto t = ranks::rank_table(e->world, wanted, p.k);
    std::string extra;
    for (const auto& l : wanted) extra += l + ",";
    Json j = Json::object();
    j["labels"] = n_labels == 0 ? Json("all") : Json(wanted);
    experiments::stamp_run(t, "rank", {e->ensemble, e->world, p}, std::move(j), extra);
    *out = wrap(std::move(t));
  });
}

rk_status rk_report_indicators(const rk_ensemble* e, const rk_indicator_params* params,
                               rk_report** out) {
  return guarded([&] {
    require(e != nullptr, "ensemble is NULL");
    require_out(out);
    const auto p = rk_params(params);
    const auto xs = percentiles(params);
    auto t = indicators::indicator_table(e->world, p, xs);
    Json j = Json::object();
    j["x"] = xs_json(xs);
    experiments::stamp_run(t, "rk", {e->ensemble, e->world, p}, j, j.dump());
    *out = wrap(std::move(t));
  });
}

rk_status rk_report_ptop(const rk_ensemble* e, const rk_indicator_params* params, rk_report** out) {
  return guarded([&] {
    require(e != nullptr, "ensemble is NULL");
    require_out(out);
    const auto p = rk_params(params);
    const auto xs = percentiles(params);
    auto t = indicators::percentile_table(e->world, e->ensemble.specs, xs);
    Json j = Json::object();
    j["x"] = xs_json(xs);
    experiments::stamp_run(t, "ptop", {e->ensemble, e->world, p}, j, j.dump());
    *out = wrap(std::move(t));
  });
}

rk_status rk_run_experiment(const char* id, const rk_ensemble* e, const rk_indicator_params* params,
                            const rk_experiment_options* options, rk_report** out) {
  return guarded([&] {
    require(id != nullptr, "experiment id is NULL");
    require(e != nullptr, "ensemble is NULL");
    require_out(out);
    experiments::RunOptions opts;
    if (options) {
      opts.sample_size = options->sample_size;
      opts.fig4_mu_min = options->fig4_mu_min;
    }
    const experiments::Context ctx{e->ensemble, e->world, rk_params(params)};
    *out = wrap(experiments::run_experiment(id, ctx, opts));
  });
}

// --- corpora -----------------------------------------------------------------

rk_status rk_corpus_load(const char* csv_path, const char* meta_path, rk_corpus** out) {
  return guarded([&] {
    require(csv_path != nullptr, "corpus path is NULL");
    require_out(out);
    std::optional<ingest::CorpusMeta> meta;
    if (meta_path) meta = ingest::load_meta(meta_path);
    auto c = std::make_unique<rk_corpus>();
    c->corpus = ingest::load_corpus(csv_path, std::move(meta));
    for (const auto& e : c->corpus.errors) {
      c->diagnostics.push_back(e.message);
      c->lines.push_back(e.line);
    }
    for (const auto& w : c->corpus.warnings) {
      c->diagnostics.push_back(w);
      c->lines.push_back(0);
    }
    c->countries = c->corpus.countries_by_output();
    *out = c.release();
  });
}

size_t rk_corpus_size(const rk_corpus* c) { return c ? c->corpus.size() : 0; }

size_t rk_corpus_diagnostic_count(const rk_corpus* c) { return c ? c->diagnostics.size() : 0; }

size_t rk_corpus_error_count(const rk_corpus* c) { return c ? c->corpus.errors.size() : 0; }

const char* rk_corpus_diagnostic(const rk_corpus* c, size_t index, size_t* line) {
  if (!c || index >= c->diagnostics.size()) return nullptr;
  if (line) *line = c->lines[index];
  return c->diagnostics[index].c_str();
}

size_t rk_corpus_countries(const rk_corpus* c, const char** out, size_t cap) {
  if (!c) return 0;
  for (size_t i = 0; out && i < cap && i < c->countries.size(); ++i) out[i] = c->countries[i].c_str();
  return c->countries.size();
}

void rk_corpus_free(rk_corpus* corpus) { delete corpus; }

rk_status rk_report_assess(const rk_corpus* c, const char* const* countries, size_t n_countries,
                           rk_split split, int wide, rk_tie_policy tie,
                           const rk_indicator_params* params, rk_report** out) {
  return guarded([&] {
    require(c != nullptr, "corpus is NULL");
    require_out(out);
    const auto p = assess_params(tie, params);
    auto list = strings(countries, n_countries);
    if (list.empty()) list = c->countries;
    auto rows = ingest::assess(c->corpus, list, p);
    if (split != RK_SPLIT_BOTH) {
      const auto keep = splits_of(split).front();
      std::erase_if(rows, [&](const ingest::AssessmentRow& r) { return r.split != keep; });
    }
    *out = wrap(wide ? ingest::assessment_table(c->corpus, rows, p)
                     : ingest::assessment_long_table(c->corpus, rows, p));
  });
}

rk_status rk_report_assess_temporal(const rk_corpus* const* corpora, size_t n_corpora,
                                    const char* const* countries, size_t n_countries,
                                    rk_tie_policy tie, const rk_indicator_params* params,
                                    rk_report** out) {
  return guarded([&] {
    require(corpora != nullptr && n_corpora > 0, "no corpora given");
    require_out(out);
    const auto p = assess_params(tie, params);
    std::vector<ingest::Corpus> list;
    for (size_t i = 0; i < n_corpora; ++i) {
      require(corpora[i] != nullptr, "corpus is NULL");
      list.push_back(corpora[i]->corpus);
    }
    auto names = strings(countries, n_countries);
    if (names.empty()) names = corpora[0]->countries;
    *out = wrap(ingest::temporal_table(list, names, p));
  });
}

rk_status rk_report_corpus_ranks(const rk_corpus* c, const char* country, rk_split split,
                                 rk_tie_policy tie, const rk_indicator_params* params,
                                 rk_report** out) {
  return guarded([&] {
    require(c != nullptr, "corpus is NULL");
    require(country != nullptr, "country is NULL");
    require(split != RK_SPLIT_BOTH, "rank table needs a single split");
    require_out(out);
    *out = wrap(ingest::unit_rank_table(c->corpus, country, splits_of(split).front(),
                                        assess_params(tie, params)));
  });
}

rk_status rk_report_corpus_indicators(const rk_corpus* c, const char* const* countries,
                                      size_t n_countries, rk_split split, rk_tie_policy tie,
                                      const rk_indicator_params* params, rk_report** out) {
  return guarded([&] {
    require(c != nullptr, "corpus is NULL");
    require_out(out);
    auto list = strings(countries, n_countries);
    if (list.empty()) list = c->countries;
    *out = wrap(ingest::unit_indicator_table(c->corpus, list, splits_of(split),
                                             assess_params(tie, params), percentiles(params)));
  });
}

// --- reports -----------------------------------------------------------------

const char* rk_report_name(const rk_report* r) { return r ? r->table.name.c_str() : ""; }

size_t rk_report_row_count(const rk_report* r) { return r ? r->table.rows.size() : 0; }

const char* rk_report_render(rk_report* r, rk_format format, int with_comments) {
  if (!r) return nullptr;
  try {
    r->rendered = format == RK_FORMAT_JSON ? r->table.to_json() : r->table.to_csv(with_comments != 0);
  } catch (const std::exception& e) {
    last_error = e.what();
    return nullptr;
  }
  return r->rendered.c_str();
}

const char* rk_report_sidecar(rk_report* r) {
  if (!r) return nullptr;
  try {
    r->sidecar = r->table.sidecar_json();
  } catch (const std::exception& e) {
    last_error = e.what();
    return nullptr;
  }
  return r->sidecar.c_str();
}

const char* rk_report_meta(rk_report* r, const char* key) {
  if (!r || !key || !r->table.meta.contains(key)) return nullptr;
  r->meta_value = r->table.meta[key].dump();
  return r->meta_value.c_str();
}

void rk_report_free(rk_report* report) { delete report; }

}  // extern "C"
