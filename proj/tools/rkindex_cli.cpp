// rkindex command-line front end. Talks to the library only through the C
// interface in rkindex/rkindex.h.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rkindex/rkindex.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(rk_status status) {
  return status == RK_E_INVALID_ARGUMENT ? kExitUsage : kExitData;
}

void check(rk_status status) {
  if (status != RK_OK)
    throw CliError{exit_code_for(status),
                   std::string(rk_status_string(status)) + ": " + rk_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<rk_config, Deleter<rk_config, rk_config_free>>;
using EnsemblePtr = std::unique_ptr<rk_ensemble, Deleter<rk_ensemble, rk_ensemble_free>>;
using CorpusPtr = std::unique_ptr<rk_corpus, Deleter<rk_corpus, rk_corpus_free>>;
using ReportPtr = std::unique_ptr<rk_report, Deleter<rk_report, rk_report_free>>;

struct Options {
  std::string config;
  std::vector<std::string> inputs;
  std::vector<std::string> metas;
  std::vector<std::string> countries;
  std::vector<std::string> labels;
  std::string split = "both";
  std::string layout = "wide";
  std::size_t k = 10;
  double offset = 20.0;
  double scale = 1000.0;
  std::vector<double> xs{10.0, 1.0, 0.5, 0.1, 0.01};
  std::string tie = "ordinal";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string out;
  std::string format = "csv";
  double local_share = 0.0;
  bool lenient = false;
  std::size_t sample_size = 15;
  double fig4_mu_min = 2.22;
};

rk_indicator_params indicator_params(const Options& o) {
  rk_indicator_params p;
  rk_indicator_params_default(&p);
  p.k = o.k;
  p.offset = o.offset;
  p.scale = o.scale;
  p.xs = o.xs.data();
  p.n_xs = o.xs.size();
  p.local_share = o.local_share;
  return p;
}

rk_tie_policy tie_policy(const Options& o) {
  rk_tie_policy tie = RK_TIE_ORDINAL;
  check(rk_parse_tie_policy(o.tie.c_str(), &tie));
  return tie;
}

rk_split split_of(const std::string& s) {
  if (s == "domestic") return RK_SPLIT_DOMESTIC;
  if (s == "collaborative") return RK_SPLIT_COLLABORATIVE;
  return RK_SPLIT_BOTH;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

// Writes via a temporary sibling and renames it into place.
void write_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CliError{kExitData, "cannot write '" + tmp.string() + "'"};
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw CliError{kExitData, "write failed for '" + path.string() + "'"};
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw CliError{kExitData, "cannot move report into '" + path.string() + "'"};
  }
}

fs::path out_dir(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec || !fs::is_directory(o.out))
    throw CliError{kExitData, "cannot create output directory '" + o.out + "'"};
  return o.out;
}

const char* render(rk_report* r, rk_format format, bool comments) {
  const char* text = rk_report_render(r, format, comments ? 1 : 0);
  if (!text) throw CliError{kExitData, std::string("render failed: ") + rk_last_error()};
  return text;
}

// One report: stdout without --out, otherwise <name>.csv + <name>.json sidecar
// or <name>.json alone.
void emit(rk_report* r, const Options& o) {
  const bool json = o.format == "json";
  const rk_format fmt = json ? RK_FORMAT_JSON : RK_FORMAT_CSV;
  if (o.out.empty()) {
    std::cout << render(r, fmt, true);
    if (json) std::cout << '\n';
    return;
  }
  const auto dir = out_dir(o);
  const std::string name = rk_report_name(r);
  if (json) {
    write_atomic(dir / (name + ".json"), std::string(render(r, fmt, false)) + "\n");
  } else {
    write_atomic(dir / (name + ".csv"), render(r, fmt, false));
    write_atomic(dir / (name + ".json"), std::string(rk_report_sidecar(r)) + "\n");
  }
  std::cerr << "wrote " << (dir / name).string() << (json ? ".json" : ".csv") << " ("
            << rk_report_row_count(r) << " rows)\n";
}

ConfigPtr load_config(const Options& o) {
  rk_config* raw = nullptr;
  check(o.config.empty() ? rk_config_create(&raw) : rk_config_load(o.config.c_str(), &raw));
  ConfigPtr cfg(raw);
  if (o.seed) check(rk_config_set_seed(cfg.get(), *o.seed));
  return cfg;
}

EnsemblePtr make_ensemble(const Options& o) {
  auto cfg = load_config(o);
  rk_ensemble* raw = nullptr;
  check(rk_ensemble_generate(cfg.get(), o.jobs, tie_policy(o), &raw));
  return EnsemblePtr(raw);
}

CorpusPtr load_corpus(const std::string& path, const std::string* meta, const Options& o) {
  rk_corpus* raw = nullptr;
  check(rk_corpus_load(path.c_str(), meta ? meta->c_str() : nullptr, &raw));
  CorpusPtr corpus(raw);
  const std::size_t n = rk_corpus_diagnostic_count(corpus.get());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t line = 0;
    const char* msg = rk_corpus_diagnostic(corpus.get(), i, &line);
    if (line > 0) std::cerr << path << ":" << line << ": " << msg << "\n";
    else std::cerr << path << ": warning: " << msg << "\n";
  }
  const std::size_t errors = rk_corpus_error_count(corpus.get());
  if (errors > 0 && !o.lenient)
    throw CliError{kExitData, std::to_string(errors) + " malformed row(s) in '" + path +
                                  "' (use --lenient to skip them)"};
  return corpus;
}

CorpusPtr single_corpus(const Options& o) {
  if (o.inputs.size() != 1) throw CliError{kExitUsage, "exactly one --input is required"};
  if (o.metas.size() > 1) throw CliError{kExitUsage, "at most one --meta is allowed"};
  return load_corpus(o.inputs[0], o.metas.empty() ? nullptr : &o.metas[0], o);
}

// --- subcommands -------------------------------------------------------------

void cmd_gen(const Options& o) {
  auto ens = make_ensemble(o);
  rk_report* raw = nullptr;
  check(rk_report_series(ens.get(), &raw));
  ReportPtr series(raw);
  check(rk_report_values(ens.get(), &raw));
  ReportPtr values(raw);
  if (o.out.empty()) {
    emit(values.get(), o);
    return;
  }
  const auto dir = out_dir(o);
  std::string base = rk_report_name(series.get());
  base.erase(base.size() - std::string("_series").size());
  const bool json = o.format == "json";
  for (auto* r : {series.get(), values.get()}) {
    const std::string name = rk_report_name(r);
    if (json)
      write_atomic(dir / (name + ".json"), std::string(render(r, RK_FORMAT_JSON, false)) + "\n");
    else
      write_atomic(dir / (name + ".csv"), render(r, RK_FORMAT_CSV, false));
  }
  if (!json) write_atomic(dir / (base + ".json"), std::string(rk_report_sidecar(series.get())) + "\n");
  std::cerr << "wrote " << (dir / base).string() << "_{series,values} ("
            << rk_ensemble_series_count(ens.get()) << " series, "
            << rk_ensemble_world_size(ens.get()) << " papers)\n";
}

void cmd_rank(const Options& o) {
  const auto params = indicator_params(o);
  rk_report* raw = nullptr;
  if (!o.inputs.empty()) {
    auto corpus = single_corpus(o);
    if (o.countries.size() != 1) throw CliError{kExitUsage, "rank on a corpus needs one --country"};
    if (o.split == "both") throw CliError{kExitUsage, "rank on a corpus needs --split domestic|collaborative"};
    check(rk_report_corpus_ranks(corpus.get(), o.countries[0].c_str(), split_of(o.split),
                                 tie_policy(o), &params, &raw));
  } else {
    auto ens = make_ensemble(o);
    const auto labels = c_strings(o.labels);
    check(rk_report_ranks(ens.get(), labels.data(), labels.size(), &params, &raw));
  }
  ReportPtr report(raw);
  emit(report.get(), o);
}

void cmd_rk(const Options& o) {
  const auto params = indicator_params(o);
  rk_report* raw = nullptr;
  if (!o.inputs.empty()) {
    auto corpus = single_corpus(o);
    const auto countries = c_strings(o.countries);
    check(rk_report_assess(corpus.get(), countries.data(), countries.size(), split_of(o.split), 0,
                           tie_policy(o), &params, &raw));
  } else {
    auto ens = make_ensemble(o);
    check(rk_report_indicators(ens.get(), &params, &raw));
  }
  ReportPtr report(raw);
  emit(report.get(), o);
}

void cmd_ptop(const Options& o) {
  const auto params = indicator_params(o);
  rk_report* raw = nullptr;
  if (!o.inputs.empty()) {
    auto corpus = single_corpus(o);
    const auto countries = c_strings(o.countries);
    check(rk_report_corpus_indicators(corpus.get(), countries.data(), countries.size(),
                                      split_of(o.split), tie_policy(o), &params, &raw));
  } else {
    auto ens = make_ensemble(o);
    check(rk_report_ptop(ens.get(), &params, &raw));
  }
  ReportPtr report(raw);
  emit(report.get(), o);
}

void cmd_experiment(const std::string& id, const Options& o) {
  auto ens = make_ensemble(o);
  const auto params = indicator_params(o);
  rk_experiment_options opts;
  rk_experiment_options_default(&opts);
  opts.sample_size = o.sample_size;
  opts.fig4_mu_min = o.fig4_mu_min;
  rk_report* raw = nullptr;
  check(rk_run_experiment(id.c_str(), ens.get(), &params, &opts, &raw));
  ReportPtr report(raw);
  emit(report.get(), o);
}

void cmd_assess(const Options& o) {
  if (o.inputs.empty()) throw CliError{kExitUsage, "assess needs --input"};
  if (!o.metas.empty() && o.metas.size() != o.inputs.size())
    throw CliError{kExitUsage, "give one --meta per --input"};
  const auto params = indicator_params(o);
  const auto countries = c_strings(o.countries);
  std::vector<CorpusPtr> corpora;
  for (std::size_t i = 0; i < o.inputs.size(); ++i)
    corpora.push_back(load_corpus(o.inputs[i], o.metas.empty() ? nullptr : &o.metas[i], o));
  rk_report* raw = nullptr;
  if (corpora.size() == 1) {
    check(rk_report_assess(corpora[0].get(), countries.data(), countries.size(), split_of(o.split),
                           o.layout == "wide" ? 1 : 0, tie_policy(o), &params, &raw));
  } else {
    std::vector<const rk_corpus*> handles;
    for (const auto& c : corpora) handles.push_back(c.get());
    check(rk_report_assess_temporal(handles.data(), handles.size(), countries.data(),
                                    countries.size(), tie_policy(o), &params, &raw));
  }
  ReportPtr report(raw);
  emit(report.get(), o);
}

// --- flag wiring -------------------------------------------------------------

enum Flags : unsigned {
  kSynthetic = 1u << 0,
  kCorpus = 1u << 1,
  kIndicators = 1u << 2,
  kSplit = 1u << 3,
};

void add_common(CLI::App* sub, Options& o, unsigned flags) {
  CLI::Option* config = nullptr;
  if (flags & kSynthetic) {
    config = sub->add_option("--config", o.config, "Ensemble config file (default: paper grid)")
                 ->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the config seed");
    sub->add_option("--jobs", o.jobs, "Sampling threads")->check(CLI::PositiveNumber);
  }
  if (flags & kCorpus) {
    auto* input = sub->add_option("--input", o.inputs, "Corpus CSV (id,year,citations,countries[,field])");
    sub->add_option("--meta", o.metas, "Corpus metadata JSON");
    sub->add_option("--country,--countries", o.countries, "Country codes (default: all)")
        ->delimiter(',');
    sub->add_flag("--lenient", o.lenient, "Skip malformed rows instead of failing");
    if (config) input->excludes(config);
  }
  if (flags & kSplit)
    sub->add_option("--split", o.split, "domestic | collaborative | both")
        ->check(CLI::IsMember({"domestic", "collaborative", "both"}));
  if (flags & kIndicators) {
    sub->add_option("--k", o.k, "Papers entering the Rk-index")->capture_default_str();
    sub->add_option("--offset", o.offset, "Rank offset")->capture_default_str();
    sub->add_option("--scale", o.scale, "Rk scale factor")->capture_default_str();
    sub->add_option("--x", o.xs, "Top percentiles")->delimiter(',');
    sub->add_option("--local-share", o.local_share, "Adds an experimental fractional Rk column");
  }
  sub->add_option("--tie", o.tie, "ordinal | min")->capture_default_str();
  sub->add_option("--out", o.out, "Output directory (default: standard output)");
  sub->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-based research assessment indicators"};
  app.set_version_flag("--version", std::string(rk_version()));
  app.require_subcommand(1, 1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Sample a synthetic lognormal ensemble");
  add_common(gen, o, kSynthetic);
  auto* rank = app.add_subcommand("rank", "Top-k Rank 1 / Rank 2 table");
  add_common(rank, o, kSynthetic | kCorpus | kIndicators | kSplit);
  rank->add_option("--label", o.labels, "Synthetic series labels (default: all)")->delimiter(',');
  auto* rk = app.add_subcommand("rk", "Rk-index per unit");
  add_common(rk, o, kSynthetic | kCorpus | kIndicators | kSplit);
  auto* ptop = app.add_subcommand("ptop", "Top-percentile counts per unit");
  add_common(ptop, o, kSynthetic | kCorpus | kIndicators | kSplit);

  std::vector<std::pair<std::string, CLI::App*>> experiments;
  for (const auto& [id, about] : std::vector<std::pair<std::string, std::string>>{
           {"tables1", "Rank 1 / Rank 2 tables for sampled series"},
           {"fig1", "P_top 0.1% against rank geometric means"},
           {"fig2", "Stringency tiers of P_top against Rk"},
           {"fig3", "Rank traces for size/efficiency pairs"},
           {"fig4", "Rk/P_top ratios and equivalence ranges"}}) {
    auto* sub = app.add_subcommand(id, about);
    add_common(sub, o, kSynthetic | kIndicators);
    experiments.emplace_back(id, sub);
  }
  experiments[0].second->add_option("--sample-size", o.sample_size, "Series sampled")
      ->capture_default_str();
  experiments[4].second->add_option("--mu-min", o.fig4_mu_min, "Lowest grid mu used")
      ->capture_default_str();

  auto* assess = app.add_subcommand("assess", "Country assessment tables from corpus files");
  add_common(assess, o, kCorpus | kIndicators | kSplit);
  assess->add_option("--layout", o.layout, "wide | long")
      ->check(CLI::IsMember({"wide", "long"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) cmd_gen(o);
    else if (rank->parsed()) cmd_rank(o);
    else if (rk->parsed()) cmd_rk(o);
    else if (ptop->parsed()) cmd_ptop(o);
    else if (assess->parsed()) cmd_assess(o);
    else
      for (const auto& [id, sub] : experiments)
        if (sub->parsed()) cmd_experiment(id, o);
  } catch (const CliError& e) {
    std::cerr << "rkindex: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "rkindex: " << e.what() << "\n";
    return kExitData;
  }
  std::cout.flush();
  return std::cout ? kExitOk : kExitData;
}
