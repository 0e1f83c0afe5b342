#pragma once

// Seeded synthetic lognormal citation series and ensembles.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rkindex/table.hpp"

namespace rkindex::synth {

enum class Origin { synthetic, real };

std::string_view to_string(Origin origin) noexcept;

/// Parameters of one simulated unit: citations ~ exp(Normal(mu, sigma^2)).
struct LognormalSpec {
  std::string label;
  double mu = 0.0;
  double sigma = 1.0;
  std::size_t n = 0;

  void validate() const;
};

struct CitationSeries {
  std::string label;
  std::vector<double> values;
  Origin origin = Origin::synthetic;

  std::size_t size() const noexcept { return values.size(); }
};

/// A mu grid crossed with a list of series sizes. The defaults are the
/// 200 x {800, 400, 200} grid (600 series, 280,000 papers).
struct EnsembleConfig {
  double mu_start = 4.0;
  double mu_end = 2.0;
  std::size_t mu_count = 200;
  std::vector<std::size_t> sizes{800, 400, 200};
  double sigma = 1.1;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t total_papers() const noexcept;
  double mu_at(std::size_t index) const;

  /// Canonical key=value text; parse_config(canonical()) reproduces *this.
  std::string canonical() const;
  std::string hash() const;
};

/// Parses the plain-text key=value format (keys: mu_start, mu_end, mu_count,
/// sizes, seed, optional sigma; '#' starts a comment). Throws parse_error.
EnsembleConfig parse_config(std::string_view text);
EnsembleConfig load_config(const std::filesystem::path& path);

/// Two-letter base-26 labels aa, ab, ..., zz, then three letters, and so on.
std::string grid_label(std::size_t index);

std::vector<LognormalSpec> build_grid(const EnsembleConfig& config);

/// Per-stream generator key; streams for distinct ids are independent.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream_id) noexcept;

CitationSeries sample_series(const LognormalSpec& spec, std::uint64_t seed,
                             std::uint64_t stream_id);

CitationSeries combine_series(std::span<const CitationSeries> parts, std::string new_label);

/// Specs plus their sampled series, index-aligned, in grid order.
struct Ensemble {
  EnsembleConfig config;
  std::vector<LognormalSpec> specs;
  std::vector<CitationSeries> series;

  std::size_t index_of(std::string_view label) const;
  const LognormalSpec& spec(std::string_view label) const;
  std::size_t total_papers() const noexcept;
};

/// Samples every grid series; series i uses stream id i. The result does not
/// depend on `jobs`.
Ensemble generate(const EnsembleConfig& config, unsigned jobs = 1);

/// label,mu,sigma,n
Table series_table(const Ensemble& ensemble);
/// label,value
Table values_table(const Ensemble& ensemble);

}  // namespace rkindex::synth
