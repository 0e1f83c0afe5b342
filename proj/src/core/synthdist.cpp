#include "rkindex/synthdist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "rkindex/error.hpp"

namespace rkindex::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void config_error(std::size_t line, const std::string& message) {
  fail(Errc::parse_error, "config line " + std::to_string(line) + ": " + message);
}

double parse_real(std::string_view text, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    config_error(line, "expected a real number, got '" + std::string(text) + "'");
  return value;
}

std::uint64_t parse_unsigned(std::string_view text, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    config_error(line, "expected a non-negative integer, got '" + std::string(text) + "'");
  return value;
}

}  // namespace

std::string_view to_string(Origin origin) noexcept {
  return origin == Origin::synthetic ? "synthetic" : "real";
}

void LognormalSpec::validate() const {
  require(!label.empty(), "series label must be non-empty");
  require(std::isfinite(mu), "mu must be finite for series '" + label + "'");
  require(sigma > 0.0 && std::isfinite(sigma), "sigma must be > 0 for series '" + label + "'");
  require(n >= 1, "series '" + label + "' must have n >= 1");
}

void EnsembleConfig::validate() const {
  require(mu_count >= 1, "mu_count must be >= 1");
  require(std::isfinite(mu_start) && std::isfinite(mu_end), "mu bounds must be finite");
  require(!(mu_count == 1 && mu_start != mu_end),
          "mu_count = 1 requires mu_start == mu_end (spacing undefined)");
  require(!sizes.empty(), "sizes must list at least one series size");
  for (auto s : sizes) require(s >= 1, "every series size must be >= 1");
  require(sigma > 0.0 && std::isfinite(sigma), "sigma must be > 0");
}

std::size_t EnsembleConfig::total_papers() const noexcept {
  return mu_count * std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
}

double EnsembleConfig::mu_at(std::size_t index) const {
  require(index < mu_count, "mu index out of range");
  if (mu_count == 1) return mu_start;
  if (index == mu_count - 1) return mu_end;
  const double t = static_cast<double>(index) / static_cast<double>(mu_count - 1);
  return mu_start + (mu_end - mu_start) * t;
}

std::string EnsembleConfig::canonical() const {
  std::string out;
  out += "mu_start=" + format_double(mu_start) + "\n";
  out += "mu_end=" + format_double(mu_end) + "\n";
  out += "mu_count=" + std::to_string(mu_count) + "\n";
  out += "sizes=";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sizes[i]);
  }
  out += "\n";
  out += "sigma=" + format_double(sigma) + "\n";
  out += "seed=" + std::to_string(seed) + "\n";
  return out;
}

std::string EnsembleConfig::hash() const { return hex64(fnv1a64(canonical())); }

EnsembleConfig parse_config(std::string_view text) {
  EnsembleConfig config;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(line_no, "expected key=value");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) config_error(line_no, "empty value for '" + key + "'");
    if (!seen.insert(key).second) config_error(line_no, "duplicate key '" + key + "'");

    if (key == "mu_start") {
      config.mu_start = parse_real(value, line_no);
    } else if (key == "mu_end") {
      config.mu_end = parse_real(value, line_no);
    } else if (key == "mu_count") {
      config.mu_count = parse_unsigned(value, line_no);
    } else if (key == "sigma") {
      config.sigma = parse_real(value, line_no);
    } else if (key == "seed") {
      config.seed = parse_unsigned(value, line_no);
    } else if (key == "sizes") {
      config.sizes.clear();
      while (!value.empty()) {
        auto comma = value.find(',');
        config.sizes.push_back(parse_unsigned(trim(value.substr(0, comma)), line_no));
        value = comma == std::string_view::npos ? std::string_view{} : value.substr(comma + 1);
      }
    } else {
      config_error(line_no, "unknown key '" + key + "'");
    }
  }
  try {
    config.validate();
  } catch (const Error& e) {
    fail(Errc::parse_error, std::string("invalid config: ") + e.what());
  }
  return config;
}

EnsembleConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string grid_label(std::size_t index) {
  std::size_t width = 2;
  std::size_t block = 26 * 26;
  while (index >= block) {
    index -= block;
    ++width;
    block *= 26;
  }
  std::string label(width, 'a');
  for (std::size_t i = width; i-- > 0;) {
    label[i] = static_cast<char>('a' + index % 26);
    index /= 26;
  }
  return label;
}

std::vector<LognormalSpec> build_grid(const EnsembleConfig& config) {
  config.validate();
  std::vector<LognormalSpec> specs;
  specs.reserve(config.mu_count * config.sizes.size());
  for (std::size_t m = 0; m < config.mu_count; ++m) {
    const double mu = config.mu_at(m);
    for (auto n : config.sizes) {
      specs.push_back({grid_label(specs.size()), mu, config.sigma, n});
    }
  }
  return specs;
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream_id) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream_id ^ 0x5851f42d4c957f2dULL));
}

CitationSeries sample_series(const LognormalSpec& spec, std::uint64_t seed,
                             std::uint64_t stream_id) {
  spec.validate();
  boost::random::mt19937_64 engine(stream_key(seed, stream_id));
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  CitationSeries series{spec.label, {}, Origin::synthetic};
  series.values.resize(spec.n);
  for (auto& v : series.values) v = std::exp(spec.mu + spec.sigma * normal(engine));
  return series;
}

CitationSeries combine_series(std::span<const CitationSeries> parts, std::string new_label) {
  require(!parts.empty(), "combine_series needs at least one part");
  require(!new_label.empty(), "combined series label must be non-empty");
  CitationSeries out{std::move(new_label), {}, parts.front().origin};
  std::size_t total = 0;
  for (const auto& p : parts) {
    require(p.origin == out.origin, "cannot combine synthetic and real series");
    total += p.size();
  }
  out.values.reserve(total);
  for (const auto& p : parts) out.values.insert(out.values.end(), p.values.begin(), p.values.end());
  return out;
}

std::size_t Ensemble::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (specs[i].label == label) return i;
  fail(Errc::unknown_label, "no series labelled '" + std::string(label) + "'");
}

const LognormalSpec& Ensemble::spec(std::string_view label) const { return specs[index_of(label)]; }

std::size_t Ensemble::total_papers() const noexcept {
  std::size_t total = 0;
  for (const auto& s : series) total += s.size();
  return total;
}

Ensemble generate(const EnsembleConfig& config, unsigned jobs) {
  Ensemble ensemble{config, build_grid(config), {}};
  const std::size_t count = ensemble.specs.size();
  ensemble.series.resize(count);

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < count; i += workers)
      ensemble.series[i] = sample_series(ensemble.specs[i], config.seed, i);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  return ensemble;
}

Table series_table(const Ensemble& ensemble) {
  Table t;
  t.name = "series";
  t.columns = {"label", "mu", "sigma", "n"};
  for (const auto& s : ensemble.specs)
    t.add_row({s.label, s.mu, s.sigma, static_cast<std::int64_t>(s.n)});
  return t;
}

Table values_table(const Ensemble& ensemble) {
  Table t;
  t.name = "values";
  t.columns = {"label", "value"};
  t.rows.reserve(ensemble.total_papers());
  for (const auto& s : ensemble.series)
    for (double v : s.values) t.rows.push_back({s.label, v});
  return t;
}

}  // namespace rkindex::synth
