#pragma once

// Synthetic validation studies: rank tables, the P_top-vs-rank collapse,
// stringency tiers, size/efficiency equivalence and equivalence ranges.
// Each study has a typed compute_* form and a run_* form returning a Table
// with provenance metadata.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rkindex/indicators.hpp"
#include "rkindex/rankcore.hpp"
#include "rkindex/synthdist.hpp"
#include "rkindex/table.hpp"

namespace rkindex::experiments {

struct Context {
  const synth::Ensemble& ensemble;
  const ranks::WorldIndex& world;
  indicators::RkParams params{};
};

/// World list over every series of the ensemble.
ranks::WorldIndex build_world(const synth::Ensemble& ensemble,
                              ranks::TiePolicy policy = ranks::TiePolicy::ordinal);

/// Stable identifier of one run: hash of the ensemble config (seed included),
/// indicator parameters, tie policy and any experiment-specific options.
std::string run_hash(const synth::EnsembleConfig& config, const indicators::RkParams& params,
                     ranks::TiePolicy policy, std::string_view extra = {});

/// Names the table <id>_<run hash> and fills the provenance metadata
/// (config, seed, indicator parameters, tie policy, world size).
void stamp_run(Table& table, std::string_view id, const Context& ctx, Json parameters = Json::object(),
               std::string_view extra = {});

/// round(j * (count - 1) / (sample - 1)) for j = 0..sample-1.
std::vector<std::size_t> evenly_spaced(std::size_t count, std::size_t sample);

// --- rank tables -----------------------------------------------------------

struct RankBlock {
  std::string label;
  double mu = 0.0;
  std::size_t n = 0;
  std::vector<ranks::RankPair> pairs;
  double ratio_index = 0.0;   // geomean of rank2/rank1
  double gm_inv_rank1 = 0.0;  // geomean of 1/rank1
};

std::vector<RankBlock> compute_table_s1(const Context& ctx, std::size_t sample_size = 15);
Table run_table_s1(const Context& ctx, std::size_t sample_size = 15);

// --- 99-series selection ---------------------------------------------------

/// 33 evenly spaced mu values, all three sizes each. Requires a grid with
/// exactly three sizes per mu and at least 33 mu values.
std::vector<std::string> select_99(const synth::Ensemble& ensemble);

// --- collapse of P_top onto the rank means ---------------------------------

struct Fig1Row {
  std::string label;
  std::size_t n = 0;
  double mu = 0.0;
  double gm_inv_rank1 = 0.0;         // geomean 1/rank1
  double gm_inv_offset_rank1 = 0.0;  // geomean 1/(offset + rank1)
  double ptop10 = 0.0;               // analytic
  double ptop01 = 0.0;               // analytic, top 0.1%
  double rk = 0.0;                   // scale * gm_inv_offset_rank1
  std::vector<std::uint64_t> rank1s;
};

std::vector<Fig1Row> compute_fig1(const Context& ctx);
Table run_fig1(const Context& ctx);

// --- stringency tiers ------------------------------------------------------

inline constexpr std::array<double, 5> kTierPercentiles{10.0, 3.0, 1.0, 0.5, 0.1};
inline constexpr std::array<std::string_view, 3> kTierNames{"high", "medium", "low"};

struct Fig2Row {
  std::string label;
  std::size_t n = 0;
  double mu = 0.0;
  double rk = 0.0;
  std::size_t tier = 0;  // 0 high, 1 medium, 2 low
  std::array<double, kTierPercentiles.size()> ptop{};  // analytic, per kTierPercentiles
  std::vector<std::uint64_t> rank1s;
};

/// Selected series sorted by rk descending and cut into three equal tiers.
std::vector<Fig2Row> compute_fig2(const Context& ctx);

struct BranchSpread {
  std::size_t tier = 0;
  double x = 0.0;
  std::vector<std::size_t> sizes;  // branch N values, descending
  std::vector<double> slopes;      // P_top x% = slope * rk, per branch
  double spread = 0.0;             // max/min slope; NaN with < 2 branches
};

/// Per tier and percentile, the through-origin slope of P_top x% on rk for
/// each N branch. Rows from several seeds may be pooled.
std::vector<BranchSpread> branch_spreads(std::span<const Fig2Row> rows);

/// Percentile with the smallest branch spread in `tier` (where N branches
/// merge).
double merge_percentile(std::span<const BranchSpread> spreads, std::size_t tier);

Table run_fig2(const Context& ctx);

// --- size / efficiency -----------------------------------------------------

struct Fig3Trace {
  std::string label;
  double mu = 0.0;
  std::size_t n = 0;
  std::vector<ranks::RankPair> pairs;  // rank2 = 1..k
  double rk = 0.0;
};

/// Top-k Rank 1 vs Rank 2 trace of one unit.
Fig3Trace rank_trace(const Context& ctx, std::string_view label);

/// Series nearest to (mu_high, max N), (mu_high, min N), (mu_low, max N),
/// (mu_low, min N), in that order.
std::array<std::string, 4> select_fig3(const synth::Ensemble& ensemble, double mu_high = 3.63,
                                       double mu_low = 3.03);

std::vector<Fig3Trace> compute_fig3(const Context& ctx, double mu_high = 3.63, double mu_low = 3.03);
Table run_fig3(const Context& ctx);

// --- equivalence ranges ----------------------------------------------------

inline constexpr double kRangeMax = 39.5;
inline constexpr double kRangeMinTop01 = 0.5;   // Rk ~ P_top 0.1%
inline constexpr double kRangeMinTop001 = 1.0;  // Rk ~ P_top 0.01%

/// One evaluated unit: a single grid series or a union of several.
struct Fig4Group {
  std::string label;
  std::vector<std::size_t> parts;  // ensemble series indices
};

/// 75 single series (25 mu values x 3 sizes) plus 20 unions of
/// 2*max+mid size, 10 of 5*max and 10 of 10*max (2000/4000/8000 on the
/// default grid), all drawn from grid mu values >= mu_min: 115 units.
std::vector<Fig4Group> default_fig4_layout(const synth::Ensemble& ensemble, double mu_min = 2.22);

struct Fig4Row {
  std::string label;
  std::size_t n = 0;
  double mu = 0.0;  // mean mu of the parts
  double rk = 0.0;
  double ptop01 = 0.0;   // analytic P_top 0.1%
  double ptop001 = 0.0;  // analytic P_top 0.01%
  double ratio01 = 0.0;
  double ratio001 = 0.0;
  bool in_range01 = false;
  bool in_range001 = false;
  std::vector<std::uint64_t> rank1s;
  std::vector<std::string> parts;
};

std::vector<Fig4Row> compute_fig4(const Context& ctx, std::span<const Fig4Group> layout);

struct RangeSpread {
  double all = 0.0;       // max/min ratio over every row
  double in_range = 0.0;  // max/min ratio over rows inside the range
  std::size_t in_range_count = 0;
};

RangeSpread fig4_spread01(std::span<const Fig4Row> rows);
RangeSpread fig4_spread001(std::span<const Fig4Row> rows);

Table run_fig4(const Context& ctx, std::span<const Fig4Group> layout);

// --- dispatch --------------------------------------------------------------

struct RunOptions {
  std::size_t sample_size = 15;
  double fig4_mu_min = 2.22;
};

/// id is one of tables1 | fig1 | fig2 | fig3 | fig4.
Table run_experiment(std::string_view id, const Context& ctx, const RunOptions& options = {});

}  // namespace rkindex::experiments
