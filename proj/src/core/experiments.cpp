#include "rkindex/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "rkindex/error.hpp"
#include "rkindex/stats.hpp"

namespace rkindex::experiments {

namespace {

std::string join_ranks(std::span<const std::uint64_t> ranks) {
  std::string out;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(ranks[i]);
  }
  return out;
}

std::string join_labels(std::span<const std::string> labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ';';
    out += labels[i];
  }
  return out;
}

Json config_json(const synth::EnsembleConfig& c) {
  Json j = Json::object();
  j["mu_start"] = c.mu_start;
  j["mu_end"] = c.mu_end;
  j["mu_count"] = c.mu_count;
  j["sizes"] = c.sizes;
  j["sigma"] = c.sigma;
  j["seed"] = c.seed;
  return j;
}

/// Provenance block shared by every experiment report.
void stamp(Table& t, std::string_view id, const Context& ctx, Json parameters,
           std::string_view extra = {}) {
  const auto policy = ctx.world.tie_policy();
  const auto hash = run_hash(ctx.ensemble.config, ctx.params, policy,
                             std::string(id) + "\n" + std::string(extra));
  t.name = std::string(id) + "_" + hash;
  t.meta["experiment"] = std::string(id);
  t.meta["config_hash"] = hash;
  t.meta["seed"] = ctx.ensemble.config.seed;
  t.meta["tool_version"] = tool_version();
  t.meta["config"] = config_json(ctx.ensemble.config);
  t.meta["k"] = ctx.params.k;
  t.meta["offset"] = ctx.params.offset;
  t.meta["scale"] = ctx.params.scale;
  t.meta["tie_policy"] = std::string(ranks::to_string(policy));
  t.meta["world_size"] = ctx.world.size();
  t.meta["parameters"] = std::move(parameters);
}

ranks::TopKRanks unit_top(const Context& ctx, std::string_view label) {
  const auto pairs = ranks::dual_ranks(ctx.world, label);
  return ranks::top_k(std::string(label), pairs, ctx.params.k);
}

double gm_inverse(std::span<const std::uint64_t> rank1s, double offset) {
  std::vector<double> inv;
  inv.reserve(rank1s.size());
  for (auto r : rank1s) inv.push_back(1.0 / (offset + static_cast<double>(r)));
  return ranks::geometric_mean(inv);
}

double analytic_value(const synth::LognormalSpec& spec, double threshold) {
  return static_cast<double>(spec.n) * indicators::lognormal_survival(spec.mu, spec.sigma, threshold);
}

double checked_threshold(const ranks::WorldIndex& world, double x) {
  if (world.cutoff_rank(x) == 0)
    fail(Errc::invalid_argument, "top " + format_double(x) + "% of a " +
                                     std::to_string(world.size()) + "-paper world is empty");
  return indicators::world_threshold(world, x);
}

}  // namespace

ranks::WorldIndex build_world(const synth::Ensemble& ensemble, ranks::TiePolicy policy) {
  return ranks::WorldIndex::build(ensemble.series, policy);
}

void stamp_run(Table& table, std::string_view id, const Context& ctx, Json parameters,
               std::string_view extra) {
  stamp(table, id, ctx, std::move(parameters), extra);
}

std::string run_hash(const synth::EnsembleConfig& config, const indicators::RkParams& params,
                     ranks::TiePolicy policy, std::string_view extra) {
  std::string canon = config.canonical();
  canon += "k=" + std::to_string(params.k) + "\n";
  canon += "offset=" + format_double(params.offset) + "\n";
  canon += "scale=" + format_double(params.scale) + "\n";
  canon += "tie_policy=" + std::string(ranks::to_string(policy)) + "\n";
  canon += extra;
  return hex64(fnv1a64(canon));
}

std::vector<std::size_t> evenly_spaced(std::size_t count, std::size_t sample) {
  require(sample >= 1, "sample size must be >= 1");
  require(sample <= count, "sample size " + std::to_string(sample) + " exceeds " +
                               std::to_string(count) + " available items");
  if (sample == 1) return {0};
  std::vector<std::size_t> out;
  out.reserve(sample);
  for (std::size_t j = 0; j < sample; ++j) {
    const double pos = static_cast<double>(j) * static_cast<double>(count - 1) /
                       static_cast<double>(sample - 1);
    out.push_back(static_cast<std::size_t>(std::lround(pos)));
  }
  return out;
}

// --- rank tables -----------------------------------------------------------

std::vector<RankBlock> compute_table_s1(const Context& ctx, std::size_t sample_size) {
  const auto& ens = ctx.ensemble;
  std::vector<RankBlock> blocks;
  for (auto idx : evenly_spaced(ens.specs.size(), sample_size)) {
    const auto& spec = ens.specs[idx];
    auto top = unit_top(ctx, spec.label);
    RankBlock b{spec.label, spec.mu, spec.n, top.pairs, ranks::ratio_index(top),
                gm_inverse(top.rank1s(), 0.0)};
    blocks.push_back(std::move(b));
  }
  return blocks;
}

Table run_table_s1(const Context& ctx, std::size_t sample_size) {
  const auto blocks = compute_table_s1(ctx, sample_size);
  Table t;
  t.columns = {"label", "mu", "n", "rank2", "rank1", "value", "ratio", "gm_ratio", "gm_inv_rank1"};
  for (const auto& b : blocks) {
    for (const auto& p : b.pairs) {
      t.add_row({b.label, b.mu, static_cast<std::int64_t>(b.n), static_cast<std::int64_t>(p.rank2),
                 static_cast<std::int64_t>(p.rank1), p.value,
                 static_cast<double>(p.rank2) / static_cast<double>(p.rank1), b.ratio_index,
                 b.gm_inv_rank1});
    }
  }
  Json params = Json::object();
  params["sample_size"] = sample_size;
  params["sampling"] = "series indices round(j*(S-1)/(s-1)) in grid order";
  stamp(t, "tables1", ctx, std::move(params), "sample_size=" + std::to_string(sample_size));
  return t;
}

// --- 99-series selection ---------------------------------------------------

std::vector<std::string> select_99(const synth::Ensemble& ensemble) {
  const auto& cfg = ensemble.config;
  if (cfg.sizes.size() != 3)
    fail(Errc::invalid_argument,
         "99-series selection needs three series sizes per mu, grid has " +
             std::to_string(cfg.sizes.size()));
  if (cfg.mu_count < 33)
    fail(Errc::invalid_argument,
         "99-series selection needs at least 33 mu values, grid has " + std::to_string(cfg.mu_count));
  require(ensemble.specs.size() == cfg.mu_count * 3, "ensemble does not match its grid");
  std::vector<std::string> labels;
  labels.reserve(99);
  for (auto m : evenly_spaced(cfg.mu_count, 33))
    for (std::size_t s = 0; s < 3; ++s) labels.push_back(ensemble.specs[m * 3 + s].label);
  return labels;
}

// --- collapse --------------------------------------------------------------

std::vector<Fig1Row> compute_fig1(const Context& ctx) {
  const double t10 = checked_threshold(ctx.world, 10.0);
  const double t01 = checked_threshold(ctx.world, 0.1);
  std::vector<Fig1Row> rows;
  for (const auto& label : select_99(ctx.ensemble)) {
    const auto& spec = ctx.ensemble.spec(label);
    const auto top = unit_top(ctx, label);
    Fig1Row r;
    r.label = label;
    r.n = spec.n;
    r.mu = spec.mu;
    r.rank1s = top.rank1s();
    r.gm_inv_rank1 = gm_inverse(r.rank1s, 0.0);
    r.gm_inv_offset_rank1 = gm_inverse(r.rank1s, ctx.params.offset);
    r.rk = indicators::rk_from_rank1s(r.rank1s, ctx.params.offset, ctx.params.scale);
    r.ptop10 = analytic_value(spec, t10);
    r.ptop01 = analytic_value(spec, t01);
    rows.push_back(std::move(r));
  }
  return rows;
}

Table run_fig1(const Context& ctx) {
  const auto rows = compute_fig1(ctx);
  Table t;
  t.columns = {"label", "n", "mu", "gm_inv_rank1", "gm_inv_rank1_scaled", "gm_inv_offset_rank1",
               "rk", "ptop_10", "ptop_0.1", "rank1s"};
  std::vector<double> x0, x1, y;
  for (const auto& r : rows) {
    t.add_row({r.label, static_cast<std::int64_t>(r.n), r.mu, r.gm_inv_rank1,
               r.gm_inv_rank1 * ctx.params.scale, r.gm_inv_offset_rank1, r.rk, r.ptop10, r.ptop01,
               join_ranks(r.rank1s)});
    x0.push_back(r.gm_inv_rank1);
    x1.push_back(r.gm_inv_offset_rank1);
    y.push_back(r.ptop01);
  }
  Json params = Json::object();
  params["selection"] = "33 evenly spaced mu indices x 3 sizes";
  params["ptop_mode"] = "analytic";
  const auto lin = stats::fit_linear(x1, y);
  const auto quad = stats::fit_quadratic(x0, y);
  Json summary = Json::object();
  summary["r2_ptop01_on_gm_inv_offset_rank1"] = lin.r2;
  summary["quadratic_p_ptop01_on_gm_inv_rank1"] = quad.p_quadratic;
  params["summary"] = std::move(summary);
  stamp(t, "fig1", ctx, std::move(params));
  return t;
}

// --- stringency tiers ------------------------------------------------------

std::vector<Fig2Row> compute_fig2(const Context& ctx) {
  std::array<double, kTierPercentiles.size()> thresholds{};
  for (std::size_t i = 0; i < kTierPercentiles.size(); ++i)
    thresholds[i] = checked_threshold(ctx.world, kTierPercentiles[i]);

  std::vector<Fig2Row> rows;
  for (const auto& label : select_99(ctx.ensemble)) {
    const auto& spec = ctx.ensemble.spec(label);
    const auto top = unit_top(ctx, label);
    Fig2Row r;
    r.label = label;
    r.n = spec.n;
    r.mu = spec.mu;
    r.rank1s = top.rank1s();
    r.rk = indicators::rk_from_rank1s(r.rank1s, ctx.params.offset, ctx.params.scale);
    for (std::size_t i = 0; i < thresholds.size(); ++i) r.ptop[i] = analytic_value(spec, thresholds[i]);
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Fig2Row& a, const Fig2Row& b) {
    if (a.rk != b.rk) return a.rk > b.rk;
    return a.label < b.label;
  });
  const std::size_t per_tier = rows.size() / 3;
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].tier = std::min<std::size_t>(i / per_tier, 2);
  return rows;
}

std::vector<BranchSpread> branch_spreads(std::span<const Fig2Row> rows) {
  std::vector<BranchSpread> out;
  for (std::size_t tier = 0; tier < 3; ++tier) {
    std::map<std::size_t, std::vector<const Fig2Row*>, std::greater<>> branches;
    for (const auto& r : rows)
      if (r.tier == tier) branches[r.n].push_back(&r);
    for (std::size_t xi = 0; xi < kTierPercentiles.size(); ++xi) {
      BranchSpread s;
      s.tier = tier;
      s.x = kTierPercentiles[xi];
      for (const auto& [n, members] : branches) {
        std::vector<double> xs, ys;
        for (const auto* r : members) {
          xs.push_back(r->rk);
          ys.push_back(r->ptop[xi]);
        }
        s.sizes.push_back(n);
        s.slopes.push_back(stats::slope_through_origin(xs, ys));
      }
      s.spread = stats::spread(s.slopes);
      out.push_back(std::move(s));
    }
  }
  return out;
}

double merge_percentile(std::span<const BranchSpread> spreads, std::size_t tier) {
  double best_x = std::numeric_limits<double>::quiet_NaN();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : spreads) {
    if (s.tier != tier || !std::isfinite(s.spread)) continue;
    if (s.spread < best) {
      best = s.spread;
      best_x = s.x;
    }
  }
  return best_x;
}

Table run_fig2(const Context& ctx) {
  const auto rows = compute_fig2(ctx);
  Table t;
  t.columns = {"label", "n", "mu", "rk", "tier"};
  for (double x : kTierPercentiles) t.columns.push_back(indicators::ptop_column(x));
  t.columns.push_back("rank1s");
  for (const auto& r : rows) {
    std::vector<Cell> row{r.label, static_cast<std::int64_t>(r.n), r.mu, r.rk,
                          std::string(kTierNames[r.tier])};
    for (double v : r.ptop) row.emplace_back(v);
    row.emplace_back(join_ranks(r.rank1s));
    t.add_row(std::move(row));
  }
  const auto spreads = branch_spreads(rows);
  Json summary = Json::array();
  for (const auto& s : spreads) {
    Json e = Json::object();
    e["tier"] = std::string(kTierNames[s.tier]);
    e["x"] = s.x;
    e["sizes"] = s.sizes;
    e["slopes"] = s.slopes;
    e["spread"] = std::isfinite(s.spread) ? Json(s.spread) : Json(nullptr);
    summary.push_back(std::move(e));
  }
  Json merge = Json::object();
  for (std::size_t tier = 0; tier < 3; ++tier) {
    const double m = merge_percentile(spreads, tier);
    merge[std::string(kTierNames[tier])] = std::isfinite(m) ? Json(m) : Json(nullptr);
  }
  Json params = Json::object();
  params["selection"] = "33 evenly spaced mu indices x 3 sizes";
  params["tiers"] = "sorted by rk descending, 33/33/33";
  params["ptop_mode"] = "analytic";
  params["branch_spreads"] = std::move(summary);
  params["merge_percentile"] = std::move(merge);
  stamp(t, "fig2", ctx, std::move(params));
  return t;
}

// --- size / efficiency -----------------------------------------------------

Fig3Trace rank_trace(const Context& ctx, std::string_view label) {
  const auto top = unit_top(ctx, label);
  Fig3Trace trace;
  trace.label = std::string(label);
  for (const auto& s : ctx.ensemble.specs)
    if (s.label == label) {
      trace.mu = s.mu;
      trace.n = s.n;
    }
  trace.pairs = top.pairs;
  trace.rk = indicators::rk_index(top, ctx.params.offset, ctx.params.scale).rk;
  return trace;
}

std::array<std::string, 4> select_fig3(const synth::Ensemble& ensemble, double mu_high, double mu_low) {
  const auto& cfg = ensemble.config;
  require(!cfg.sizes.empty(), "grid has no sizes");
  const auto [min_it, max_it] = std::minmax_element(cfg.sizes.begin(), cfg.sizes.end());
  const std::size_t n_max = *max_it;
  const std::size_t n_min = *min_it;

  auto nearest_mu = [&](double target) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < cfg.mu_count; ++m)
      if (std::abs(cfg.mu_at(m) - target) < std::abs(cfg.mu_at(best) - target)) best = m;
    return best;
  };
  auto pick = [&](std::size_t mu_index, std::size_t n) -> std::string {
    for (std::size_t s = 0; s < cfg.sizes.size(); ++s)
      if (cfg.sizes[s] == n) return ensemble.specs[mu_index * cfg.sizes.size() + s].label;
    fail(Errc::invalid_argument, "no series of size " + std::to_string(n));
  };
  const auto hi = nearest_mu(mu_high);
  const auto lo = nearest_mu(mu_low);
  return {pick(hi, n_max), pick(hi, n_min), pick(lo, n_max), pick(lo, n_min)};
}

std::vector<Fig3Trace> compute_fig3(const Context& ctx, double mu_high, double mu_low) {
  std::vector<Fig3Trace> traces;
  for (const auto& label : select_fig3(ctx.ensemble, mu_high, mu_low))
    traces.push_back(rank_trace(ctx, label));
  return traces;
}

Table run_fig3(const Context& ctx) {
  const auto traces = compute_fig3(ctx);
  Table t;
  t.columns = {"label", "mu", "n", "rank2", "rank1", "value", "rk"};
  for (const auto& tr : traces)
    for (const auto& p : tr.pairs)
      t.add_row({tr.label, tr.mu, static_cast<std::int64_t>(tr.n), static_cast<std::int64_t>(p.rank2),
                 static_cast<std::int64_t>(p.rank1), p.value, tr.rk});
  Json params = Json::object();
  params["mu_targets"] = {3.63, 3.03};
  params["selection"] = "nearest grid mu; largest and smallest N of the grid";
  params["note"] =
      "two N values (largest, smallest) per mu are used; a legend listing three N values for "
      "four series is treated as a typo";
  stamp(t, "fig3", ctx, std::move(params));
  return t;
}

// --- equivalence ranges ----------------------------------------------------

std::vector<Fig4Group> default_fig4_layout(const synth::Ensemble& ensemble, double mu_min) {
  const auto& cfg = ensemble.config;
  if (cfg.sizes.size() != 3)
    fail(Errc::invalid_argument, "the default 115-series layout needs three sizes per mu");
  const std::size_t width = cfg.sizes.size();
  require(ensemble.specs.size() == cfg.mu_count * width, "ensemble does not match its grid");

  // Grid mu indices with mu >= mu_min (mu descends along the grid).
  std::size_t usable = 0;
  while (usable < cfg.mu_count && cfg.mu_at(usable) >= mu_min - 1e-9) ++usable;
  require(usable >= 25, "fewer than 25 grid mu values at or above mu_min = " + format_double(mu_min));

  // Position of the largest / middle size within each mu triple.
  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cfg.sizes[a] > cfg.sizes[b]; });
  const std::size_t big = order[0];
  const std::size_t mid = order[1];
  auto idx = [&](std::size_t m, std::size_t s) { return m * width + s; };

  std::vector<Fig4Group> layout;
  for (auto m : evenly_spaced(usable, 25))
    for (std::size_t s = 0; s < width; ++s)
      layout.push_back({ensemble.specs[idx(m, s)].label, {idx(m, s)}});

  auto add_unions = [&](std::size_t count, std::size_t span, auto&& parts_of, std::string_view tag) {
    require(usable >= span, "not enough mu values for unions of " + std::to_string(span));
    std::size_t serial = 0;
    for (auto m : evenly_spaced(usable - span + 1, count)) {
      Fig4Group g;
      g.parts = parts_of(m);
      std::size_t n = 0;
      for (auto p : g.parts) n += ensemble.specs[p].n;
      g.label = std::string(tag) + std::to_string(n) + "_" + std::to_string(serial++);
      layout.push_back(std::move(g));
    }
  };
  add_unions(20, 2, [&](std::size_t m) {
    return std::vector<std::size_t>{idx(m, big), idx(m + 1, big), idx(m, mid)};
  }, "u");
  add_unions(10, 5, [&](std::size_t m) {
    std::vector<std::size_t> p;
    for (std::size_t q = 0; q < 5; ++q) p.push_back(idx(m + q, big));
    return p;
  }, "u");
  add_unions(10, 10, [&](std::size_t m) {
    std::vector<std::size_t> p;
    for (std::size_t q = 0; q < 10; ++q) p.push_back(idx(m + q, big));
    return p;
  }, "u");
  return layout;
}

std::vector<Fig4Row> compute_fig4(const Context& ctx, std::span<const Fig4Group> layout) {
  const double t01 = checked_threshold(ctx.world, 0.1);
  const double t001 = checked_threshold(ctx.world, 0.01);
  std::vector<Fig4Row> rows;
  rows.reserve(layout.size());
  for (const auto& g : layout) {
    require(!g.parts.empty(), "layout group '" + g.label + "' has no parts");
    Fig4Row r;
    r.label = g.label;
    std::vector<std::size_t> positions;
    double mu_sum = 0.0;
    for (auto p : g.parts) {
      require(p < ctx.ensemble.specs.size(), "layout part index out of range");
      const auto& spec = ctx.ensemble.specs[p];
      const auto owned = ctx.world.positions_of(spec.label);
      positions.insert(positions.end(), owned.begin(), owned.end());
      r.n += spec.n;
      mu_sum += spec.mu;
      r.ptop01 += analytic_value(spec, t01);
      r.ptop001 += analytic_value(spec, t001);
      r.parts.push_back(spec.label);
    }
    r.mu = mu_sum / static_cast<double>(g.parts.size());
    const auto pairs = ranks::rank_pairs_at(ctx.world, positions);
    const auto top = ranks::top_k(g.label, pairs, ctx.params.k);
    r.rank1s = top.rank1s();
    r.rk = indicators::rk_from_rank1s(r.rank1s, ctx.params.offset, ctx.params.scale);
    r.ratio01 = r.rk / r.ptop01;
    r.ratio001 = r.rk / r.ptop001;
    r.in_range01 = r.rk >= kRangeMinTop01 && r.rk <= kRangeMax;
    r.in_range001 = r.rk >= kRangeMinTop001 && r.rk <= kRangeMax;
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

RangeSpread range_spread(std::span<const Fig4Row> rows, bool use01) {
  std::vector<double> all, inside;
  for (const auto& r : rows) {
    const double ratio = use01 ? r.ratio01 : r.ratio001;
    if (!std::isfinite(ratio) || ratio <= 0.0) continue;
    all.push_back(ratio);
    if (use01 ? r.in_range01 : r.in_range001) inside.push_back(ratio);
  }
  return {stats::spread(all), stats::spread(inside), inside.size()};
}

}  // namespace

RangeSpread fig4_spread01(std::span<const Fig4Row> rows) { return range_spread(rows, true); }
RangeSpread fig4_spread001(std::span<const Fig4Row> rows) { return range_spread(rows, false); }

Table run_fig4(const Context& ctx, std::span<const Fig4Group> layout) {
  const auto rows = compute_fig4(ctx, layout);
  Table t;
  t.columns = {"label", "n", "mu", "rk", "ptop_0.1", "ptop_0.01", "rk_over_ptop_0.1",
               "rk_over_ptop_0.01", "in_range_0.1", "in_range_0.01", "rank1s", "parts"};
  std::string layout_text;
  for (const auto& r : rows) {
    t.add_row({r.label, static_cast<std::int64_t>(r.n), r.mu, r.rk, r.ptop01, r.ptop001, r.ratio01,
               r.ratio001, static_cast<std::int64_t>(r.in_range01),
               static_cast<std::int64_t>(r.in_range001), join_ranks(r.rank1s), join_labels(r.parts)});
    layout_text += r.label + ":" + join_labels(r.parts) + "\n";
  }
  const auto s01 = fig4_spread01(rows);
  const auto s001 = fig4_spread001(rows);
  auto spread_json = [](const RangeSpread& s, double lo) {
    Json j = Json::object();
    j["range"] = {lo, kRangeMax};
    j["spread_all"] = std::isfinite(s.all) ? Json(s.all) : Json(nullptr);
    j["spread_in_range"] = std::isfinite(s.in_range) ? Json(s.in_range) : Json(nullptr);
    j["in_range_count"] = s.in_range_count;
    return j;
  };
  Json params = Json::object();
  params["series_count"] = rows.size();
  params["ptop_mode"] = "analytic (sum over union parts)";
  params["ptop_0.1"] = spread_json(s01, kRangeMinTop01);
  params["ptop_0.01"] = spread_json(s001, kRangeMinTop001);
  stamp(t, "fig4", ctx, std::move(params), layout_text);
  return t;
}

// --- dispatch --------------------------------------------------------------

Table run_experiment(std::string_view id, const Context& ctx, const RunOptions& options) {
  if (id == "tables1") return run_table_s1(ctx, options.sample_size);
  if (id == "fig1") return run_fig1(ctx);
  if (id == "fig2") return run_fig2(ctx);
  if (id == "fig3") return run_fig3(ctx);
  if (id == "fig4") {
    const auto layout = default_fig4_layout(ctx.ensemble, options.fig4_mu_min);
    return run_fig4(ctx, layout);
  }
  fail(Errc::invalid_argument,
       "unknown experiment '" + std::string(id) + "' (expected tables1|fig1|fig2|fig3|fig4)");
}

}  // namespace rkindex::experiments
