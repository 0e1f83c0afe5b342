#include "rkindex/rankcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "rkindex/error.hpp"

namespace rkindex::ranks {

std::string_view to_string(TiePolicy policy) noexcept {
  return policy == TiePolicy::ordinal ? "ordinal" : "min";
}

TiePolicy parse_tie_policy(std::string_view text) {
  if (text == "ordinal") return TiePolicy::ordinal;
  if (text == "min" || text == "min_rank" || text == "competition") return TiePolicy::min_rank;
  fail(Errc::invalid_argument, "unknown tie policy '" + std::string(text) + "' (expected ordinal|min)");
}

WorldIndex WorldIndex::build(std::span<const synth::CitationSeries> series, TiePolicy policy) {
  WorldIndex world;
  world.policy_ = policy;

  std::unordered_map<std::string_view, std::uint32_t> seen;
  std::size_t total = 0;
  for (const auto& s : series) {
    require(!s.label.empty(), "series label must be non-empty");
    if (!seen.emplace(s.label, static_cast<std::uint32_t>(world.labels_.size())).second)
      fail(Errc::invalid_argument, "duplicate series label '" + s.label + "'");
    world.labels_.push_back(s.label);
    total += s.size();
  }
  require(total > 0, "cannot build a world from empty series");

  world.entries_.reserve(total);
  for (std::uint32_t owner = 0; owner < series.size(); ++owner) {
    const auto& values = series[owner].values;
    for (std::uint64_t m = 0; m < values.size(); ++m) {
      require(std::isfinite(values[m]), "non-finite citation value in series '" +
                                            series[owner].label + "'");
      world.entries_.push_back({values[m], owner, m});
    }
  }

  const auto& labels = world.labels_;
  std::sort(world.entries_.begin(), world.entries_.end(),
            [&labels](const WorldEntry& a, const WorldEntry& b) {
              if (a.value != b.value) return a.value > b.value;
              if (a.owner != b.owner) {
                const int c = labels[a.owner].compare(labels[b.owner]);
                if (c != 0) return c < 0;
              }
              return a.member_key < b.member_key;
            });

  world.rank1_.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    if (policy == TiePolicy::min_rank && i > 0 &&
        world.entries_[i].value == world.entries_[i - 1].value) {
      world.rank1_[i] = world.rank1_[i - 1];
    } else {
      world.rank1_[i] = i + 1;
    }
  }

  world.owned_positions_.resize(series.size());
  world.member_positions_.resize(series.size());
  for (std::size_t o = 0; o < series.size(); ++o) {
    world.owned_positions_[o].reserve(series[o].size());
    world.member_positions_[o].resize(series[o].size());
  }
  for (std::size_t pos = 0; pos < total; ++pos) {
    const auto& e = world.entries_[pos];
    world.owned_positions_[e.owner].push_back(pos);
    world.member_positions_[e.owner][e.member_key] = pos;
  }
  return world;
}

std::optional<std::uint32_t> WorldIndex::find_owner(std::string_view label) const {
  for (std::uint32_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

std::uint32_t WorldIndex::owner_index(std::string_view label) const {
  if (auto o = find_owner(label)) return *o;
  fail(Errc::unknown_label, "label '" + std::string(label) + "' is not in the world list");
}

std::span<const std::size_t> WorldIndex::positions_of(std::uint32_t owner) const {
  require(owner < owned_positions_.size(), "owner index out of range");
  return owned_positions_[owner];
}

std::span<const std::size_t> WorldIndex::positions_of(std::string_view label) const {
  return positions_of(owner_index(label));
}

std::size_t WorldIndex::position_of(std::uint32_t owner, std::uint64_t member_key) const {
  require(owner < member_positions_.size(), "owner index out of range");
  require(member_key < member_positions_[owner].size(), "member key out of range");
  return member_positions_[owner][member_key];
}

std::size_t WorldIndex::cutoff_rank(double x_percent) const {
  return ranks::cutoff_rank(size(), x_percent);
}

std::size_t cutoff_rank(std::size_t world_size, double x_percent) {
  require(x_percent > 0.0 && x_percent <= 100.0, "percentile x must lie in (0, 100]");
  // The epsilon absorbs binary rounding of decimal x (0.1 * 280000 / 100 = 280).
  const double raw = x_percent * static_cast<double>(world_size) / 100.0;
  const auto cut = static_cast<std::size_t>(std::floor(raw + 1e-9));
  return std::min(cut, world_size);
}

std::vector<std::uint64_t> TopKRanks::rank1s() const {
  std::vector<std::uint64_t> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.rank1);
  return out;
}

std::vector<RankPair> rank_pairs_at(const WorldIndex& world, std::span<const std::size_t> positions) {
  std::vector<std::size_t> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  const auto entries = world.entries();
  std::vector<RankPair> pairs;
  pairs.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    require(sorted[i] < world.size(), "world position out of range");
    const double value = entries[sorted[i]].value;
    std::uint64_t rank2 = i + 1;
    if (world.tie_policy() == TiePolicy::min_rank && i > 0 && value == pairs.back().value)
      rank2 = pairs.back().rank2;
    pairs.push_back({world.rank1_at(sorted[i]), rank2, value});
  }
  return pairs;
}

std::vector<RankPair> dual_ranks(const WorldIndex& world, std::string_view label) {
  return rank_pairs_at(world, world.positions_of(label));
}

TopKRanks top_k(std::string label, std::span<const RankPair> pairs, std::size_t k) {
  require(k >= 1, "k must be >= 1");
  if (pairs.size() < k)
    fail(Errc::insufficient_papers, "unit '" + label + "' has " + std::to_string(pairs.size()) +
                                        " papers, " + std::to_string(k) + " required");
  std::vector<RankPair> sorted(pairs.begin(), pairs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const RankPair& a, const RankPair& b) {
    if (a.rank2 != b.rank2) return a.rank2 < b.rank2;
    return a.rank1 < b.rank1;
  });
  sorted.resize(k);
  return {std::move(label), k, std::move(sorted)};
}

double geometric_mean(std::span<const double> xs) {
  require(!xs.empty(), "geometric mean of an empty list");
  // Kahan-compensated sum of logs; the product itself would underflow for
  // long lists of small ratios.
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    require(x > 0.0 && std::isfinite(x), "geometric mean needs finite positive values");
    const double y = std::log(x) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::exp(sum / static_cast<double>(xs.size()));
}

double ratio_index(const TopKRanks& top) {
  require(!top.pairs.empty(), "ratio index of an empty rank set");
  std::vector<double> ratios;
  ratios.reserve(top.pairs.size());
  for (const auto& p : top.pairs) {
    require(p.rank1 >= 1 && p.rank2 >= 1, "ranks are 1-based");
    ratios.push_back(static_cast<double>(p.rank2) / static_cast<double>(p.rank1));
  }
  return geometric_mean(ratios);
}

Table rank_table(const WorldIndex& world, std::span<const std::string> labels, std::size_t k) {
  Table t;
  t.name = "ranks";
  t.columns = {"label", "rank2", "rank1", "value"};
  t.meta["k"] = k;
  t.meta["tie_policy"] = std::string(to_string(world.tie_policy()));
  t.meta["world_size"] = world.size();
  for (const auto& label : labels) {
    const auto pairs = dual_ranks(world, label);
    const auto top = top_k(label, pairs, std::min(k, pairs.size()));
    for (const auto& p : top.pairs)
      t.add_row({label, static_cast<std::int64_t>(p.rank2), static_cast<std::int64_t>(p.rank1), p.value});
  }
  return t;
}

}  // namespace rkindex::ranks
