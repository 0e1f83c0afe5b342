#pragma once

// Global world list and dual ranks.
//
// Rank 1 is a paper's 1-based position in the citation-descending world list;
// Rank 2 is its position within its own unit's list.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rkindex/synthdist.hpp"
#include "rkindex/table.hpp"

namespace rkindex::ranks {

/// ordinal: value desc, then owner label, then member key; every paper gets a
/// distinct rank. min_rank: equal values share the smallest rank of the tie
/// group (competition ranking, "1224").
enum class TiePolicy { ordinal, min_rank };

std::string_view to_string(TiePolicy policy) noexcept;
TiePolicy parse_tie_policy(std::string_view text);

struct WorldEntry {
  double value = 0.0;
  std::uint32_t owner = 0;       // index into WorldIndex::labels()
  std::uint64_t member_key = 0;  // position of the paper inside its series
};

/// Immutable, citation-descending list of every paper of every series.
class WorldIndex {
 public:
  static WorldIndex build(std::span<const synth::CitationSeries> series,
                          TiePolicy policy = TiePolicy::ordinal);

  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const WorldEntry> entries() const noexcept { return entries_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  TiePolicy tie_policy() const noexcept { return policy_; }

  /// 1-based Rank 1 of the entry at world position `pos` (0-based).
  std::uint64_t rank1_at(std::size_t pos) const { return rank1_[pos]; }

  std::optional<std::uint32_t> find_owner(std::string_view label) const;
  std::uint32_t owner_index(std::string_view label) const;  // throws unknown_label

  /// World positions of the owner's papers, ascending (i.e. in world order).
  std::span<const std::size_t> positions_of(std::uint32_t owner) const;
  std::span<const std::size_t> positions_of(std::string_view label) const;

  /// World position of paper `member_key` of `owner`.
  std::size_t position_of(std::uint32_t owner, std::uint64_t member_key) const;

  /// floor(x/100 * W): the last Rank 1 inside the world's top x%.
  std::size_t cutoff_rank(double x_percent) const;

 private:
  std::vector<WorldEntry> entries_;
  std::vector<std::uint64_t> rank1_;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> owned_positions_;
  std::vector<std::vector<std::size_t>> member_positions_;
  TiePolicy policy_ = TiePolicy::ordinal;
};

/// Shared cutoff arithmetic, also used where no WorldIndex exists.
std::size_t cutoff_rank(std::size_t world_size, double x_percent);

struct RankPair {
  std::uint64_t rank1 = 0;
  std::uint64_t rank2 = 0;
  double value = 0.0;
};

struct TopKRanks {
  std::string label;
  std::size_t k = 0;
  std::vector<RankPair> pairs;

  std::vector<std::uint64_t> rank1s() const;
};

std::vector<RankPair> dual_ranks(const WorldIndex& world, std::string_view label);

/// Rank pairs for an arbitrary unit given as world positions (any order).
/// Rank 2 is local: position among the unit's papers, or the competition rank
/// among them under min_rank.
std::vector<RankPair> rank_pairs_at(const WorldIndex& world, std::span<const std::size_t> positions);

/// The k pairs with the smallest Rank 2. Fewer than k papers is an
/// insufficient_papers error, never a silent truncation.
TopKRanks top_k(std::string label, std::span<const RankPair> pairs, std::size_t k);

/// exp(mean(log x)); all x must be > 0.
double geometric_mean(std::span<const double> xs);

/// Geometric mean of Rank 2 / Rank 1 over the top-k pairs.
double ratio_index(const TopKRanks& top);

/// label,rank2,rank1,value for the top k papers of each label.
Table rank_table(const WorldIndex& world, std::span<const std::string> labels, std::size_t k);

}  // namespace rkindex::ranks
