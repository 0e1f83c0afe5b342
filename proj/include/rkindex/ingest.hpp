#pragma once

// Real paper-level citation records: loading, country splits and
// assessment tables.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rkindex/indicators.hpp"
#include "rkindex/rankcore.hpp"
#include "rkindex/table.hpp"

namespace rkindex::ingest {

struct PaperRecord {
  std::string id;
  int year = 0;
  std::uint64_t citations = 0;
  std::vector<std::string> countries;  // deduplicated, first-seen order
  std::optional<std::string> field;
};

struct YearRange {
  int first = 0;
  int last = 0;

  bool contains(int year) const noexcept { return year >= first && year <= last; }
  std::string text() const;
};

struct CorpusMeta {
  std::string field;
  YearRange pub_window;
  YearRange cit_window;
  std::string source;
};

/// {field, pub_window: [y1, y2], cit_window: [y1, y2], source}
CorpusMeta parse_meta(std::string_view json_text);
CorpusMeta load_meta(const std::filesystem::path& path);

/// Warnings for a citation window that is not the publication window
/// displaced five years. Never fatal.
std::vector<std::string> check_windows(const CorpusMeta& meta);

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct Corpus {
  std::optional<CorpusMeta> meta;
  std::vector<PaperRecord> records;
  std::vector<RowError> errors;  // rejected rows; the rest still load
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return records.size(); }

  /// Country codes ordered by paper count (descending), ties by code.
  std::vector<std::string> countries_by_output() const;
};

/// CSV with header id,year,citations,countries[,field]; countries are
/// semicolon-separated ISO-3166 alpha-3 codes. A bad header is fatal
/// (parse_error); bad rows are collected in Corpus::errors.
Corpus parse_corpus(std::istream& in, std::optional<CorpusMeta> meta = std::nullopt);
Corpus load_corpus(const std::filesystem::path& path, std::optional<CorpusMeta> meta = std::nullopt);

enum class SplitKind { domestic, collaborative };

std::string_view to_string(SplitKind kind) noexcept;
SplitKind parse_split(std::string_view text);

/// Papers whose only country is `country` (domestic) and papers listing it
/// with at least one other country (collaborative). Indices into
/// Corpus::records.
struct CountrySplit {
  std::string country;
  std::vector<std::size_t> domestic;
  std::vector<std::size_t> collaborative;

  const std::vector<std::size_t>& of(SplitKind kind) const {
    return kind == SplitKind::domestic ? domestic : collaborative;
  }
};

CountrySplit split_country(const Corpus& corpus, std::string_view country);

/// World list over every paper of a corpus; tie order among equal citation
/// counts follows paper id.
struct CorpusWorld {
  ranks::WorldIndex world;
  std::vector<std::size_t> record_position;  // world position of records[i]

  std::vector<std::size_t> positions(std::span<const std::size_t> record_indices) const;
};

CorpusWorld build_corpus_world(const Corpus& corpus,
                               ranks::TiePolicy policy = ranks::TiePolicy::ordinal);

struct AssessParams {
  indicators::RkParams rk{};
  ranks::TiePolicy tie_policy = ranks::TiePolicy::ordinal;
  double local_share = 0.0;  // > 0 adds the experimental fractional Rk
};

struct AssessmentRow {
  std::string country;
  SplitKind split = SplitKind::domestic;
  std::size_t p = 0;
  std::size_t p0 = 0;
  std::size_t ptop10 = 0;
  double ptop10_over_p = 0.0;  // NaN when p = 0
  std::optional<indicators::RkResult> rk;  // empty: fewer than k papers
};

std::vector<AssessmentRow> assess(const Corpus& corpus, std::span<const std::string> countries,
                                  const AssessParams& params = {});

/// Country-per-row layout with domestic and collaborative column groups
/// (P, P0, P_top 10%, P_top 10%/P, Rk-index).
Table assessment_table(const Corpus& corpus, std::span<const AssessmentRow> rows,
                       const AssessParams& params);

/// One row per country x split: country,split,P,P0,ptop10,ptop10_over_P,rk.
Table assessment_long_table(const Corpus& corpus, std::span<const AssessmentRow> rows,
                            const AssessParams& params);

/// P and Rk-index of domestic papers for each corpus (one per publication
/// window), one row per country.
Table temporal_table(std::span<const Corpus> corpora, std::span<const std::string> countries,
                     const AssessParams& params);

/// label,P,P0,ptop_<x>...,rk with labels "<country>:<split>", empirical
/// percentiles only.
Table unit_indicator_table(const Corpus& corpus, std::span<const std::string> countries,
                           std::span<const SplitKind> splits, const AssessParams& params,
                           std::span<const double> xs);

/// label,rank2,rank1,value for the top k papers of one country split.
Table unit_rank_table(const Corpus& corpus, std::string_view country, SplitKind split,
                      const AssessParams& params);

}  // namespace rkindex::ingest
