#include "rkindex/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "rkindex/error.hpp"

namespace rkindex::ingest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// RFC-4180 field split of one physical line. Returns nullopt on an
/// unterminated quote.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(field));
  return fields;
}

template <typename T>
std::optional<T> parse_integer(std::string_view text) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

bool is_country_code(std::string_view code) {
  return code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) {
           return c >= 'A' && c <= 'Z';
         });
}

YearRange parse_window(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != 2 ||
      !doc[key][0].is_number_integer() || !doc[key][1].is_number_integer())
    fail(Errc::parse_error, std::string("corpus meta: '") + key + "' must be [first_year, last_year]");
  YearRange r{doc[key][0].get<int>(), doc[key][1].get<int>()};
  if (r.first > r.last)
    fail(Errc::parse_error, std::string("corpus meta: '") + key + "' runs backwards");
  return r;
}

}  // namespace

std::string YearRange::text() const { return std::to_string(first) + "-" + std::to_string(last); }

CorpusMeta parse_meta(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    fail(Errc::parse_error, std::string("corpus meta: ") + e.what());
  }
  if (!doc.is_object()) fail(Errc::parse_error, "corpus meta must be a JSON object");
  CorpusMeta meta;
  if (doc.contains("field")) {
    if (!doc["field"].is_string()) fail(Errc::parse_error, "corpus meta: 'field' must be a string");
    meta.field = doc["field"].get<std::string>();
  }
  if (doc.contains("source")) {
    if (!doc["source"].is_string()) fail(Errc::parse_error, "corpus meta: 'source' must be a string");
    meta.source = doc["source"].get<std::string>();
  }
  meta.pub_window = parse_window(doc, "pub_window");
  meta.cit_window = parse_window(doc, "cit_window");
  return meta;
}

CorpusMeta load_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open corpus meta '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_meta(buf.str());
}

std::vector<std::string> check_windows(const CorpusMeta& meta) {
  std::vector<std::string> warnings;
  if (meta.cit_window.first != meta.pub_window.first + 5)
    warnings.push_back("citation window " + meta.cit_window.text() +
                       " does not start five years after the publication window " +
                       meta.pub_window.text());
  if (meta.cit_window.last - meta.cit_window.first != meta.pub_window.last - meta.pub_window.first)
    warnings.push_back("citation window " + meta.cit_window.text() +
                       " differs in length from the publication window " + meta.pub_window.text());
  return warnings;
}

std::vector<std::string> Corpus::countries_by_output() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records)
    for (const auto& c : r.countries) ++counts[c];
  std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  out.reserve(sorted.size());
  for (auto& [code, n] : sorted) out.push_back(code);
  return out;
}

Corpus parse_corpus(std::istream& in, std::optional<CorpusMeta> meta) {
  Corpus corpus;
  corpus.meta = std::move(meta);
  if (corpus.meta) corpus.warnings = check_windows(*corpus.meta);

  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse_error, "corpus file is empty (missing header)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv_line(line);
  if (!header) fail(Errc::parse_error, "corpus header: unterminated quote");
  std::vector<std::string> cols;
  for (const auto& h : *header) cols.emplace_back(trim(h));
  const std::vector<std::string> required{"id", "year", "citations", "countries"};
  const bool has_field = cols.size() == 5 && cols[4] == "field";
  if (cols.size() < 4 || !std::equal(required.begin(), required.end(), cols.begin()) ||
      (cols.size() == 5 && !has_field) || cols.size() > 5)
    fail(Errc::parse_error, "corpus header must be 'id,year,citations,countries[,field]', got '" +
                                line + "'");

  std::unordered_set<std::string> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    auto reject = [&](std::string message) {
      corpus.errors.push_back({line_no, std::move(message)});
    };

    const auto fields = split_csv_line(line);
    if (!fields) {
      reject("unterminated quote");
      continue;
    }
    if (fields->size() != cols.size()) {
      reject("expected " + std::to_string(cols.size()) + " columns, found " +
             std::to_string(fields->size()));
      continue;
    }

    PaperRecord rec;
    rec.id = std::string(trim((*fields)[0]));
    if (rec.id.empty()) {
      reject("empty id");
      continue;
    }

    const auto year = parse_integer<int>((*fields)[1]);
    if (!year) {
      reject("year '" + (*fields)[1] + "' is not an integer");
      continue;
    }
    rec.year = *year;

    const auto cit_text = trim((*fields)[2]);
    if (!cit_text.empty() && cit_text.front() == '-') {
      reject("negative citation count '" + std::string(cit_text) + "'");
      continue;
    }
    const auto citations = parse_integer<std::uint64_t>(cit_text);
    if (!citations) {
      reject("citations '" + std::string(cit_text) + "' is not a non-negative integer");
      continue;
    }
    rec.citations = *citations;

    std::string_view countries = (*fields)[3];
    bool bad_country = false;
    while (!countries.empty() || rec.countries.empty()) {
      const auto semi = countries.find(';');
      std::string code(trim(countries.substr(0, semi)));
      countries = semi == std::string_view::npos ? std::string_view{} : countries.substr(semi + 1);
      std::transform(code.begin(), code.end(), code.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      if (code.empty()) {
        if (countries.empty()) break;
        continue;
      }
      if (!is_country_code(code)) {
        reject("country '" + code + "' is not an ISO-3166 alpha-3 code");
        bad_country = true;
        break;
      }
      if (std::find(rec.countries.begin(), rec.countries.end(), code) == rec.countries.end())
        rec.countries.push_back(std::move(code));
    }
    if (bad_country) continue;
    if (rec.countries.empty()) {
      reject("empty country list");
      continue;
    }

    if (has_field) {
      auto f = std::string(trim((*fields)[4]));
      if (!f.empty()) rec.field = std::move(f);
    }

    if (corpus.meta && !corpus.meta->pub_window.contains(rec.year)) {
      reject("year " + std::to_string(rec.year) + " outside publication window " +
             corpus.meta->pub_window.text());
      continue;
    }
    if (!ids.insert(rec.id).second) {
      reject("duplicate id '" + rec.id + "'");
      continue;
    }
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::optional<CorpusMeta> meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open corpus file '" + path.string() + "'");
  return parse_corpus(in, std::move(meta));
}

std::string_view to_string(SplitKind kind) noexcept {
  return kind == SplitKind::domestic ? "domestic" : "collaborative";
}

SplitKind parse_split(std::string_view text) {
  if (text == "domestic") return SplitKind::domestic;
  if (text == "collaborative" || text == "international") return SplitKind::collaborative;
  fail(Errc::invalid_argument, "unknown split '" + std::string(text) + "' (expected domestic|collaborative)");
}

CountrySplit split_country(const Corpus& corpus, std::string_view country) {
  CountrySplit split{std::string(country), {}, {}};
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& cs = corpus.records[i].countries;
    if (std::find(cs.begin(), cs.end(), country) == cs.end()) continue;
    (cs.size() == 1 ? split.domestic : split.collaborative).push_back(i);
  }
  if (split.domestic.empty() && split.collaborative.empty())
    fail(Errc::unknown_label, "country '" + std::string(country) + "' does not appear in the corpus");
  return split;
}

std::vector<std::size_t> CorpusWorld::positions(std::span<const std::size_t> record_indices) const {
  std::vector<std::size_t> out;
  out.reserve(record_indices.size());
  for (auto i : record_indices) out.push_back(record_position.at(i));
  return out;
}

CorpusWorld build_corpus_world(const Corpus& corpus, ranks::TiePolicy policy) {
  if (corpus.records.empty()) fail(Errc::invalid_argument, "corpus is empty");
  // Member keys follow id order so equal citation counts break ties by id,
  // independently of file order and of any country labelling.
  std::vector<std::size_t> by_id(corpus.records.size());
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
    return corpus.records[a].id < corpus.records[b].id;
  });

  synth::CitationSeries all{"world", {}, synth::Origin::real};
  all.values.reserve(by_id.size());
  for (auto i : by_id) all.values.push_back(static_cast<double>(corpus.records[i].citations));

  CorpusWorld cw{ranks::WorldIndex::build(std::span(&all, 1), policy), {}};
  cw.record_position.resize(corpus.records.size());
  for (std::size_t key = 0; key < by_id.size(); ++key)
    cw.record_position[by_id[key]] = cw.world.position_of(0, key);
  return cw;
}

namespace {

AssessmentRow assess_unit(const Corpus& corpus, const CorpusWorld& cw, const std::string& country,
                          SplitKind kind, std::span<const std::size_t> records,
                          const AssessParams& params) {
  AssessmentRow row;
  row.country = country;
  row.split = kind;
  row.p = records.size();

  synth::CitationSeries unit{country + ":" + std::string(to_string(kind)), {}, synth::Origin::real};
  for (auto i : records) unit.values.push_back(static_cast<double>(corpus.records[i].citations));
  row.p0 = indicators::count_uncited(unit);

  const auto positions = cw.positions(records);
  row.ptop10 = indicators::count_in_top(cw.world, positions, 10.0);
  row.ptop10_over_p = row.p == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(row.ptop10) / static_cast<double>(row.p);
  if (row.p >= params.rk.k) {
    const auto pairs = ranks::rank_pairs_at(cw.world, positions);
    const auto top = ranks::top_k(unit.label, pairs, params.rk.k);
    row.rk = indicators::rk_index(top, params.rk.offset, params.rk.scale);
  }
  return row;
}

Cell rk_cell(const AssessmentRow& row) {
  if (row.rk) return row.rk->rk;
  return std::string("insufficient");
}

Cell ratio_cell(double v) {
  if (std::isnan(v)) return std::monostate{};
  return v;
}

void stamp_corpus(Table& t, const Corpus& corpus, const AssessParams& params, std::size_t world_size) {
  if (corpus.meta) {
    t.meta["field"] = corpus.meta->field;
    t.meta["pub_window"] = corpus.meta->pub_window.text();
    t.meta["cit_window"] = corpus.meta->cit_window.text();
    t.meta["source"] = corpus.meta->source;
  }
  t.meta["seed"] = nullptr;
  t.meta["tool_version"] = tool_version();
  t.meta["k"] = params.rk.k;
  t.meta["offset"] = params.rk.offset;
  t.meta["scale"] = params.rk.scale;
  t.meta["tie_policy"] = std::string(ranks::to_string(params.tie_policy));
  t.meta["world_size"] = world_size;
  t.meta["rows_rejected"] = corpus.errors.size();
}

std::string corpus_hash(const Corpus& corpus, const AssessParams& params, std::string_view extra) {
  std::string canon;
  for (const auto& r : corpus.records) {
    canon += r.id + "," + std::to_string(r.year) + "," + std::to_string(r.citations) + ",";
    for (const auto& c : r.countries) canon += c + ";";
    canon += "\n";
  }
  canon += "k=" + std::to_string(params.rk.k) + "\noffset=" + format_double(params.rk.offset) +
           "\nscale=" + format_double(params.rk.scale) + "\ntie_policy=" +
           std::string(ranks::to_string(params.tie_policy)) + "\n";
  canon += extra;
  return hex64(fnv1a64(canon));
}

}  // namespace

std::vector<AssessmentRow> assess(const Corpus& corpus, std::span<const std::string> countries,
                                  const AssessParams& params) {
  params.rk.validate();
  const auto cw = build_corpus_world(corpus, params.tie_policy);
  std::vector<AssessmentRow> rows;
  rows.reserve(countries.size() * 2);
  for (const auto& country : countries) {
    const auto split = split_country(corpus, country);
    rows.push_back(assess_unit(corpus, cw, country, SplitKind::domestic, split.domestic, params));
    rows.push_back(
        assess_unit(corpus, cw, country, SplitKind::collaborative, split.collaborative, params));
  }
  return rows;
}

Table assessment_table(const Corpus& corpus, std::span<const AssessmentRow> rows,
                       const AssessParams& params) {
  Table t;
  t.columns = {"country"};
  for (auto kind : {SplitKind::domestic, SplitKind::collaborative}) {
    const std::string prefix(to_string(kind));
    for (const char* c : {"_P", "_P0", "_Ptop10", "_Ptop10_over_P", "_Rk"}) t.columns.push_back(prefix + c);
  }
  std::map<std::string, std::vector<Cell>> by_country;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    auto [it, inserted] = by_country.try_emplace(r.country);
    if (inserted) {
      order.push_back(r.country);
      it->second.assign(t.columns.size(), std::monostate{});
      it->second[0] = r.country;
    }
    const std::size_t base = r.split == SplitKind::domestic ? 1 : 6;
    it->second[base] = static_cast<std::int64_t>(r.p);
    it->second[base + 1] = static_cast<std::int64_t>(r.p0);
    it->second[base + 2] = static_cast<std::int64_t>(r.ptop10);
    it->second[base + 3] = ratio_cell(r.ptop10_over_p);
    it->second[base + 4] = rk_cell(r);
  }
  for (const auto& c : order) t.add_row(by_country[c]);
  stamp_corpus(t, corpus, params, corpus.size());
  t.name = "assess_" + corpus_hash(corpus, params, "wide");
  return t;
}

Table assessment_long_table(const Corpus& corpus, std::span<const AssessmentRow> rows,
                            const AssessParams& params) {
  Table t;
  t.columns = {"country", "split", "P", "P0", "ptop10", "ptop10_over_P", "rk"};
  const bool fractional = params.local_share > 0.0;
  if (fractional) t.columns.push_back("rk_fractional");
  for (const auto& r : rows) {
    std::vector<Cell> row{r.country, std::string(to_string(r.split)), static_cast<std::int64_t>(r.p),
                          static_cast<std::int64_t>(r.p0), static_cast<std::int64_t>(r.ptop10),
                          ratio_cell(r.ptop10_over_p), rk_cell(r)};
    if (fractional) {
      if (r.rk) row.emplace_back(indicators::fractional_rk(*r.rk, params.local_share));
      else row.emplace_back(std::string("insufficient"));
    }
    t.add_row(std::move(row));
  }
  stamp_corpus(t, corpus, params, corpus.size());
  if (fractional) {
    t.meta["local_share"] = params.local_share;
    t.meta["fractional_rk"] = "experimental";
  }
  t.name = "rk_" + corpus_hash(corpus, params, "long");
  return t;
}

Table temporal_table(std::span<const Corpus> corpora, std::span<const std::string> countries,
                     const AssessParams& params) {
  require(!corpora.empty(), "temporal table needs at least one corpus");
  Table t;
  t.columns = {"country"};
  std::vector<std::string> windows;
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    const auto w = corpora[i].meta ? corpora[i].meta->pub_window.text() : "corpus" + std::to_string(i + 1);
    windows.push_back(w);
    t.columns.push_back("P_" + w);
    t.columns.push_back("Rk_" + w);
  }
  std::vector<std::vector<AssessmentRow>> per_corpus;
  for (const auto& corpus : corpora) {
    const auto cw = build_corpus_world(corpus, params.tie_policy);
    std::vector<AssessmentRow> rows;
    for (const auto& country : countries) {
      const auto split = split_country(corpus, country);
      rows.push_back(assess_unit(corpus, cw, country, SplitKind::domestic, split.domestic, params));
    }
    per_corpus.push_back(std::move(rows));
  }
  for (std::size_t c = 0; c < countries.size(); ++c) {
    std::vector<Cell> row{countries[c]};
    for (const auto& rows : per_corpus) {
      row.emplace_back(static_cast<std::int64_t>(rows[c].p));
      row.emplace_back(rk_cell(rows[c]));
    }
    t.add_row(std::move(row));
  }
  stamp_corpus(t, corpora.front(), params, corpora.front().size());
  t.meta["windows"] = windows;
  std::string extra = "temporal";
  for (const auto& corpus : corpora) extra += corpus_hash(corpus, params, "");
  t.name = "temporal_" + hex64(fnv1a64(extra));
  return t;
}

Table unit_indicator_table(const Corpus& corpus, std::span<const std::string> countries,
                           std::span<const SplitKind> splits, const AssessParams& params,
                           std::span<const double> xs) {
  params.rk.validate();
  const auto cw = build_corpus_world(corpus, params.tie_policy);
  Table t;
  t.columns = {"label", "P", "P0"};
  for (double x : xs) t.columns.push_back(indicators::ptop_column(x));
  t.columns.push_back("rk");
  for (const auto& country : countries) {
    const auto split = split_country(corpus, country);
    for (auto kind : splits) {
      const auto& records = split.of(kind);
      const auto row = assess_unit(corpus, cw, country, kind, records, params);
      const auto positions = cw.positions(records);
      std::vector<Cell> cells{country + ":" + std::string(to_string(kind)),
                              static_cast<std::int64_t>(row.p), static_cast<std::int64_t>(row.p0)};
      for (double x : xs)
        cells.emplace_back(static_cast<std::int64_t>(indicators::count_in_top(cw.world, positions, x)));
      cells.push_back(rk_cell(row));
      t.add_row(std::move(cells));
    }
  }
  stamp_corpus(t, corpus, params, corpus.size());
  t.meta["ptop_mode"] = "empirical";
  t.name = "ptop_" + corpus_hash(corpus, params, "units");
  return t;
}

Table unit_rank_table(const Corpus& corpus, std::string_view country, SplitKind split,
                      const AssessParams& params) {
  const auto cw = build_corpus_world(corpus, params.tie_policy);
  const auto s = split_country(corpus, country);
  const auto pairs = ranks::rank_pairs_at(cw.world, cw.positions(s.of(split)));
  const std::string label = std::string(country) + ":" + std::string(to_string(split));
  const auto top = ranks::top_k(label, pairs, params.rk.k);
  Table t;
  t.columns = {"label", "rank2", "rank1", "value"};
  for (const auto& p : top.pairs)
    t.add_row({label, static_cast<std::int64_t>(p.rank2), static_cast<std::int64_t>(p.rank1), p.value});
  stamp_corpus(t, corpus, params, corpus.size());
  t.name = "ranks_" + corpus_hash(corpus, params, label);
  return t;
}

}  // namespace rkindex::ingest
