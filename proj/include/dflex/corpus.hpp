#pragma once
// Time-indexed patent citation graph: ingestion, forward/backward adjacency,
// successor partitions and long-horizon citation counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dflex/csv.hpp"
#include "dflex/date.hpp"
#include "dflex/error.hpp"

namespace dflex {

using PatentIndex = std::uint32_t;

struct PatentRecord {
  std::string patent_id;
  std::optional<DayNumber> grant_date;
  std::string group_code;
  long long novelty_count = 0;  // K
  bool is_focal = false;
  std::optional<bool> case_label;
  bool implicit = false;  // materialized from a citation referencing an unknown id
};

struct SuccessorCounts {
  long long F = 0;
  long long N_i = 0;
  long long N_j = 0;
  long long N_k = 0;
};

struct LoadStats {
  std::size_t duplicate_edges = 0;
  std::size_t self_citation_edges = 0;   // rejected with a warning count
  std::size_t implicit_records = 0;      // citers/cited ids absent from the patents file
  std::size_t duplicate_records = 0;     // identical repeated rows, stored once
  std::size_t undated_citers_seen = 0;   // filled by assemble_scores
};

// Immutable after build; concurrent read-only queries are safe.
class CitationCorpus {
 public:
  std::size_t size() const { return records_.size(); }
  const PatentRecord& record(PatentIndex i) const { return records_[i]; }

  std::optional<PatentIndex> find(const std::string& id) const {
    auto it = id_index_.find(id);
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
  }

  // Patents citing i (forward citations of i).
  std::span<const PatentIndex> citers_of(PatentIndex i) const {
    return {fwd_dst_.data() + fwd_off_[i], fwd_dst_.data() + fwd_off_[i + 1]};
  }
  // Patents that i cites (prior art of i).
  std::span<const PatentIndex> cited_by(PatentIndex i) const {
    return {bwd_dst_.data() + bwd_off_[i], bwd_dst_.data() + bwd_off_[i + 1]};
  }

  std::size_t edge_count() const { return fwd_dst_.size(); }
  const LoadStats& stats() const { return stats_; }
  LoadStats& stats() { return stats_; }

 private:
  friend class CorpusBuilder;
  std::vector<PatentRecord> records_;
  std::unordered_map<std::string, PatentIndex> id_index_;
  std::vector<std::uint64_t> fwd_off_, bwd_off_;
  std::vector<PatentIndex> fwd_dst_, bwd_dst_;
  LoadStats stats_;
};

class CorpusBuilder {
 public:
  // Identical duplicate rows are collapsed; conflicting duplicates are an error.
  void add_patent(PatentRecord rec, const std::string& context = {}) {
    auto it = ids_.find(rec.patent_id);
    if (it != ids_.end()) {
      PatentRecord& old = records_[it->second];
      if (old.implicit) {
        // Explicit row supersedes the placeholder created from an edge.
        old = std::move(rec);
        --stats_.implicit_records;
        return;
      }
      if (old.grant_date == rec.grant_date && old.group_code == rec.group_code &&
          old.novelty_count == rec.novelty_count && old.is_focal == rec.is_focal &&
          old.case_label == rec.case_label) {
        ++stats_.duplicate_records;
        return;
      }
      throw DataError(context + "duplicate patent_id `" + rec.patent_id +
                      "` with conflicting fields");
    }
    ids_.emplace(rec.patent_id, static_cast<PatentIndex>(records_.size()));
    records_.push_back(std::move(rec));
  }

  void add_citation(const std::string& citing, const std::string& cited) {
    if (citing == cited) {
      ++stats_.self_citation_edges;
      return;
    }
    edges_.emplace_back(intern(citing), intern(cited));
  }

  CitationCorpus build() {
    CitationCorpus c;
    c.records_ = std::move(records_);
    c.id_index_ = std::move(ids_);
    c.stats_ = stats_;

    std::sort(edges_.begin(), edges_.end());
    auto last = std::unique(edges_.begin(), edges_.end());
    c.stats_.duplicate_edges = static_cast<std::size_t>(edges_.end() - last);
    edges_.erase(last, edges_.end());

    const std::size_t n = c.records_.size();
    c.fwd_off_.assign(n + 1, 0);
    c.bwd_off_.assign(n + 1, 0);
    for (auto& [citing, cited] : edges_) {
      ++c.bwd_off_[citing + 1];
      ++c.fwd_off_[cited + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      c.fwd_off_[i + 1] += c.fwd_off_[i];
      c.bwd_off_[i + 1] += c.bwd_off_[i];
    }
    c.fwd_dst_.resize(edges_.size());
    c.bwd_dst_.resize(edges_.size());
    std::vector<std::uint64_t> fpos(c.fwd_off_.begin(), c.fwd_off_.end() - 1);
    std::vector<std::uint64_t> bpos(c.bwd_off_.begin(), c.bwd_off_.end() - 1);
    for (auto& [citing, cited] : edges_) {
      c.fwd_dst_[fpos[cited]++] = citing;
      c.bwd_dst_[bpos[citing]++] = cited;
    }
    edges_.clear();
    return c;
  }

 private:
  PatentIndex intern(const std::string& id) {
    auto it = ids_.find(id);
    if (it != ids_.end()) return it->second;
    PatentIndex idx = static_cast<PatentIndex>(records_.size());
    PatentRecord rec;
    rec.patent_id = id;
    rec.is_focal = false;
    rec.implicit = true;
    records_.push_back(std::move(rec));
    ids_.emplace(id, idx);
    ++stats_.implicit_records;
    return idx;
  }

  std::vector<PatentRecord> records_;
  std::unordered_map<std::string, PatentIndex> ids_;
  std::vector<std::pair<PatentIndex, PatentIndex>> edges_;
  LoadStats stats_;
};

inline bool parse_bool_field(const std::string& path, const CsvRow& row, std::size_t col,
                             const std::string& col_name) {
  const std::string& s = row.fields[col];
  if (s == "0") return false;
  if (s == "1") return true;
  throw DataError(path + ":" + std::to_string(row.line_no) + ": column `" + col_name +
                  "`: expected 0 or 1, got `" + s + "`");
}

// patents file: patent_id,grant_date,group_code,novelty_count,is_focal,case_label
// citations file: citing_id,cited_id
inline CitationCorpus load_corpus(const std::string& patents_file,
                                  const std::string& citations_file) {
  CorpusBuilder b;
  read_csv(patents_file,
           {"patent_id", "grant_date", "group_code", "novelty_count", "is_focal", "case_label"},
           [&](const CsvRow& row) {
             PatentRecord rec;
             rec.patent_id = row.fields[0];
             if (rec.patent_id.empty())
               throw DataError(patents_file + ":" + std::to_string(row.line_no) +
                               ": column `patent_id`: empty id");
             if (!row.fields[1].empty()) {
               auto d = parse_date(row.fields[1]);
               if (!d)
                 throw DataError(patents_file + ":" + std::to_string(row.line_no) +
                                 ": column `grant_date`: unparsable date `" + row.fields[1] + "`");
               rec.grant_date = *d;
             }
             rec.group_code = row.fields[2];
             rec.novelty_count = parse_int_field(patents_file, row, 3, "novelty_count");
             if (rec.novelty_count < 0)
               throw DataError(patents_file + ":" + std::to_string(row.line_no) +
                               ": column `novelty_count`: negative count");
             rec.is_focal = parse_bool_field(patents_file, row, 4, "is_focal");
             if (!row.fields[5].empty())
               rec.case_label = parse_bool_field(patents_file, row, 5, "case_label");
             if (rec.is_focal && !rec.grant_date)
               throw DataError(patents_file + ":" + std::to_string(row.line_no) +
                               ": focal patent `" + rec.patent_id + "` has no grant_date");
             if (rec.is_focal && rec.group_code.empty())
               throw DataError(patents_file + ":" + std::to_string(row.line_no) +
                               ": focal patent `" + rec.patent_id + "` has no group_code");
             b.add_patent(std::move(rec),
                          patents_file + ":" + std::to_string(row.line_no) + ": ");
           });
  read_csv(citations_file, {"citing_id", "cited_id"}, [&](const CsvRow& row) {
    if (row.fields[0].empty() || row.fields[1].empty())
      throw DataError(citations_file + ":" + std::to_string(row.line_no) + ": empty id");
    b.add_citation(row.fields[0], row.fields[1]);
  });
  return b.build();
}

// Reusable per-thread scratch for successor_partition; avoids an O(n) clear per call.
class PartitionScratch {
 public:
  void prepare(std::size_t n) {
    if (prior_.size() < n) {
      prior_.assign(n, 0);
      focal_citer_.assign(n, 0);
      seen_.assign(n, 0);
      epoch_ = 0;
    }
  }

 private:
  friend SuccessorCounts successor_partition(const CitationCorpus&, PatentIndex, int,
                                             PartitionScratch&);
  std::vector<std::uint32_t> prior_, focal_citer_, seen_;
  std::uint32_t epoch_ = 0;
};

// Figure-1 partition of the in-window citers of the focal patent and its prior art.
// Window is (grant, grant + window_months]; citers with unknown dates are excluded
// (counted in stats by the caller).
inline SuccessorCounts successor_partition(const CitationCorpus& corpus, PatentIndex focal,
                                           int window_months, PartitionScratch& scratch) {
  const PatentRecord& rec = corpus.record(focal);
  if (!rec.is_focal)
    throw DataError("successor_partition: `" + rec.patent_id + "` is not a focal patent");
  if (!rec.grant_date)
    throw DataError("successor_partition: `" + rec.patent_id + "` has no grant date");
  if (window_months <= 0) throw DataError("successor_partition: window_months must be positive");

  scratch.prepare(corpus.size());
  const std::uint32_t epoch = ++scratch.epoch_;
  const DayNumber lo = *rec.grant_date;                 // exclusive
  const DayNumber hi = add_months(lo, window_months);   // inclusive

  auto in_window = [&](PatentIndex c) {
    const auto& d = corpus.record(c).grant_date;
    return d && *d > lo && *d <= hi;
  };

  const auto prior_art = corpus.cited_by(focal);
  for (PatentIndex b : prior_art) scratch.prior_[b] = epoch;

  SuccessorCounts out;
  for (PatentIndex c : corpus.citers_of(focal)) {
    if (!in_window(c)) continue;
    scratch.focal_citer_[c] = epoch;
    bool cites_prior = false;
    for (PatentIndex b : corpus.cited_by(c)) {
      if (scratch.prior_[b] == epoch) {
        cites_prior = true;
        break;
      }
    }
    (cites_prior ? out.N_j : out.N_i) += 1;
  }
  for (PatentIndex b : prior_art) {
    for (PatentIndex c : corpus.citers_of(b)) {
      if (scratch.seen_[c] == epoch) continue;
      scratch.seen_[c] = epoch;
      if (!in_window(c)) continue;
      if (scratch.focal_citer_[c] == epoch) continue;  // counted in N_j
      ++out.N_k;
    }
  }
  out.F = out.N_i + out.N_j;
  return out;
}

inline SuccessorCounts successor_partition(const CitationCorpus& corpus, PatentIndex focal,
                                           int window_months) {
  PartitionScratch scratch;
  return successor_partition(corpus, focal, window_months, scratch);
}

// Distinct dated citers in (grant, horizon].
inline long long long_term_citations(const CitationCorpus& corpus, PatentIndex focal,
                                     DayNumber horizon) {
  const PatentRecord& rec = corpus.record(focal);
  if (!rec.grant_date)
    throw DataError("long_term_citations: `" + rec.patent_id + "` has no grant date");
  if (horizon < *rec.grant_date)
    throw DataError("long_term_citations: horizon precedes grant date of `" + rec.patent_id + "`");
  long long count = 0;
  for (PatentIndex c : corpus.citers_of(focal)) {
    const auto& d = corpus.record(c).grant_date;
    if (d && *d > *rec.grant_date && *d <= horizon) ++count;
  }
  return count;
}

// Caps values strictly above the nearest-rank quantile (rank = ceil(q*n)).
inline std::vector<double> winsorize_upper(std::vector<double> values, double quantile) {
  if (values.empty()) throw DataError("winsorize_upper: empty input");
  if (!(quantile > 0.0 && quantile < 1.0))
    throw DataError("winsorize_upper: quantile must be in (0,1)");
  const std::size_t n = values.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  std::vector<double> sorted(values);
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  const double cap = sorted[rank - 1];
  for (double& v : values)
    if (v > cap) v = cap;
  return values;
}

}  // namespace dflex
