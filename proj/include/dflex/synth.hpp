#pragma once
// Synthetic citation corpora with planted high-scoring patents, plus the
// brute-force successor-partition oracle used by the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dflex/corpus.hpp"

namespace dflex {

struct SynthConfig {
  std::size_t n_patents = 1000;
  CivilDate start_date{1982, 1, 1};
  CivilDate end_date{2000, 1, 1};
  int n_groups = 4;
  double mean_out_degree = 5.0;
  double planted_fraction = 0.0;
  double planted_citation_boost = 1.0;  // attachment-weight multiplier
  double planted_novelty_boost = 1.0;   // multiplier on K
  double planted_bypass_prob = 0.0;     // citers of planted skip the planted's prior art
  double late_citation_boost = 0.0;     // mean extra post-window citers per planted patent
  int window_months = 60;
  double recency_mix = 0.5;             // share of edges drawn from the recent pool
  std::size_t recency_span = 200;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_patents < 2) throw DataError("SynthConfig: need at least 2 patents");
    if (mean_out_degree >= static_cast<double>(n_patents))
      throw DataError("SynthConfig: mean out-degree must be below n_patents");
    if (to_day_number(end_date) <= to_day_number(start_date))
      throw DataError("SynthConfig: empty date range");
    if (planted_fraction < 0 || planted_fraction > 1 || planted_bypass_prob < 0 ||
        planted_bypass_prob > 1 || recency_mix < 0 || recency_mix > 1)
      throw DataError("SynthConfig: fractions must be in [0,1]");
    if (n_groups < 1) throw DataError("SynthConfig: need at least one group");
  }
};

struct SynthCorpus {
  CitationCorpus corpus;
  std::vector<std::string> planted_ids;
};

namespace detail {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

}  // namespace detail

// Preferential attachment mixed with recency; planted patents receive boosted
// attachment weight, boosted novelty, citers that bypass their prior art, and
// optional extra post-window citers. Fully determined by the seed.
inline SynthCorpus generate_corpus(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = cfg.n_patents;
  const DayNumber day0 = to_day_number(cfg.start_date);
  const DayNumber day1 = to_day_number(cfg.end_date);
  const double span = static_cast<double>(day1 - day0);

  auto patent_id = [](std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "S%07zu", i);
    return std::string(buf);
  };

  std::vector<char> planted(n, 0);
  std::vector<DayNumber> dates(n);
  std::vector<std::vector<std::uint32_t>> cites(n);  // backward lists, built in date order
  std::vector<std::uint32_t> pool;                   // attachment endpoints
  pool.reserve(static_cast<std::size_t>(static_cast<double>(n) * (cfg.mean_out_degree + 2.0)));

  CorpusBuilder builder;
  SynthCorpus out;

  for (std::size_t i = 0; i < n; ++i) {
    dates[i] = day0 + static_cast<DayNumber>(span * static_cast<double>(i) /
                                             static_cast<double>(n));
    planted[i] = detail::u01(rng) < cfg.planted_fraction;
    if (planted[i]) out.planted_ids.push_back(patent_id(i));

    // skewed novelty counts
    double k = -std::log(std::max(detail::u01(rng), 1e-12)) * 20.0;
    if (planted[i]) k *= cfg.planted_novelty_boost;

    PatentRecord rec;
    rec.patent_id = patent_id(i);
    rec.grant_date = dates[i];
    rec.group_code = "G" + std::to_string(detail::uniform_below(rng, static_cast<std::size_t>(cfg.n_groups)));
    rec.novelty_count = static_cast<long long>(k);
    rec.is_focal = true;
    if (planted[i]) rec.case_label = true;
    builder.add_patent(std::move(rec));

    if (i > 0) {
      const double want = cfg.mean_out_degree * 2.0 * detail::u01(rng);
      const auto degree = static_cast<std::size_t>(want);
      std::set<std::uint32_t> targets;
      for (std::size_t e = 0; e < degree; ++e) {
        std::uint32_t t;
        if (pool.empty() || detail::u01(rng) < cfg.recency_mix) {
          const std::size_t lo = i > cfg.recency_span ? i - cfg.recency_span : 0;
          t = static_cast<std::uint32_t>(lo + detail::uniform_below(rng, i - lo));
        } else {
          t = pool[detail::uniform_below(rng, pool.size())];
        }
        targets.insert(t);
      }
      // bypass: drop the prior art of any planted target
      std::set<std::uint32_t> drop;
      for (std::uint32_t t : targets)
        if (planted[t] && detail::u01(rng) < cfg.planted_bypass_prob)
          for (std::uint32_t b : cites[t]) drop.insert(b);
      for (std::uint32_t t : targets) {
        if (drop.count(t)) continue;
        cites[i].push_back(t);
        builder.add_citation(patent_id(i), patent_id(t));
        const int copies = planted[t]
                               ? std::max(1, static_cast<int>(cfg.planted_citation_boost))
                               : 1;
        for (int c = 0; c < copies; ++c) pool.push_back(t);
      }
    }
    pool.push_back(static_cast<std::uint32_t>(i));
  }

  // extra late citers for planted patents (outside the scoring window)
  if (cfg.late_citation_boost > 0.0) {
    std::size_t extra_id = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!planted[i]) continue;
      const auto n_extra = static_cast<std::size_t>(
          cfg.late_citation_boost * 2.0 * detail::u01(rng));
      for (std::size_t e = 0; e < n_extra; ++e) {
        PatentRecord rec;
        rec.patent_id = patent_id(extra_id);
        rec.grant_date = add_months(dates[i], cfg.window_months + 1 +
                                                  static_cast<int>(detail::uniform_below(rng, 60)));
        rec.group_code = "";
        rec.novelty_count = 0;
        rec.is_focal = false;  // late design/non-utility citers
        builder.add_patent(rec);
        builder.add_citation(rec.patent_id, patent_id(i));
        ++extra_id;
      }
    }
  }

  out.corpus = builder.build();
  return out;
}

// Independent oracle for successor_partition: plain enumeration over every
// patent with explicit set-membership tests, no adjacency shortcuts.
inline SuccessorCounts brute_force_partition(const CitationCorpus& corpus, PatentIndex focal,
                                             int window_months) {
  const PatentRecord& rec = corpus.record(focal);
  if (!rec.is_focal)
    throw DataError("brute_force_partition: `" + rec.patent_id + "` is not a focal patent");
  if (!rec.grant_date)
    throw DataError("brute_force_partition: `" + rec.patent_id + "` has no grant date");
  if (window_months <= 0)
    throw DataError("brute_force_partition: window_months must be positive");

  std::set<PatentIndex> prior;
  for (PatentIndex i = 0; i < corpus.size(); ++i)
    for (PatentIndex b : corpus.cited_by(i))
      if (i == focal) prior.insert(b);

  const DayNumber lo = *rec.grant_date;
  const DayNumber hi = add_months(lo, window_months);

  SuccessorCounts counts;
  for (PatentIndex c = 0; c < corpus.size(); ++c) {
    if (c == focal) continue;
    const auto& d = corpus.record(c).grant_date;
    if (!d || !(*d > lo && *d <= hi)) continue;
    bool cites_focal = false, cites_prior = false;
    for (PatentIndex b : corpus.cited_by(c)) {
      if (b == focal) cites_focal = true;
      if (prior.count(b)) cites_prior = true;
    }
    if (cites_focal && !cites_prior) ++counts.N_i;
    if (cites_focal && cites_prior) ++counts.N_j;
    if (!cites_focal && cites_prior) ++counts.N_k;
  }
  counts.F = counts.N_i + counts.N_j;
  return counts;
}

// Emits the same file formats load_corpus consumes; records in index order.
inline void write_corpus(const CitationCorpus& corpus, const std::string& patents_file,
                         const std::string& citations_file) {
  std::ofstream pf(patents_file);
  if (!pf) throw DataError(patents_file + ": cannot open for writing");
  pf << "patent_id,grant_date,group_code,novelty_count,is_focal,case_label\n";
  for (PatentIndex i = 0; i < corpus.size(); ++i) {
    const PatentRecord& r = corpus.record(i);
    pf << r.patent_id << ',' << (r.grant_date ? format_date(*r.grant_date) : "") << ','
       << r.group_code << ',' << r.novelty_count << ',' << (r.is_focal ? 1 : 0) << ','
       << (r.case_label ? (*r.case_label ? "1" : "0") : "") << '\n';
  }
  std::ofstream cf(citations_file);
  if (!cf) throw DataError(citations_file + ": cannot open for writing");
  cf << "citing_id,cited_id\n";
  for (PatentIndex i = 0; i < corpus.size(); ++i)
    for (PatentIndex b : corpus.cited_by(i))
      cf << corpus.record(i).patent_id << ',' << corpus.record(b).patent_id << '\n';
}

inline void write_planted_labels(const SynthCorpus& synth, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError(path + ": cannot open for writing");
  f << "patent_id,case_label\n";
  for (const auto& id : synth.planted_ids) f << id << ",1\n";
}

}  // namespace dflex
