#pragma once
// Disruption/consolidation indices computed from a successor partition.
// All ratios are formed from integer numerators/denominators with a single
// final division, so results are bit-identical across platforms.

#include <algorithm>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dflex/corpus.hpp"
#include "dflex/error.hpp"

namespace dflex {

// A zero denominator yields an absent value, never 0.
struct IndexSet {
  std::optional<double> cd;     // (N_i - N_j) / (N_i + N_j + N_k)
  std::optional<double> bdtc;   // (N_i - N_j) / (N_i + N_j)
  std::optional<double> csf_d;  // N_i / (N_i + N_j + N_k)
  std::optional<double> csf_c;  // N_j / (N_i + N_j + N_k)
  std::optional<double> bwh;    // N_i / (N_i + N_j)
  std::optional<double> mcd;    // (N_i + N_j)(N_i - N_j) / (N_i + N_j + N_k) = F * cd
};

enum class IndexChoice { cd, bdtc, csf_d, bwh };

inline std::optional<IndexChoice> parse_index_choice(const std::string& s) {
  if (s == "cd") return IndexChoice::cd;
  if (s == "bdtc") return IndexChoice::bdtc;
  if (s == "csf_d") return IndexChoice::csf_d;
  if (s == "bwh") return IndexChoice::bwh;
  return std::nullopt;
}

inline std::string index_choice_name(IndexChoice c) {
  switch (c) {
    case IndexChoice::cd: return "cd";
    case IndexChoice::bdtc: return "bdtc";
    case IndexChoice::csf_d: return "csf_d";
    case IndexChoice::bwh: return "bwh";
  }
  return "?";
}

inline IndexSet disruption_indices(const SuccessorCounts& c) {
  if (c.N_i < 0 || c.N_j < 0 || c.N_k < 0)
    throw DataError("disruption_indices: negative successor counts");
  IndexSet out;
  const long long f = c.N_i + c.N_j;
  const long long total = c.N_i + c.N_j + c.N_k;
  if (total > 0) {
    out.cd = static_cast<double>(c.N_i - c.N_j) / static_cast<double>(total);
    out.csf_d = static_cast<double>(c.N_i) / static_cast<double>(total);
    out.csf_c = static_cast<double>(c.N_j) / static_cast<double>(total);
    out.mcd = static_cast<double>(f * (c.N_i - c.N_j)) / static_cast<double>(total);
  }
  if (f > 0) {
    out.bdtc = static_cast<double>(c.N_i - c.N_j) / static_cast<double>(f);
    out.bwh = static_cast<double>(c.N_i) / static_cast<double>(f);
  }
  return out;
}

struct IndexRow {
  std::string patent_id;
  SuccessorCounts counts;
  IndexSet indices;
};

// Batch computation over every focal patent, rows ordered by patent_id.
inline std::vector<IndexRow> compute_index_table(const CitationCorpus& corpus, int window_months,
                                                 int threads = 1) {
  std::vector<PatentIndex> focal;
  for (PatentIndex i = 0; i < corpus.size(); ++i)
    if (corpus.record(i).is_focal) focal.push_back(i);
  std::sort(focal.begin(), focal.end(), [&](PatentIndex a, PatentIndex b) {
    return corpus.record(a).patent_id < corpus.record(b).patent_id;
  });
  std::vector<IndexRow> rows(focal.size());
  const int nthreads = std::max(1, threads);
  auto worker = [&](int t) {
    PartitionScratch scratch;
    for (std::size_t k = t; k < focal.size(); k += static_cast<std::size_t>(nthreads)) {
      rows[k].patent_id = corpus.record(focal[k]).patent_id;
      rows[k].counts = successor_partition(corpus, focal[k], window_months, scratch);
      rows[k].indices = disruption_indices(rows[k].counts);
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  return rows;
}

inline std::optional<double> pick_index(const IndexSet& s, IndexChoice c) {
  switch (c) {
    case IndexChoice::cd: return s.cd;
    case IndexChoice::bdtc: return s.bdtc;
    case IndexChoice::csf_d: return s.csf_d;
    case IndexChoice::bwh: return s.bwh;
  }
  return std::nullopt;
}

}  // namespace dflex
