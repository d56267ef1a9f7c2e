#pragma once
// Group-wise empirical-CDF percentile ranks and score-table assembly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dflex/corpus.hpp"
#include "dflex/indices.hpp"
#include "dflex/power_mean.hpp"

namespace dflex {

enum class GroupingMode { group_code, grant_year, group_code_year };

inline std::optional<GroupingMode> parse_grouping_mode(const std::string& s) {
  if (s == "industry") return GroupingMode::group_code;
  if (s == "year") return GroupingMode::grant_year;
  if (s == "industry-year") return GroupingMode::group_code_year;
  return std::nullopt;
}

inline std::string grouping_mode_name(GroupingMode m) {
  switch (m) {
    case GroupingMode::group_code: return "industry";
    case GroupingMode::grant_year: return "year";
    case GroupingMode::group_code_year: return "industry-year";
  }
  return "?";
}

// Rows whose x3 is undefined (zero-denominator index): drop them, or keep them
// with an absent rank. Never silently zero.
enum class MissingPolicy { exclude, missing_rank };

// Within each group of size n: g = |{values <= own}| / n, ties share the upper
// rank, every group maximum gets exactly 1.
inline std::vector<double> percentile_rank(std::span<const double> values,
                                           std::span<const std::int64_t> group) {
  if (values.size() != group.size())
    throw DataError("percentile_rank: values and groups differ in length");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (group[a] != group[b]) return group[a] < group[b];
    return values[a] < values[b];
  });

  std::vector<double> g(n, 0.0);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end < n && group[order[end]] == group[order[start]]) ++end;
    const double group_n = static_cast<double>(end - start);
    std::size_t i = start;
    while (i < end) {
      std::size_t j = i;
      while (j < end && values[order[j]] == values[order[i]]) ++j;
      const double rank = static_cast<double>(j - start) / group_n;  // upper tie rank
      for (std::size_t k = i; k < j; ++k) g[order[k]] = rank;
      i = j;
    }
    start = end;
  }
  return g;
}

struct ScoreRow {
  std::string patent_id;
  std::string group_code;
  int grant_year = 0;
  long long F = 0;
  long long N_i = 0, N_j = 0, N_k = 0;
  long long x1 = 0;                // = F
  long long x2 = 0;                // = K
  std::optional<double> x3;        // chosen disruption index
  double g1 = 0.0, g2 = 0.0;
  std::optional<double> g3;
  std::optional<double> dflex;
  bool tiny_group = false;
};

struct WinsorConfig {
  std::optional<double> quantile;  // absent = off
  bool apply_x1 = false;
  bool apply_x2 = false;
  bool apply_x3 = false;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;  // sorted by patent_id
  GroupingMode grouping = GroupingMode::group_code;
  IndexChoice index_choice = IndexChoice::cd;
  int window_months = 60;
  std::size_t undated_citers_dropped = 0;  // citers excluded from windowed counts
  std::size_t undefined_x3 = 0;            // rows whose index had a zero denominator
  std::size_t tiny_groups = 0;

  std::vector<double> dflex_column() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.dflex.value_or(std::numeric_limits<double>::quiet_NaN()));
    return out;
  }
};

namespace detail {

inline std::int64_t group_key(const ScoreRow& row, GroupingMode mode,
                              std::map<std::string, std::int64_t>& codes) {
  auto code_of = [&](const std::string& c) {
    auto [it, _] = codes.emplace(c, static_cast<std::int64_t>(codes.size()));
    return it->second;
  };
  switch (mode) {
    case GroupingMode::group_code: return code_of(row.group_code);
    case GroupingMode::grant_year: return row.grant_year;
    case GroupingMode::group_code_year:
      return code_of(row.group_code) * 100000 + row.grant_year;
  }
  return 0;
}

}  // namespace detail

// Full feature pipeline for one corpus: successor counts, raw features,
// optional winsorization, group-wise percentile ranks.
inline ScoreTable assemble_scores(const CitationCorpus& corpus, int window_months,
                                  IndexChoice index_choice, GroupingMode grouping,
                                  const WinsorConfig& winsor = {},
                                  MissingPolicy missing = MissingPolicy::exclude,
                                  std::size_t min_group_size = 30, int threads = 1) {
  ScoreTable table;
  table.grouping = grouping;
  table.index_choice = index_choice;
  table.window_months = window_months;

  std::vector<PatentIndex> focal;
  for (PatentIndex i = 0; i < corpus.size(); ++i)
    if (corpus.record(i).is_focal) focal.push_back(i);
  std::sort(focal.begin(), focal.end(), [&](PatentIndex a, PatentIndex b) {
    return corpus.record(a).patent_id < corpus.record(b).patent_id;
  });

  // Citers without a grant date can never enter a window; report them once.
  {
    std::vector<char> undated_citer(corpus.size(), 0);
    for (PatentIndex i = 0; i < corpus.size(); ++i) {
      if (corpus.record(i).grant_date) continue;
      if (!corpus.cited_by(i).empty()) undated_citer[i] = 1;
    }
    for (char c : undated_citer) table.undated_citers_dropped += c;
  }

  std::vector<ScoreRow> rows(focal.size());
  const int nthreads = std::max(1, threads);
  auto worker = [&](int t) {
    PartitionScratch scratch;
    for (std::size_t k = t; k < focal.size(); k += static_cast<std::size_t>(nthreads)) {
      const PatentIndex idx = focal[k];
      const PatentRecord& rec = corpus.record(idx);
      SuccessorCounts counts = successor_partition(corpus, idx, window_months, scratch);
      IndexSet indices = disruption_indices(counts);
      ScoreRow& row = rows[k];
      row.patent_id = rec.patent_id;
      row.group_code = rec.group_code;
      row.grant_year = year_of(*rec.grant_date);
      row.F = counts.F;
      row.N_i = counts.N_i;
      row.N_j = counts.N_j;
      row.N_k = counts.N_k;
      row.x1 = counts.F;
      row.x2 = rec.novelty_count;
      row.x3 = pick_index(indices, index_choice);
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  // Drop (or flag) undefined-index rows before ranking.
  std::vector<ScoreRow> kept;
  kept.reserve(rows.size());
  for (auto& row : rows) {
    if (!row.x3) {
      ++table.undefined_x3;
      if (missing == MissingPolicy::exclude) continue;
    }
    kept.push_back(std::move(row));
  }
  table.rows = std::move(kept);

  std::map<std::string, std::int64_t> code_ids;
  std::vector<std::int64_t> group(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    group[i] = detail::group_key(table.rows[i], grouping, code_ids);

  auto column = [&](auto getter) {
    std::vector<double> v(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) v[i] = getter(table.rows[i]);
    return v;
  };
  std::vector<double> x1 = column([](const ScoreRow& r) { return static_cast<double>(r.x1); });
  std::vector<double> x2 = column([](const ScoreRow& r) { return static_cast<double>(r.x2); });

  if (winsor.quantile) {
    if (winsor.apply_x1 && !x1.empty()) x1 = winsorize_upper(std::move(x1), *winsor.quantile);
    if (winsor.apply_x2 && !x2.empty()) x2 = winsorize_upper(std::move(x2), *winsor.quantile);
  }

  if (!table.rows.empty()) {
    std::vector<double> g1 = percentile_rank(x1, group);
    std::vector<double> g2 = percentile_rank(x2, group);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      table.rows[i].g1 = g1[i];
      table.rows[i].g2 = g2[i];
    }

    // x3 ranking skips rows with an absent index value.
    std::vector<double> x3v;
    std::vector<std::int64_t> x3g;
    std::vector<std::size_t> x3row;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (!table.rows[i].x3) continue;
      x3v.push_back(*table.rows[i].x3);
      x3g.push_back(group[i]);
      x3row.push_back(i);
    }
    if (winsor.quantile && winsor.apply_x3 && !x3v.empty())
      x3v = winsorize_upper(std::move(x3v), *winsor.quantile);
    if (!x3v.empty()) {
      std::vector<double> g3 = percentile_rank(x3v, x3g);
      for (std::size_t k = 0; k < x3row.size(); ++k) table.rows[x3row[k]].g3 = g3[k];
    }
  }

  // Tiny groups give quantized, misleading ranks; flag them.
  std::map<std::int64_t, std::size_t> group_sizes;
  for (std::int64_t gk : group) ++group_sizes[gk];
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    table.rows[i].tiny_group = group_sizes[group[i]] < min_group_size;
  for (auto& [gk, sz] : group_sizes)
    if (sz < min_group_size) ++table.tiny_groups;

  return table;
}

// Appends the aggregate score to every row that has all three ranks.
inline void apply_dflex(ScoreTable& table, const DflexParams& params) {
  params.validate();
  for (auto& row : table.rows) {
    if (!row.g3) {
      row.dflex.reset();
      continue;
    }
    const std::array<double, 3> g{row.g1, row.g2, *row.g3};
    row.dflex = generalized_mean(std::span<const double>(g), params);
  }
}

}  // namespace dflex
