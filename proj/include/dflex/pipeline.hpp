#pragma once
// End-to-end run: ingest -> partitions -> indices -> normalization -> aggregate
// score, with every artifact persisted and listed in a digest manifest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "dflex/analysis.hpp"
#include "dflex/calibrate.hpp"
#include "dflex/corpus.hpp"
#include "dflex/csv.hpp"
#include "dflex/indices.hpp"
#include "dflex/normalize.hpp"
#include "dflex/power_mean.hpp"

namespace dflex {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::string patents_file;
  std::string citations_file;
  std::string output_dir;
  int window_months = 60;
  IndexChoice index_choice = IndexChoice::cd;
  GroupingMode grouping = GroupingMode::group_code;
  WinsorConfig winsor;
  MissingPolicy missing = MissingPolicy::exclude;
  std::size_t min_group_size = 30;
  DflexParams params{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0, MeanMode::min};
  std::uint64_t seed = 0;
  int threads = 1;
};

namespace detail {

inline std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open for digest");
  std::uint64_t h = 1469598103934665603ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

inline std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace detail

inline void write_index_table(const std::vector<IndexRow>& rows, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError(path + ": cannot open for writing");
  f << "patent_id,F,N_i,N_j,N_k,cd,bdtc,csf_d,csf_c,bwh,mcd\n";
  for (const auto& r : rows) {
    f << r.patent_id << ',' << r.counts.F << ',' << r.counts.N_i << ',' << r.counts.N_j << ','
      << r.counts.N_k << ',' << detail::opt_field(r.indices.cd) << ','
      << detail::opt_field(r.indices.bdtc) << ',' << detail::opt_field(r.indices.csf_d) << ','
      << detail::opt_field(r.indices.csf_c) << ',' << detail::opt_field(r.indices.bwh) << ','
      << detail::opt_field(r.indices.mcd) << '\n';
  }
}

inline void write_score_table(const ScoreTable& table, const std::string& path,
                              bool with_dflex) {
  std::ofstream f(path);
  if (!f) throw DataError(path + ": cannot open for writing");
  f << "patent_id,group_code,grant_year,x1,x2,x3,g1,g2,g3";
  if (with_dflex) f << ",dflex";
  f << ",flags\n";
  for (const auto& r : table.rows) {
    f << r.patent_id << ',' << r.group_code << ',' << r.grant_year << ',' << r.x1 << ',' << r.x2
      << ',' << detail::opt_field(r.x3) << ',' << format_double(r.g1) << ','
      << format_double(r.g2) << ',' << detail::opt_field(r.g3);
    if (with_dflex) f << ',' << detail::opt_field(r.dflex);
    f << ',' << (r.tiny_group ? "tiny_group" : "") << '\n';
  }
}

// Score-table reader for subcommands that consume a previous run's output.
inline ScoreTable read_score_table(const std::string& path) {
  ScoreTable table;
  std::vector<std::string> header{"patent_id", "group_code", "grant_year", "x1", "x2",
                                  "x3",        "g1",         "g2",         "g3", "dflex",
                                  "flags"};
  read_csv(path, header, [&](const CsvRow& row) {
    ScoreRow r;
    r.patent_id = row.fields[0];
    r.group_code = row.fields[1];
    r.grant_year = static_cast<int>(parse_int_field(path, row, 2, "grant_year"));
    r.x1 = r.F = parse_int_field(path, row, 3, "x1");
    r.x2 = parse_int_field(path, row, 4, "x2");
    if (!row.fields[5].empty()) r.x3 = parse_double_field(path, row, 5, "x3");
    r.g1 = parse_double_field(path, row, 6, "g1");
    r.g2 = parse_double_field(path, row, 7, "g2");
    if (!row.fields[8].empty()) r.g3 = parse_double_field(path, row, 8, "g3");
    if (!row.fields[9].empty()) r.dflex = parse_double_field(path, row, 9, "dflex");
    r.tiny_group = row.fields[10].find("tiny_group") != std::string::npos;
    table.rows.push_back(std::move(r));
  });
  return table;
}

struct RunArtifacts {
  std::string indices_file;
  std::string scores_file;
  std::string manifest_file;
  ScoreTable table;
};

// Every artifact is rewritten from scratch; a `.partial` marker guards
// against truncated runs.
inline RunArtifacts run_pipeline(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string marker = cfg.output_dir + "/.partial";
  {
    std::ofstream m(marker);
    m << "run in progress\n";
  }

  RunArtifacts out;
  out.indices_file = cfg.output_dir + "/indices.csv";
  out.scores_file = cfg.output_dir + "/scores.csv";
  out.manifest_file = cfg.output_dir + "/manifest.txt";

  CitationCorpus corpus = load_corpus(cfg.patents_file, cfg.citations_file);
  std::vector<IndexRow> index_rows =
      compute_index_table(corpus, cfg.window_months, cfg.threads);
  write_index_table(index_rows, out.indices_file);

  out.table = assemble_scores(corpus, cfg.window_months, cfg.index_choice, cfg.grouping,
                              cfg.winsor, cfg.missing, cfg.min_group_size, cfg.threads);
  apply_dflex(out.table, cfg.params);
  write_score_table(out.table, out.scores_file, /*with_dflex=*/true);

  std::ofstream mf(out.manifest_file);
  if (!mf) throw DataError(out.manifest_file + ": cannot open for writing");
  mf << "tool_version = " << kToolVersion << "\n";
  mf << "seed = " << cfg.seed << "\n";
  mf << "window_months = " << cfg.window_months << "\n";
  mf << "index = " << index_choice_name(cfg.index_choice) << "\n";
  mf << "grouping = " << grouping_mode_name(cfg.grouping) << "\n";
  mf << "patents = " << fs::path(cfg.patents_file).filename().string() << "\n";
  mf << "citations = " << fs::path(cfg.citations_file).filename().string() << "\n";
  mf << "corpus_records = " << corpus.size() << "\n";
  mf << "corpus_edges = " << corpus.edge_count() << "\n";
  mf << "duplicate_edges = " << corpus.stats().duplicate_edges << "\n";
  mf << "self_citation_edges = " << corpus.stats().self_citation_edges << "\n";
  mf << "implicit_records = " << corpus.stats().implicit_records << "\n";
  mf << "undated_citers_dropped = " << out.table.undated_citers_dropped << "\n";
  mf << "undefined_index_rows = " << out.table.undefined_x3 << "\n";
  mf << "tiny_groups = " << out.table.tiny_groups << "\n";
  mf << "score_rows = " << out.table.rows.size() << "\n";
  for (const std::string& f : {out.indices_file, out.scores_file})
    mf << "file " << fs::path(f).filename().string() << " fnv1a64 "
       << detail::hex64(detail::fnv1a_file(f)) << "\n";
  mf.close();

  fs::remove(marker);
  return out;
}

inline void write_fit_result(const FitResult& fit, std::ostream& os) {
  for (std::size_t s = 0; s < fit.alpha.size(); ++s)
    os << "alpha" << (s + 1) << "=" << format_double(fit.alpha[s]) << "\n";
  os << "sigma=" << format_double(fit.sigma) << "\n";
  os << "loglik=" << format_double(fit.log_likelihood) << "\n";
  os << "converged=" << (fit.converged ? 1 : 0) << "\n";
  os << "min_approx_gap=" << format_double(fit.min_approx_gap) << "\n";
  os << "iterations=" << fit.iterations << "\n";
  os << "seed=" << fit.seed << "\n";
}

}  // namespace dflex
