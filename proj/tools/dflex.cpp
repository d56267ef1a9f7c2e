// Command-line front end: ingest, partition, indices, normalize, dflex,
// calibrate, report, lookup, synth, run.
//
// Exit codes: 0 ok, 2 usage, 3 data error, 4 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dflex/analysis.hpp"
#include "dflex/calibrate.hpp"
#include "dflex/pipeline.hpp"
#include "dflex/synth.hpp"

namespace {

using namespace dflex;

struct CorpusOpts {
  std::string patents, citations;
  void attach(CLI::App* app) {
    app->add_option("--patents", patents, "patents CSV")->required();
    app->add_option("--citations", citations, "citations CSV")->required();
  }
};

struct FeatureOpts {
  int window = 60;
  std::string index = "cd";
  std::string group_by = "industry";
  std::string missing = "exclude";
  double winsor_quantile = 0.0;
  std::string winsor_columns = "x1,x2";
  std::size_t min_group_size = 30;
  int threads = 1;

  void attach(CLI::App* app) {
    app->add_option("--window", window, "forward window in months");
    app->add_option("--index", index, "disruption index: cd|bdtc|csf_d|bwh");
    app->add_option("--group-by", group_by, "industry|year|industry-year");
    app->add_option("--missing", missing, "undefined-index rows: exclude|missing-rank");
    app->add_option("--winsor-quantile", winsor_quantile, "upper winsorization quantile (0=off)");
    app->add_option("--winsor-columns", winsor_columns, "comma list from x1,x2,x3");
    app->add_option("--min-group-size", min_group_size, "tiny-group warning threshold");
    app->add_option("--threads", threads, "worker threads");
  }

  IndexChoice index_choice() const {
    auto c = parse_index_choice(index);
    if (!c) throw CLI::ValidationError("--index", "unknown index `" + index + "`");
    return *c;
  }
  GroupingMode grouping() const {
    auto g = parse_grouping_mode(group_by);
    if (!g) throw CLI::ValidationError("--group-by", "unknown grouping `" + group_by + "`");
    return *g;
  }
  MissingPolicy missing_policy() const {
    if (missing == "exclude") return MissingPolicy::exclude;
    if (missing == "missing-rank") return MissingPolicy::missing_rank;
    throw CLI::ValidationError("--missing", "unknown policy `" + missing + "`");
  }
  WinsorConfig winsor() const {
    WinsorConfig w;
    if (winsor_quantile > 0.0) {
      w.quantile = winsor_quantile;
      std::stringstream ss(winsor_columns);
      std::string col;
      while (std::getline(ss, col, ',')) {
        if (col == "x1")
          w.apply_x1 = true;
        else if (col == "x2")
          w.apply_x2 = true;
        else if (col == "x3")
          w.apply_x3 = true;
        else
          throw CLI::ValidationError("--winsor-columns", "unknown column `" + col + "`");
      }
    }
    return w;
  }
};

struct ParamOpts {
  std::vector<double> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double sigma = 1.0;
  std::string mode = "min";
  std::string fit_file;

  void attach(CLI::App* app) {
    app->add_option("--weights", weights, "alpha weights")->delimiter(',');
    app->add_option("--sigma", sigma, "power-mean exponent");
    app->add_option("--mode", mode, "exact|min|max|geometric");
    app->add_option("--fit", fit_file, "read alpha/sigma from a calibrate output file");
  }

  DflexParams params() const {
    DflexParams p;
    p.weights = weights;
    p.sigma = sigma;
    auto m = parse_mean_mode(mode);
    if (!m) throw CLI::ValidationError("--mode", "unknown mode `" + mode + "`");
    p.mode = *m;
    if (!fit_file.empty()) {
      std::ifstream in(fit_file);
      if (!in) throw DataError(fit_file + ": cannot open");
      std::string line;
      std::vector<double> alpha;
      double s = p.sigma;
      while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key.rfind("alpha", 0) == 0) alpha.push_back(std::stod(val));
        if (key == "sigma") s = std::stod(val);
      }
      if (alpha.empty()) throw DataError(fit_file + ": no alpha entries");
      p.weights = alpha;
      p.sigma = s;
      p.mode = MeanMode::exact;
    }
    return p;
  }
};

std::vector<std::vector<double>> read_g_rows(const std::string& path) {
  std::vector<std::vector<double>> rows;
  read_csv(path, {"g1", "g2", "g3"}, [&](const CsvRow& row) {
    rows.push_back({parse_double_field(path, row, 0, "g1"),
                    parse_double_field(path, row, 1, "g2"),
                    parse_double_field(path, row, 2, "g3")});
  });
  return rows;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw DataError(path + ": cannot open for writing");
  return file;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"patent disruption scoring pipeline"};
  app.set_config("--config", "", "key=value config file; command line overrides");
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  SynthConfig syn;
  std::string syn_patents, syn_citations, syn_labels;
  std::string syn_start = "1982-01-01", syn_end = "2000-01-01";
  synth->add_option("--n", syn.n_patents, "number of patents");
  synth->add_option("--seed", syn.seed, "generator seed");
  synth->add_option("--groups", syn.n_groups, "number of group codes");
  synth->add_option("--mean-out-degree", syn.mean_out_degree, "mean citations per patent");
  synth->add_option("--planted-fraction", syn.planted_fraction, "share of planted patents");
  synth->add_option("--citation-boost", syn.planted_citation_boost, "planted attachment boost");
  synth->add_option("--novelty-boost", syn.planted_novelty_boost, "planted novelty boost");
  synth->add_option("--bypass-prob", syn.planted_bypass_prob, "planted prior-art bypass prob");
  synth->add_option("--late-boost", syn.late_citation_boost, "planted post-window citer boost");
  synth->add_option("--start", syn_start, "first grant date");
  synth->add_option("--end", syn_end, "last grant date");
  synth->add_option("--out-patents", syn_patents, "output patents CSV")->required();
  synth->add_option("--out-citations", syn_citations, "output citations CSV")->required();
  synth->add_option("--out-labels", syn_labels, "output planted-label CSV");
  synth->callback([&] {
    auto s = parse_date(syn_start), e = parse_date(syn_end);
    if (!s || !e) throw DataError("synth: unparsable --start/--end date");
    syn.start_date = to_civil(*s);
    syn.end_date = to_civil(*e);
    SynthCorpus out = generate_corpus(syn);
    write_corpus(out.corpus, syn_patents, syn_citations);
    if (!syn_labels.empty()) write_planted_labels(out, syn_labels);
    std::cout << "patents=" << out.corpus.size() << " edges=" << out.corpus.edge_count()
              << " planted=" << out.planted_ids.size() << "\n";
  });

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "load a corpus and report statistics");
  CorpusOpts ing_c;
  ing_c.attach(ingest);
  ingest->callback([&] {
    CitationCorpus corpus = load_corpus(ing_c.patents, ing_c.citations);
    const LoadStats& st = corpus.stats();
    std::cout << "records=" << corpus.size() << "\nedges=" << corpus.edge_count()
              << "\nduplicate_edges=" << st.duplicate_edges
              << "\nself_citation_edges=" << st.self_citation_edges
              << "\nimplicit_records=" << st.implicit_records
              << "\nduplicate_records=" << st.duplicate_records << "\n";
  });

  // ---- partition ----
  auto* part = app.add_subcommand("partition", "successor partition for one patent");
  CorpusOpts part_c;
  part_c.attach(part);
  std::string part_id;
  int part_window = 60;
  part->add_option("--id", part_id, "focal patent id")->required();
  part->add_option("--window", part_window, "forward window in months");
  part->callback([&] {
    CitationCorpus corpus = load_corpus(part_c.patents, part_c.citations);
    auto idx = corpus.find(part_id);
    if (!idx) throw DataError("partition: unknown patent_id `" + part_id + "`");
    SuccessorCounts c = successor_partition(corpus, *idx, part_window);
    std::cout << "F=" << c.F << "\nN_i=" << c.N_i << "\nN_j=" << c.N_j << "\nN_k=" << c.N_k
              << "\n";
  });

  // ---- indices ----
  auto* idx_cmd = app.add_subcommand("indices", "index table for all focal patents");
  CorpusOpts idx_c;
  idx_c.attach(idx_cmd);
  int idx_window = 60, idx_threads = 1;
  std::string idx_out;
  idx_cmd->add_option("--window", idx_window, "forward window in months");
  idx_cmd->add_option("--threads", idx_threads, "worker threads");
  idx_cmd->add_option("--out", idx_out, "output CSV")->required();
  idx_cmd->callback([&] {
    CitationCorpus corpus = load_corpus(idx_c.patents, idx_c.citations);
    write_index_table(compute_index_table(corpus, idx_window, idx_threads), idx_out);
  });

  // ---- normalize / dflex ----
  auto* norm = app.add_subcommand("normalize", "raw features and percentile ranks");
  CorpusOpts norm_c;
  FeatureOpts norm_f;
  norm_c.attach(norm);
  norm_f.attach(norm);
  std::string norm_out;
  norm->add_option("--out", norm_out, "output CSV")->required();
  norm->callback([&] {
    CitationCorpus corpus = load_corpus(norm_c.patents, norm_c.citations);
    ScoreTable t = assemble_scores(corpus, norm_f.window, norm_f.index_choice(),
                                   norm_f.grouping(), norm_f.winsor(), norm_f.missing_policy(),
                                   norm_f.min_group_size, norm_f.threads);
    write_score_table(t, norm_out, /*with_dflex=*/false);
    std::cerr << "rows=" << t.rows.size() << " undefined_index=" << t.undefined_x3
              << " tiny_groups=" << t.tiny_groups << "\n";
  });

  auto* dfl = app.add_subcommand("dflex", "score table with the aggregate score");
  CorpusOpts dfl_c;
  FeatureOpts dfl_f;
  ParamOpts dfl_p;
  dfl_c.attach(dfl);
  dfl_f.attach(dfl);
  dfl_p.attach(dfl);
  std::string dfl_out;
  dfl->add_option("--out", dfl_out, "output CSV")->required();
  dfl->callback([&] {
    CitationCorpus corpus = load_corpus(dfl_c.patents, dfl_c.citations);
    ScoreTable t = assemble_scores(corpus, dfl_f.window, dfl_f.index_choice(), dfl_f.grouping(),
                                   dfl_f.winsor(), dfl_f.missing_policy(), dfl_f.min_group_size,
                                   dfl_f.threads);
    apply_dflex(t, dfl_p.params());
    write_score_table(t, dfl_out, /*with_dflex=*/true);
  });

  // ---- run (full pipeline) ----
  auto* run = app.add_subcommand("run", "full pipeline with manifest");
  CorpusOpts run_c;
  FeatureOpts run_f;
  ParamOpts run_p;
  run_c.attach(run);
  run_f.attach(run);
  run_p.attach(run);
  std::string run_out;
  std::uint64_t run_seed = 0;
  run->add_option("--output-dir", run_out, "artifact directory")
      ->envname("DFLEX_OUTPUT_DIR")
      ->required();
  run->add_option("--seed", run_seed, "seed recorded in the manifest");
  run->callback([&] {
    RunConfig cfg;
    cfg.patents_file = run_c.patents;
    cfg.citations_file = run_c.citations;
    cfg.output_dir = run_out;
    cfg.window_months = run_f.window;
    cfg.index_choice = run_f.index_choice();
    cfg.grouping = run_f.grouping();
    cfg.winsor = run_f.winsor();
    cfg.missing = run_f.missing_policy();
    cfg.min_group_size = run_f.min_group_size;
    cfg.params = run_p.params();
    cfg.seed = run_seed;
    cfg.threads = run_f.threads;
    RunArtifacts a = run_pipeline(cfg);
    std::cout << "rows=" << a.table.rows.size() << "\nindices=" << a.indices_file
              << "\nscores=" << a.scores_file << "\nmanifest=" << a.manifest_file << "\n";
  });

  // ---- calibrate ----
  auto* cal = app.add_subcommand("calibrate", "fit (alpha, sigma) from cases + population");
  std::string cal_cases, cal_pop, cal_out, cal_method = "ml", cal_pi_grid;
  double cal_pi = 0.0;
  std::uint64_t cal_seed = 0;
  cal->add_option("--cases", cal_cases, "case rows CSV (g1,g2,g3)")->required();
  cal->add_option("--population", cal_pop, "population rows CSV (g1,g2,g3)")->required();
  cal->add_option("--pi", cal_pi, "population prevalence of positives")->required();
  cal->add_option("--pi-grid", cal_pi_grid, "sensitivity grid lo:hi:n");
  cal->add_option("--method", cal_method, "ml|gmm");
  cal->add_option("--seed", cal_seed, "seed recorded in the result");
  cal->add_option("--out", cal_out, "output file (default stdout)");
  cal->callback([&] {
    CalibrationSample sample;
    sample.cases = read_g_rows(cal_cases);
    sample.population = read_g_rows(cal_pop);
    sample.prevalence = cal_pi;
    CalibrationConfig cfg;
    cfg.seed = cal_seed;
    DflexParams init;
    init.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    init.sigma = -1.0;
    init.mode = MeanMode::exact;
    auto fit_at = [&](double pi) {
      CalibrationSample s = sample;
      s.prevalence = pi;
      return cal_method == "gmm" ? fit_gmm(s, init, cfg) : fit_ml(s, init, cfg);
    };
    if (cal_method != "ml" && cal_method != "gmm")
      throw CLI::ValidationError("--method", "unknown method `" + cal_method + "`");
    std::ofstream file;
    std::ostream& os = open_out(file, cal_out);
    write_fit_result(fit_at(cal_pi), os);
    if (!cal_pi_grid.empty()) {
      double lo = 0, hi = 0;
      int n = 0;
      if (std::sscanf(cal_pi_grid.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 2)
        throw DataError("calibrate: --pi-grid must be lo:hi:n with n >= 2");
      for (int i = 0; i < n; ++i) {
        const double pi = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        os << "\npi=" << format_double(pi) << "\n";
        write_fit_result(fit_at(pi), os);
      }
    }
  });

  // ---- report ----
  auto* rep = app.add_subcommand("report", "diagnostic reports over a score table");
  rep->require_subcommand(1);
  std::string rep_scores, rep_out;
  auto add_scores = [&](CLI::App* sub) {
    sub->add_option("--scores", rep_scores, "score table from `dflex` or `run`")->required();
    sub->add_option("--out", rep_out, "output file (default stdout)");
  };

  auto print_summary = [](std::ostream& os, const char* name, const ThresholdSummary& s) {
    auto opt = [](const std::optional<double>& v) {
      return v ? format_double(*v) : std::string("na");
    };
    os << name << ": n_selected=" << s.n_selected
       << " share_selected=" << format_double(s.share_selected)
       << " cutoff=" << format_double(s.cutoff_value) << "\n";
    for (const auto* side : {&s.selected, &s.complement}) {
      os << (side == &s.selected ? "  selected" : "  complement") << ": n=" << side->n
         << " mean_F=" << opt(side->mean_f) << " median_F=" << opt(side->median_f)
         << " share_F_lt5=" << opt(side->share_f_lt5) << " mean_K=" << opt(side->mean_k)
         << " mean_x3=" << opt(side->mean_x3) << " mean_g1=" << opt(side->mean_g1)
         << " mean_g2=" << opt(side->mean_g2) << " mean_g3=" << opt(side->mean_g3) << "\n";
    }
  };

  auto* t2 = rep->add_subcommand("table2", "percentile-threshold characteristics");
  add_scores(t2);
  double t2_p = 0.90;
  t2->add_option("--percentile", t2_p, "selection percentile");
  t2->callback([&] {
    ScoreTable t = read_score_table(rep_scores);
    std::ofstream file;
    std::ostream& os = open_out(file, rep_out);
    print_summary(os, "dflex_p", threshold_summary(t, t.dflex_column(),
                                                   ThresholdMode::percentile, t2_p));
  });

  auto* t4 = rep->add_subcommand("table4", "absolute-threshold characteristics");
  add_scores(t4);
  double t4_tau = 0.90;
  t4->add_option("--tau", t4_tau, "absolute cutoff");
  t4->callback([&] {
    ScoreTable t = read_score_table(rep_scores);
    std::ofstream file;
    std::ostream& os = open_out(file, rep_out);
    print_summary(os, "dflex_abs",
                  threshold_summary(t, t.dflex_column(), ThresholdMode::absolute, t4_tau));
  });

  auto* hist_cmd = rep->add_subcommand("hist", "histogram and mass-point shares");
  add_scores(hist_cmd);
  std::string hist_col = "dflex";
  std::size_t hist_bins = 50;
  double hist_lo = 0.0, hist_hi = 1.0, hist_max = 1.0;
  hist_cmd->add_option("--column", hist_col, "dflex|g3|x3");
  hist_cmd->add_option("--bins", hist_bins, "bin count");
  hist_cmd->add_option("--lo", hist_lo, "range low");
  hist_cmd->add_option("--hi", hist_hi, "range high");
  hist_cmd->add_option("--max-attainable", hist_max, "mass-point reference value");
  hist_cmd->callback([&] {
    ScoreTable t = read_score_table(rep_scores);
    std::vector<double> v;
    for (const auto& r : t.rows) {
      std::optional<double> x;
      if (hist_col == "dflex")
        x = r.dflex;
      else if (hist_col == "g3")
        x = r.g3;
      else if (hist_col == "x3")
        x = r.x3;
      else
        throw CLI::ValidationError("--column", "unknown column `" + hist_col + "`");
      if (x) v.push_back(*x);
    }
    Histogram h = histogram(v, hist_bins, hist_lo, hist_hi);
    MassPointShare m = mass_point_share(v, hist_max, hist_bins, hist_lo, hist_hi);
    std::ofstream file;
    std::ostream& os = open_out(file, rep_out);
    os << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      os << format_double(h.lo + h.bin_width() * static_cast<double>(b)) << ','
         << format_double(h.lo + h.bin_width() * static_cast<double>(b + 1)) << ','
         << h.counts[b] << '\n';
    os << "share_at_max=" << format_double(m.share_at_max)
       << "\nshare_adjacent_bin=" << format_double(m.share_adjacent_bin) << "\n";
  });

  auto* scat = rep->add_subcommand("scatter", "cd vs mcd scatter data");
  CorpusOpts scat_c;
  scat_c.attach(scat);
  int scat_window = 60, scat_threads = 1;
  double scat_lo = -0.2, scat_hi = 0.2;
  std::vector<double> scat_pcts{0.95, 0.99};
  scat->add_option("--window", scat_window, "forward window in months");
  scat->add_option("--threads", scat_threads, "worker threads");
  scat->add_option("--cd-lo", scat_lo, "cd range low");
  scat->add_option("--cd-hi", scat_hi, "cd range high");
  scat->add_option("--percentiles", scat_pcts, "mcd percentile lines")->delimiter(',');
  scat->add_option("--out", rep_out, "output file (default stdout)");
  scat->callback([&] {
    CitationCorpus corpus = load_corpus(scat_c.patents, scat_c.citations);
    std::vector<IndexRow> rows = compute_index_table(corpus, scat_window, scat_threads);
    McdScatter sc = mcd_scale_scatter(rows, scat_lo, scat_hi, scat_pcts);
    std::ofstream file;
    std::ostream& os = open_out(file, rep_out);
    os << "patent_id,cd,mcd,F\n";
    for (const auto& p : sc.points)
      os << p.patent_id << ',' << format_double(p.cd) << ',' << format_double(p.mcd) << ','
         << p.F << '\n';
    for (const auto& [p, v] : sc.mcd_percentiles)
      os << "mcd_p" << format_double(p) << "=" << format_double(v) << "\n";
  });

  auto* lt = rep->add_subcommand("longterm", "long-horizon citations by score bin");
  CorpusOpts lt_c;
  lt_c.attach(lt);
  add_scores(lt);
  std::string lt_start = "1982-01-01", lt_end = "1990-12-31", lt_horizon = "2015-06-30";
  std::size_t lt_bins = 10;
  double lt_top_count = 120.0, lt_top_pct = 0.0;
  lt->add_option("--cohort-start", lt_start, "cohort first grant date");
  lt->add_option("--cohort-end", lt_end, "cohort last grant date");
  lt->add_option("--horizon", lt_horizon, "long-term horizon date");
  lt->add_option("--bins", lt_bins, "number of score bins");
  lt->add_option("--top-count", lt_top_count, "top-tail citation count threshold");
  lt->add_option("--top-percentile", lt_top_pct, "top-tail percentile (overrides --top-count)");
  lt->callback([&] {
    CitationCorpus corpus = load_corpus(lt_c.patents, lt_c.citations);
    ScoreTable t = read_score_table(rep_scores);
    auto s = parse_date(lt_start), e = parse_date(lt_end), h = parse_date(lt_horizon);
    if (!s || !e || !h) throw DataError("longterm: unparsable cohort/horizon date");
    TopThreshold top;
    if (lt_top_pct > 0.0)
      top = {TopThreshold::Kind::percentile, lt_top_pct};
    else
      top = {TopThreshold::Kind::count, lt_top_count};
    BinnedValidation bv = long_term_bins(corpus, t, *s, *e, *h, lt_bins, top);
    std::ofstream file;
    std::ostream& os = open_out(file, rep_out);
    os << "cohort_size=" << bv.cohort_size
       << "\ntop_threshold=" << format_double(bv.top_threshold) << "\n";
    os << "bin_lo,bin_hi,count,mean_long_term,share_top\n";
    for (std::size_t b = 0; b < bv.counts.size(); ++b)
      os << format_double(bv.edges[b]) << ',' << format_double(bv.edges[b + 1]) << ','
         << bv.counts[b] << ',' << format_double(bv.mean_long_term[b]) << ','
         << format_double(bv.share_top[b]) << '\n';
  });

  auto* tr = rep->add_subcommand("trends", "per-industry-per-year series");
  add_scores(tr);
  double tr_high = 0.90, tr_low = 0.30;
  int tr_partial = -1;
  tr->add_option("--high", tr_high, "high-score cutoff");
  tr->add_option("--low", tr_low, "low-score cutoff");
  tr->add_option("--partial-year", tr_partial, "final partial year label");
  tr->callback([&] {
    ScoreTable t = read_score_table(rep_scores);
    std::optional<int> partial;
    if (tr_partial >= 0) partial = tr_partial;
    std::vector<TrendPoint> pts = trend_panels(t, tr_high, tr_low, partial);
    std::ofstream file;
    std::ostream& os = open_out(file, rep_out);
    os << "group_code,year,partial,n,mean_dflex,share_high,p90,share_low\n";
    for (const auto& p : pts)
      os << p.group_code << ',' << p.year << ',' << (p.partial_year ? 1 : 0) << ',' << p.n << ','
         << format_double(p.mean_dflex) << ',' << format_double(p.share_high) << ','
         << format_double(p.p90) << ',' << format_double(p.share_low) << '\n';
    os << "note: no truncation-bias or patent-law-change correction applied\n";
  });

  auto* lg = rep->add_subcommand("logit", "logit of a binary label on the score");
  add_scores(lg);
  std::string lg_labels;
  lg->add_option("--labels", lg_labels, "patent_id,case_label CSV")->required();
  lg->callback([&] {
    ScoreTable t = read_score_table(rep_scores);
    std::map<std::string, int> labels;
    read_csv(lg_labels, {"patent_id", "case_label"}, [&](const CsvRow& row) {
      labels[row.fields[0]] = parse_int_field(lg_labels, row, 1, "case_label") != 0;
    });
    std::vector<int> y;
    std::vector<std::vector<double>> X;
    for (const auto& r : t.rows) {
      if (!r.dflex) continue;
      auto it = labels.find(r.patent_id);
      y.push_back(it != labels.end() && it->second);
      X.push_back({1.0, *r.dflex});
    }
    LogitResult res = logit_fit(y, X);
    std::ofstream file;
    std::ostream& os = open_out(file, rep_out);
    os << "n=" << y.size() << "\n";
    const char* names[] = {"intercept", "dflex"};
    for (int j = 0; j < 2; ++j)
      os << names[j] << ": coef=" << format_double(res.coef[j])
         << " se=" << format_double(res.std_err[j]) << " p=" << format_double(res.p_value[j])
         << " ame=" << format_double(res.marginal_effect[j])
         << " lpm=" << format_double(res.lpm_coef[j]) << "\n";
    os << "marginal_effect_convention=average_marginal_effect\n";
  });

  // ---- lookup ----
  auto* look = app.add_subcommand("lookup", "single-patent report");
  std::string look_scores, look_id;
  ParamOpts look_p;
  look->add_option("id", look_id, "patent id")->required();
  look->add_option("--scores", look_scores, "score table from `dflex` or `run`")->required();
  look_p.attach(look);
  look->callback([&] {
    ScoreTable t = read_score_table(look_scores);
    std::cout << render_case_report(case_lookup(t, look_id, look_p.params()));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const dflex::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const dflex::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
