#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dflex/pipeline.hpp"
#include "dflex/synth.hpp"

using namespace dflex;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct TempCorpus {
  fs::path dir;
  std::string patents, citations;
  TempCorpus(std::size_t n, std::uint64_t seed) {
    dir = fs::temp_directory_path() / ("dflex_pipe_" + std::to_string(seed));
    fs::create_directories(dir);
    SynthConfig cfg;
    cfg.n_patents = n;
    cfg.seed = seed;
    cfg.planted_fraction = 0.1;
    cfg.planted_citation_boost = 4.0;
    cfg.planted_bypass_prob = 0.5;
    SynthCorpus s = generate_corpus(cfg);
    patents = (dir / "patents.csv").string();
    citations = (dir / "citations.csv").string();
    write_corpus(s.corpus, patents, citations);
  }
};

}  // namespace

TEST_CASE("run_pipeline: artifacts, manifest, idempotence") {
  TempCorpus tc(250, 31);
  RunConfig cfg;
  cfg.patents_file = tc.patents;
  cfg.citations_file = tc.citations;
  cfg.output_dir = (tc.dir / "out").string();
  cfg.params.mode = MeanMode::min;

  RunArtifacts a = run_pipeline(cfg);
  CHECK(fs::exists(a.indices_file));
  CHECK(fs::exists(a.scores_file));
  CHECK(fs::exists(a.manifest_file));
  CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / ".partial"));

  const std::string manifest = slurp(a.manifest_file);
  CHECK(manifest.find("tool_version = ") != std::string::npos);
  CHECK(manifest.find("file indices.csv fnv1a64 ") != std::string::npos);
  CHECK(manifest.find("file scores.csv fnv1a64 ") != std::string::npos);

  // rerun is byte-identical
  const std::string idx1 = slurp(a.indices_file);
  const std::string sc1 = slurp(a.scores_file);
  run_pipeline(cfg);
  CHECK(slurp(a.indices_file) == idx1);
  CHECK(slurp(a.scores_file) == sc1);

  // thread count does not change bytes
  RunConfig cfg8 = cfg;
  cfg8.threads = 8;
  cfg8.output_dir = (tc.dir / "out8").string();
  RunArtifacts a8 = run_pipeline(cfg8);
  CHECK(slurp(a8.indices_file) == idx1);
  CHECK(slurp(a8.scores_file) == sc1);
}

TEST_CASE("run_pipeline: F = N_i + N_j on every output row") {
  TempCorpus tc(200, 33);
  RunConfig cfg;
  cfg.patents_file = tc.patents;
  cfg.citations_file = tc.citations;
  cfg.output_dir = (tc.dir / "out").string();
  cfg.params.mode = MeanMode::min;
  RunArtifacts a = run_pipeline(cfg);

  std::size_t rows = 0;
  read_csv(a.indices_file,
           {"patent_id", "F", "N_i", "N_j", "N_k", "cd", "bdtc", "csf_d", "csf_c", "bwh", "mcd"},
           [&](const CsvRow& row) {
             ++rows;
             const long long f = parse_int_field(a.indices_file, row, 1, "F");
             const long long ni = parse_int_field(a.indices_file, row, 2, "N_i");
             const long long nj = parse_int_field(a.indices_file, row, 3, "N_j");
             CHECK(f == ni + nj);
           });
  CHECK(rows > 0);
}

TEST_CASE("score table round-trips through its serialized form") {
  TempCorpus tc(180, 35);
  RunConfig cfg;
  cfg.patents_file = tc.patents;
  cfg.citations_file = tc.citations;
  cfg.output_dir = (tc.dir / "out").string();
  cfg.params.mode = MeanMode::min;
  RunArtifacts a = run_pipeline(cfg);

  ScoreTable back = read_score_table(a.scores_file);
  REQUIRE(back.rows.size() == a.table.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].patent_id == a.table.rows[i].patent_id);
    CHECK(back.rows[i].g1 == a.table.rows[i].g1);
    CHECK(back.rows[i].g2 == a.table.rows[i].g2);
    CHECK(back.rows[i].g3 == a.table.rows[i].g3);
    CHECK(back.rows[i].dflex == a.table.rows[i].dflex);
    CHECK(back.rows[i].tiny_group == a.table.rows[i].tiny_group);
  }
}

TEST_CASE("run_pipeline: missing input raises a data error") {
  RunConfig cfg;
  cfg.patents_file = "/nonexistent/patents.csv";
  cfg.citations_file = "/nonexistent/citations.csv";
  cfg.output_dir = (fs::temp_directory_path() / "dflex_missing").string();
  CHECK_THROWS_AS(run_pipeline(cfg), DataError);
  // the aborted run leaves its marker behind
  CHECK(fs::exists(fs::path(cfg.output_dir) / ".partial"));
}

TEST_CASE("write_fit_result serialization") {
  FitResult fit;
  fit.alpha = {0.25, 0.5, 0.25};
  fit.sigma = -7.5;
  fit.log_likelihood = -123.5;
  fit.converged = true;
  fit.min_approx_gap = 0.01;
  fit.iterations = 42;
  fit.seed = 9;
  std::ostringstream os;
  write_fit_result(fit, os);
  const std::string text = os.str();
  CHECK(text.find("alpha1=0.25\n") != std::string::npos);
  CHECK(text.find("alpha2=0.5\n") != std::string::npos);
  CHECK(text.find("sigma=-7.5\n") != std::string::npos);
  CHECK(text.find("converged=1\n") != std::string::npos);
  CHECK(text.find("seed=9\n") != std::string::npos);
}

TEST_CASE("format_double round-trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, -7.25, 1e-300, 3.141592653589793}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
