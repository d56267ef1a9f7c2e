#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "dflex/corpus.hpp"
#include "dflex/synth.hpp"

using namespace dflex;

namespace {

DayNumber d(int y, int m, int day) { return to_day_number({y, m, day}); }

PatentRecord patent(const std::string& id, DayNumber date, bool focal = true,
                    const std::string& group = "G0", long long k = 0) {
  PatentRecord r;
  r.patent_id = id;
  r.grant_date = date;
  r.group_code = group;
  r.novelty_count = k;
  r.is_focal = focal;
  return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream f(path);
  f << content;
  return path;
}

}  // namespace

TEST_CASE("date arithmetic") {
  CHECK(to_day_number({1970, 1, 1}) == 0);
  CHECK(format_date(add_months(d(2000, 1, 31), 1)) == "2000-02-29");
  CHECK(format_date(add_months(d(1999, 12, 15), 1)) == "2000-01-15");
  CHECK(*parse_date("1987-03") == d(1987, 3, 1));
  CHECK(*parse_date("1987-03-09") == d(1987, 3, 9));
  CHECK(!parse_date("1987-13-01"));
  CHECK(!parse_date("1987-02-30"));
  CHECK(!parse_date("xyz"));
}

TEST_CASE("load_corpus: structural example and dedup") {
  auto patents = write_temp("c_patents.csv",
                            "patent_id,grant_date,group_code,novelty_count,is_focal,case_label\n"
                            "A,1990-01-01,G0,3,1,\n"
                            "B,1991-01-01,G0,0,1,\n"
                            "C,1992-01-01,G0,1,1,1\n");
  auto citations = write_temp("c_citations.csv",
                              "citing_id,cited_id\n"
                              "B,A\nC,A\nB,A\n");
  CitationCorpus corpus = load_corpus(patents, citations);
  CHECK(corpus.size() == 3);
  CHECK(corpus.edge_count() == 2);  // duplicate (B,A) stored once
  CHECK(corpus.stats().duplicate_edges == 1);
  auto a = corpus.find("A");
  REQUIRE(a);
  CHECK(corpus.citers_of(*a).size() == 2);
  CHECK(corpus.record(*corpus.find("C")).case_label == true);
}

TEST_CASE("load_corpus: implicit records from unknown edge endpoints") {
  auto patents = write_temp("c2_patents.csv",
                            "patent_id,grant_date,group_code,novelty_count,is_focal,case_label\n"
                            "B,1991-01-01,G0,0,1,\n");
  auto citations = write_temp("c2_citations.csv", "citing_id,cited_id\nB,X\n");
  CitationCorpus corpus = load_corpus(patents, citations);
  CHECK(corpus.size() == 2);
  auto x = corpus.find("X");
  REQUIRE(x);
  CHECK_FALSE(corpus.record(*x).is_focal);
  CHECK_FALSE(corpus.record(*x).grant_date.has_value());
  CHECK(corpus.citers_of(*x).size() == 1);
  CHECK(corpus.stats().implicit_records == 1);
}

TEST_CASE("load_corpus: errors name file and line") {
  auto patents = write_temp("c3_patents.csv",
                            "patent_id,grant_date,group_code,novelty_count,is_focal,case_label\n"
                            "A,notadate,G0,3,1,\n");
  auto citations = write_temp("c3_citations.csv", "citing_id,cited_id\n");
  CHECK_THROWS_WITH_AS(load_corpus(patents, citations),
                       doctest::Contains("grant_date"), DataError);
  CHECK_THROWS_WITH_AS(load_corpus(patents, citations), doctest::Contains(":2:"), DataError);

  auto dup = write_temp("c4_patents.csv",
                        "patent_id,grant_date,group_code,novelty_count,is_focal,case_label\n"
                        "A,1990-01-01,G0,3,1,\n"
                        "A,1990-01-01,G1,3,1,\n");
  CHECK_THROWS_AS(load_corpus(dup, citations), DataError);

  auto bad_cols = write_temp("c5_patents.csv",
                             "patent_id,grant_date,group_code,novelty_count,is_focal,case_label\n"
                             "A,1990-01-01,G0,3\n");
  CHECK_THROWS_WITH_AS(load_corpus(bad_cols, citations), doctest::Contains("expected 6 fields"),
                       DataError);
}

TEST_CASE("self-citations rejected with a count") {
  CorpusBuilder b;
  b.add_patent(patent("A", d(1990, 1, 1)));
  b.add_citation("A", "A");
  CitationCorpus corpus = b.build();
  CHECK(corpus.edge_count() == 0);
  CHECK(corpus.stats().self_citation_edges == 1);
}

TEST_CASE("successor_partition: figure-1 example") {
  CorpusBuilder b;
  b.add_patent(patent("b", d(1985, 1, 1)));
  b.add_patent(patent("f", d(1990, 1, 1)));
  b.add_patent(patent("c1", d(1991, 1, 1)));
  b.add_patent(patent("c2", d(1991, 6, 1)));
  b.add_patent(patent("c3", d(1992, 1, 1)));
  b.add_citation("f", "b");
  b.add_citation("c1", "f");
  b.add_citation("c2", "f");
  b.add_citation("c2", "b");
  b.add_citation("c3", "b");
  CitationCorpus corpus = b.build();
  SuccessorCounts c = successor_partition(corpus, *corpus.find("f"), 60);
  CHECK(c.F == 2);
  CHECK(c.N_i == 1);
  CHECK(c.N_j == 1);
  CHECK(c.N_k == 1);
}

TEST_CASE("successor_partition: no prior art") {
  CorpusBuilder b;
  b.add_patent(patent("f", d(1990, 1, 1)));
  b.add_patent(patent("c", d(1991, 1, 1)));
  b.add_citation("c", "f");
  CitationCorpus corpus = b.build();
  SuccessorCounts c = successor_partition(corpus, *corpus.find("f"), 60);
  CHECK(c.F == 1);
  CHECK(c.N_i == 1);
  CHECK(c.N_j == 0);
  CHECK(c.N_k == 0);
}

TEST_CASE("successor_partition: window boundary") {
  CorpusBuilder b;
  b.add_patent(patent("f", d(1990, 1, 1)));
  b.add_patent(patent("in", d(1995, 1, 1)));    // exactly grant+60 months: inside
  b.add_patent(patent("out", d(1995, 2, 1)));   // one month past: outside
  b.add_citation("in", "f");
  b.add_citation("out", "f");
  CitationCorpus corpus = b.build();
  SuccessorCounts c = successor_partition(corpus, *corpus.find("f"), 60);
  CHECK(c.F == 1);
  CHECK(c.N_i == 1);
}

TEST_CASE("successor_partition: errors") {
  CorpusBuilder b;
  b.add_patent(patent("f", d(1990, 1, 1)));
  b.add_patent(patent("n", d(1991, 1, 1), /*focal=*/false));
  CitationCorpus corpus = b.build();
  CHECK_THROWS_AS(successor_partition(corpus, *corpus.find("n"), 60), DataError);
  CHECK_THROWS_AS(successor_partition(corpus, *corpus.find("f"), 0), DataError);
}

TEST_CASE("successor_partition: undated citers are excluded") {
  CorpusBuilder b;
  b.add_patent(patent("f", d(1990, 1, 1)));
  b.add_citation("ghost", "f");  // implicit record, no date
  CitationCorpus corpus = b.build();
  SuccessorCounts c = successor_partition(corpus, *corpus.find("f"), 60);
  CHECK(c.F == 0);
}

TEST_CASE("successor_partition: invariant to edge input order") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::pair<std::string, std::string>> edges;
    const int n = 12;
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (rng() % 3 == 0) edges.emplace_back("P" + std::to_string(i), "P" + std::to_string(j));
    auto build = [&](const std::vector<std::pair<std::string, std::string>>& es) {
      CorpusBuilder b;
      for (int i = 0; i < n; ++i)
        b.add_patent(patent("P" + std::to_string(i), d(1990, 1, 1) + i * 100));
      for (auto& [c, t] : es) b.add_citation(c, t);
      return b.build();
    };
    CitationCorpus c1 = build(edges);
    std::shuffle(edges.begin(), edges.end(), rng);
    CitationCorpus c2 = build(edges);
    for (int i = 0; i < n; ++i) {
      auto a = successor_partition(c1, *c1.find("P" + std::to_string(i)), 60);
      auto bb = successor_partition(c2, *c2.find("P" + std::to_string(i)), 60);
      CHECK(a.N_i == bb.N_i);
      CHECK(a.N_j == bb.N_j);
      CHECK(a.N_k == bb.N_k);
    }
  }
}

TEST_CASE("successor_partition: shrinking the window never increases counts") {
  SynthConfig cfg;
  cfg.n_patents = 120;
  cfg.seed = 3;
  SynthCorpus synth = generate_corpus(cfg);
  const CitationCorpus& corpus = synth.corpus;
  PartitionScratch scratch;
  for (PatentIndex i = 0; i < corpus.size(); ++i) {
    if (!corpus.record(i).is_focal) continue;
    auto wide = successor_partition(corpus, i, 60, scratch);
    auto narrow = successor_partition(corpus, i, 24, scratch);
    CHECK(narrow.F <= wide.F);
    CHECK(narrow.N_i <= wide.N_i);
    CHECK(narrow.N_j <= wide.N_j);
    CHECK(narrow.N_k <= wide.N_k);
    CHECK(wide.F == wide.N_i + wide.N_j);
  }
}

TEST_CASE("long_term_citations") {
  CorpusBuilder b;
  b.add_patent(patent("f", d(1990, 1, 1)));
  b.add_patent(patent("c1", d(1991, 1, 1)));
  b.add_patent(patent("c2", d(2000, 1, 1)));
  b.add_patent(patent("c3", d(2015, 1, 1)));
  b.add_citation("c1", "f");
  b.add_citation("c2", "f");
  b.add_citation("c3", "f");
  CitationCorpus corpus = b.build();
  PatentIndex f = *corpus.find("f");
  CHECK(long_term_citations(corpus, f, d(2010, 1, 1)) == 2);
  CHECK(long_term_citations(corpus, f, d(1990, 1, 1)) == 0);  // horizon = grant
  CHECK_THROWS_AS(long_term_citations(corpus, f, d(1980, 1, 1)), DataError);

  // matches a brute-force date-filtered count on a random corpus
  SynthConfig cfg;
  cfg.n_patents = 150;
  cfg.seed = 11;
  SynthCorpus synth = generate_corpus(cfg);
  const DayNumber horizon = d(1995, 6, 1);
  for (PatentIndex i = 0; i < synth.corpus.size(); ++i) {
    const auto& rec = synth.corpus.record(i);
    if (!rec.grant_date || *rec.grant_date > horizon) continue;
    long long expect = 0;
    for (PatentIndex c = 0; c < synth.corpus.size(); ++c) {
      const auto& cr = synth.corpus.record(c);
      if (!cr.grant_date || *cr.grant_date <= *rec.grant_date || *cr.grant_date > horizon)
        continue;
      for (PatentIndex t : synth.corpus.cited_by(c))
        if (t == i) ++expect;
    }
    CHECK(long_term_citations(synth.corpus, i, horizon) == expect);
  }
}

TEST_CASE("winsorize_upper") {
  CHECK(winsorize_upper({1, 2, 3, 100}, 0.75) == std::vector<double>{1, 2, 3, 3});
  CHECK(winsorize_upper({5, 5, 5}, 0.5) == std::vector<double>{5, 5, 5});
  CHECK_THROWS_AS(winsorize_upper({}, 0.5), DataError);

  // equals a sort-based oracle
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(1 + rng() % 40);
    for (double& x : v) x = static_cast<double>(rng() % 1000) / 10.0;
    const double q = 0.05 + 0.9 * static_cast<double>(rng() % 100) / 100.0;
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    const double cap = sorted[static_cast<std::size_t>(
                           std::ceil(q * static_cast<double>(v.size()))) - 1];
    std::vector<double> expect(v);
    for (double& x : expect)
      if (x > cap) x = cap;
    CHECK(winsorize_upper(v, q) == expect);
  }
}

TEST_CASE("corpus round-trip: write then load is identical") {
  SynthConfig cfg;
  cfg.n_patents = 80;
  cfg.seed = 17;
  cfg.planted_fraction = 0.2;
  SynthCorpus synth = generate_corpus(cfg);
  auto pfile = (std::filesystem::temp_directory_path() / "rt_patents.csv").string();
  auto cfile = (std::filesystem::temp_directory_path() / "rt_citations.csv").string();
  write_corpus(synth.corpus, pfile, cfile);
  CitationCorpus loaded = load_corpus(pfile, cfile);
  REQUIRE(loaded.size() == synth.corpus.size());
  CHECK(loaded.edge_count() == synth.corpus.edge_count());
  for (PatentIndex i = 0; i < synth.corpus.size(); ++i) {
    const auto& a = synth.corpus.record(i);
    auto j = loaded.find(a.patent_id);
    REQUIRE(j);
    const auto& b = loaded.record(*j);
    CHECK(a.grant_date == b.grant_date);
    CHECK(a.group_code == b.group_code);
    CHECK(a.novelty_count == b.novelty_count);
    CHECK(a.is_focal == b.is_focal);
    CHECK(a.case_label == b.case_label);
    CHECK(synth.corpus.citers_of(i).size() == loaded.citers_of(*j).size());
  }
}
