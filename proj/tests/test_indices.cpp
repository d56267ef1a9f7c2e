#include "doctest.h"

#include <random>

#include "dflex/indices.hpp"

using namespace dflex;

TEST_CASE("disruption_indices: spec examples") {
  {
    IndexSet s = disruption_indices({5, 5, 0, 0});
    CHECK(*s.cd == 1.0);
    CHECK(*s.bdtc == 1.0);
    CHECK(*s.csf_d == 1.0);
    CHECK(*s.csf_c == 0.0);
    CHECK(*s.bwh == 1.0);
    CHECK(*s.mcd == 5.0);
  }
  {
    IndexSet s = disruption_indices({5, 0, 5, 0});
    CHECK(*s.cd == -1.0);
    CHECK(*s.bdtc == -1.0);
    CHECK(*s.csf_d == 0.0);
    CHECK(*s.csf_c == 1.0);
    CHECK(*s.bwh == 0.0);
    CHECK(*s.mcd == -5.0);
  }
  {
    IndexSet s = disruption_indices({4, 3, 1, 2});
    CHECK(*s.cd == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(*s.mcd == doctest::Approx(8.0 / 6.0).epsilon(1e-15));
    CHECK(*s.mcd == 4.0 * *s.cd);
  }
  {
    IndexSet s = disruption_indices({0, 0, 0, 4});
    CHECK(*s.cd == 0.0);
    CHECK(*s.csf_d == 0.0);
    CHECK(*s.csf_c == 0.0);
    CHECK(!s.bdtc);
    CHECK(!s.bwh);
    CHECK(*s.mcd == 0.0);
  }
  {
    IndexSet s = disruption_indices({0, 0, 0, 0});
    CHECK(!s.cd);
    CHECK(!s.bdtc);
    CHECK(!s.csf_d);
    CHECK(!s.csf_c);
    CHECK(!s.bwh);
    CHECK(!s.mcd);
  }
  CHECK_THROWS_AS(disruption_indices({0, -1, 0, 0}), DataError);
}

TEST_CASE("indices fuzz: identities, ranges, monotonicity") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 100000; ++rep) {
    SuccessorCounts c;
    c.N_i = static_cast<long long>(rng() % 40);
    c.N_j = static_cast<long long>(rng() % 40);
    c.N_k = static_cast<long long>(rng() % 40);
    c.F = c.N_i + c.N_j;
    IndexSet s = disruption_indices(c);

    if (s.cd) {
      // rational identity: mcd is the single division F*(N_i-N_j) / total
      const long long total = c.N_i + c.N_j + c.N_k;
      CHECK(*s.mcd ==
            static_cast<double>(c.F * (c.N_i - c.N_j)) / static_cast<double>(total));
      CHECK(*s.cd == doctest::Approx(*s.csf_d - *s.csf_c).epsilon(1e-14));
      CHECK(*s.cd >= -1.0);
      CHECK(*s.cd <= 1.0);
      CHECK(*s.csf_d + *s.csf_c <= 1.0 + 1e-15);
    }
    if (s.bdtc) {
      CHECK(*s.bdtc >= -1.0);
      CHECK(*s.bdtc <= 1.0);
      CHECK(*s.bwh >= 0.0);
      CHECK(*s.bwh <= 1.0);
    }

    // monotonicity in N_i and N_j
    SuccessorCounts up = c;
    ++up.N_i;
    up.F = up.N_i + up.N_j;
    IndexSet su = disruption_indices(up);
    if (s.cd && su.cd) CHECK(*su.cd >= *s.cd);
    if (s.bdtc && su.bdtc) CHECK(*su.bdtc >= *s.bdtc);
    if (s.csf_d && su.csf_d) CHECK(*su.csf_d >= *s.csf_d);
    if (s.bwh && su.bwh) CHECK(*su.bwh >= *s.bwh);

    SuccessorCounts dj = c;
    ++dj.N_j;
    dj.F = dj.N_i + dj.N_j;
    IndexSet sj = disruption_indices(dj);
    if (s.cd && sj.cd) CHECK(*sj.cd <= *s.cd);
    if (s.bdtc && sj.bdtc) CHECK(*sj.bdtc <= *s.bdtc);
    if (s.bwh && sj.bwh) CHECK(*sj.bwh <= *s.bwh);
  }
}

TEST_CASE("parse_index_choice") {
  CHECK(*parse_index_choice("cd") == IndexChoice::cd);
  CHECK(*parse_index_choice("bdtc") == IndexChoice::bdtc);
  CHECK(*parse_index_choice("csf_d") == IndexChoice::csf_d);
  CHECK(*parse_index_choice("bwh") == IndexChoice::bwh);
  CHECK(!parse_index_choice("nope"));
  CHECK(index_choice_name(IndexChoice::bdtc) == "bdtc");
}
