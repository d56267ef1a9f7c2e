#include "doctest.h"

#include <cmath>
#include <random>

#include "dflex/calibrate.hpp"

using namespace dflex;

namespace {

DflexParams theta(std::vector<double> w, double sigma) {
  DflexParams p;
  p.weights = std::move(w);
  p.sigma = sigma;
  p.mode = MeanMode::exact;
  return p;
}

const std::vector<double> kUniform{1.0 / 3, 1.0 / 3, 1.0 / 3};

// Straight-line reimplementation of the membership likelihood, used as an oracle.
double loglik_oracle(const DflexParams& th, const CalibrationSample& s) {
  const double h =
      static_cast<double>(s.cases.size()) / static_cast<double>(s.cases.size() + s.population.size());
  double ll = 0.0;
  for (const auto& g : s.cases) {
    double p = std::min(std::max(generalized_mean(g, th), 1e-9), 1.0 - 1e-9);
    double r = h * p / s.prevalence;
    ll += std::log(r) - std::log(r + 1.0 - h);
  }
  for (const auto& g : s.population) {
    double p = std::min(std::max(generalized_mean(g, th), 1e-9), 1.0 - 1e-9);
    double r = h * p / s.prevalence;
    ll += std::log(1.0 - h) - std::log(r + 1.0 - h);
  }
  return ll;
}

}  // namespace

TEST_CASE("contaminated_loglik: closed forms") {
  // symmetric single-row strata with P = 0.5 everywhere
  CalibrationSample s;
  s.cases = {{0.5, 0.5, 0.5}};
  s.population = {{0.5, 0.5, 0.5}};
  s.prevalence = 0.5;
  CHECK(contaminated_loglik(theta(kUniform, 1.0), s) ==
        doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-14));

  // P = pi for every row -> membership probability h for cases, 1-h for population
  CalibrationSample u;
  u.cases = {{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}};
  u.population = {{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}};
  u.prevalence = 0.3;
  const double h = 2.0 / 5.0;
  CHECK(contaminated_loglik(theta(kUniform, 1.0), u) ==
        doctest::Approx(2.0 * std::log(h) + 3.0 * std::log(1.0 - h)).epsilon(1e-14));
}

TEST_CASE("contaminated_loglik: matches independent oracle and scales under duplication") {
  std::mt19937_64 rng(3);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int rep = 0; rep < 50; ++rep) {
    CalibrationSample s;
    for (int i = 0; i < 8; ++i)
      s.cases.push_back({u01() * 0.99 + 0.01, u01() * 0.99 + 0.01, u01() * 0.99 + 0.01});
    for (int i = 0; i < 30; ++i)
      s.population.push_back({u01() * 0.99 + 0.01, u01() * 0.99 + 0.01, u01() * 0.99 + 0.01});
    s.prevalence = 0.05 + 0.4 * u01();
    DflexParams th = theta(kUniform, -8.0 + 9.0 * u01());
    const double ll = contaminated_loglik(th, s);
    CHECK(ll == doctest::Approx(loglik_oracle(th, s)).epsilon(1e-12));

    // doubling the whole sample doubles the value (h unchanged)
    CalibrationSample d = s;
    d.cases.insert(d.cases.end(), s.cases.begin(), s.cases.end());
    d.population.insert(d.population.end(), s.population.begin(), s.population.end());
    CHECK(contaminated_loglik(th, d) == doctest::Approx(2.0 * ll).epsilon(1e-12));

    // row order irrelevant
    CalibrationSample r = s;
    std::reverse(r.cases.begin(), r.cases.end());
    std::reverse(r.population.begin(), r.population.end());
    CHECK(contaminated_loglik(th, r) == doctest::Approx(ll).epsilon(1e-12));
  }
}

TEST_CASE("contaminated_loglik: validation errors") {
  CalibrationSample s;
  s.cases = {{0.5, 0.5, 0.5}};
  s.population = {{0.5, 0.5, 0.5}};
  s.prevalence = 1.5;
  CHECK_THROWS_AS(contaminated_loglik(theta(kUniform, 1.0), s), DataError);
  s.prevalence = 0.5;
  s.cases.clear();
  CHECK_THROWS_AS(contaminated_loglik(theta(kUniform, 1.0), s), DataError);
}

TEST_CASE("reparameterization round-trip") {
  CalibrationConfig cfg;
  std::mt19937_64 rng(5);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int rep = 0; rep < 200; ++rep) {
    double a = u01() + 0.01, b = u01() + 0.01, c = u01() + 0.01;
    const double sum = a + b + c;
    std::vector<double> alpha{a / sum, b / sum, c / sum};
    const double sigma = cfg.sigma_lo + (cfg.sigma_hi - cfg.sigma_lo) * (0.01 + 0.98 * u01());
    auto u = detail::to_unconstrained(alpha, sigma, cfg);
    std::vector<double> alpha2;
    double sigma2 = 0.0;
    detail::from_unconstrained(u, alpha2, sigma2, cfg);
    for (int s = 0; s < 3; ++s) CHECK(alpha2[s] == doctest::Approx(alpha[s]).epsilon(1e-12));
    CHECK(sigma2 == doctest::Approx(sigma).epsilon(1e-9));
  }
}

TEST_CASE("fit_ml: flat sample is flagged unidentified") {
  CalibrationSample s;
  for (int i = 0; i < 5; ++i) s.cases.push_back({0.4, 0.4, 0.4});
  for (int i = 0; i < 20; ++i) s.population.push_back({0.4, 0.4, 0.4});
  s.prevalence = 0.2;
  FitResult fit = fit_ml(s, theta(kUniform, -1.0));
  CHECK_FALSE(fit.converged);
}

TEST_CASE("fit_ml: cases at high min(g) push sigma negative") {
  // cases concentrated where min(g) is near 1; population uniform on (0,1]^3
  std::mt19937_64 rng(11);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  CalibrationSample s;
  for (int i = 0; i < 60; ++i)
    s.cases.push_back({0.9 + 0.1 * u01(), 0.9 + 0.1 * u01(), 0.9 + 0.1 * u01()});
  for (int i = 0; i < 1000; ++i)
    s.population.push_back({u01() * 0.999 + 0.001, u01() * 0.999 + 0.001, u01() * 0.999 + 0.001});
  s.prevalence = 0.05;
  FitResult fit = fit_ml(s, theta(kUniform, -1.0));
  CHECK(fit.sigma <= -2.0);

  // determinism: a second run is identical
  FitResult fit2 = fit_ml(s, theta(kUniform, -1.0));
  CHECK(fit.sigma == fit2.sigma);
  CHECK(fit.alpha == fit2.alpha);
  CHECK(fit.log_likelihood == fit2.log_likelihood);

  // simplex invariant
  double sum = 0;
  for (double a : fit.alpha) sum += a;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.min_approx_gap >= 0.0);
}

TEST_CASE("fit_gmm: moment norm vanishes at the ML optimum and agrees with ML") {
  std::mt19937_64 rng(13);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  CalibrationSample s;
  for (int i = 0; i < 40; ++i)
    s.cases.push_back({0.8 + 0.2 * u01(), 0.8 + 0.2 * u01(), 0.8 + 0.2 * u01()});
  for (int i = 0; i < 600; ++i)
    s.population.push_back({u01() * 0.999 + 0.001, u01() * 0.999 + 0.001, u01() * 0.999 + 0.001});
  s.prevalence = 0.06;
  FitResult ml = fit_ml(s, theta(kUniform, -1.0));
  FitResult gmm = fit_gmm(s, theta(kUniform, -1.0));
  for (int d = 0; d < 3; ++d) CHECK(std::abs(gmm.alpha[d] - ml.alpha[d]) <= 1e-3);
  CHECK(std::abs(gmm.sigma - ml.sigma) <= 1e-2);
}

TEST_CASE("fit_gmm: degenerate flat sample flagged") {
  CalibrationSample s;
  for (int i = 0; i < 4; ++i) s.cases.push_back({0.5, 0.5, 0.5});
  for (int i = 0; i < 16; ++i) s.population.push_back({0.5, 0.5, 0.5});
  s.prevalence = 0.2;
  FitResult fit = fit_gmm(s, theta(kUniform, -1.0));
  CHECK_FALSE(fit.converged);
}
