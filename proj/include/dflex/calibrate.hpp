#pragma once
// Parameter estimation from a labeled case set plus a contaminated random
// population sample (case-population design).

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dflex/error.hpp"
#include "dflex/nelder_mead.hpp"
#include "dflex/power_mean.hpp"

namespace dflex {

struct CalibrationSample {
  std::vector<std::vector<double>> cases;       // rows with outcome = 1
  std::vector<std::vector<double>> population;  // contaminated random draw
  double prevalence = 0.0;                      // pi, population share of positives

  double sampling_fraction() const {
    return static_cast<double>(cases.size()) /
           static_cast<double>(cases.size() + population.size());
  }

  void validate() const {
    if (cases.empty()) throw DataError("CalibrationSample: empty case stratum");
    if (population.empty()) throw DataError("CalibrationSample: empty population stratum");
    if (!(prevalence > 0.0 && prevalence < 1.0))
      throw DataError("CalibrationSample: prevalence pi must be in (0,1)");
  }
};

struct FitResult {
  std::vector<double> alpha;
  double sigma = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  double min_approx_gap = 0.0;  // max |M_sigma - min| over the fitting data
  std::uint64_t seed = 0;
};

struct CalibrationConfig {
  double sigma_lo = -50.0;
  double sigma_hi = 10.0;
  double prob_clamp = 1e-9;  // keeps log() finite when P hits 0 or 1
  int max_iter = 4000;
  std::uint64_t seed = 0;
};

namespace detail {

// Unconstrained <-> constrained parameterization: (t_1..t_{S-1}, v) with
// alpha = softmax(t_1..t_{S-1}, 0) and sigma = lo + (hi-lo)*logistic(v).
inline std::vector<double> to_unconstrained(std::span<const double> alpha, double sigma,
                                            const CalibrationConfig& cfg) {
  const std::size_t S = alpha.size();
  std::vector<double> u(S);
  const double ref = std::max(alpha[S - 1], 1e-300);
  for (std::size_t s = 0; s + 1 < S; ++s)
    u[s] = std::log(std::max(alpha[s], 1e-300) / ref);
  double p = (sigma - cfg.sigma_lo) / (cfg.sigma_hi - cfg.sigma_lo);
  p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
  u[S - 1] = std::log(p / (1.0 - p));
  return u;
}

inline void from_unconstrained(std::span<const double> u, std::vector<double>& alpha,
                               double& sigma, const CalibrationConfig& cfg) {
  const std::size_t S = u.size();
  alpha.assign(S, 0.0);
  double mx = 0.0;  // implicit last exponent is 0
  for (std::size_t s = 0; s + 1 < S; ++s) mx = std::max(mx, u[s]);
  double sum = 0.0;
  for (std::size_t s = 0; s + 1 < S; ++s) {
    alpha[s] = std::exp(u[s] - mx);
    sum += alpha[s];
  }
  alpha[S - 1] = std::exp(-mx);
  sum += alpha[S - 1];
  for (double& a : alpha) a /= sum;
  const double v = u[S - 1];
  sigma = cfg.sigma_lo + (cfg.sigma_hi - cfg.sigma_lo) / (1.0 + std::exp(-v));
}

}  // namespace detail

// Conditional likelihood of stratum membership given covariates. With
// P(x) the model probability of a positive outcome, h the case sampling
// fraction and r = h*P/pi, a case row contributes log(r/(r+1-h)) and a
// population row log((1-h)/(r+1-h)).
inline double contaminated_loglik(const DflexParams& theta, const CalibrationSample& sample,
                                  double prob_clamp = 1e-9) {
  sample.validate();
  const double h = sample.sampling_fraction();
  const double pi = sample.prevalence;
  auto prob = [&](const std::vector<double>& g) {
    double p = generalized_mean(g, theta);
    return std::min(std::max(p, prob_clamp), 1.0 - prob_clamp);
  };
  double ll = 0.0;
  for (const auto& g : sample.cases) {
    const double r = h * prob(g) / pi;
    ll += std::log(r / (r + (1.0 - h)));
  }
  for (const auto& g : sample.population) {
    const double r = h * prob(g) / pi;
    ll += std::log((1.0 - h) / (r + (1.0 - h)));
  }
  return ll;
}

namespace detail {

inline double objective(const std::vector<double>& u, const CalibrationSample& sample,
                        const CalibrationConfig& cfg) {
  DflexParams theta;
  double sigma = 0.0;
  from_unconstrained(u, theta.weights, sigma, cfg);
  theta.sigma = sigma;
  return -contaminated_loglik(theta, sample, cfg.prob_clamp);
}

// Deterministic multi-start grid: a few weight corners crossed with a few
// sigma levels spanning the box.
inline std::vector<std::vector<double>> start_points(std::size_t S, const CalibrationConfig& cfg) {
  std::vector<std::vector<double>> alphas;
  alphas.push_back(std::vector<double>(S, 1.0 / static_cast<double>(S)));
  {
    std::vector<double> tilted(S, 0.5 / static_cast<double>(S));
    tilted[0] += 0.5;
    alphas.push_back(tilted);
  }
  const std::array<double, 4> sigmas = {-20.0, -8.0, -1.0, 1.0};
  std::vector<std::vector<double>> starts;
  for (const auto& a : alphas)
    for (double s : sigmas) starts.push_back(to_unconstrained(a, s, cfg));
  return starts;
}

inline double max_min_gap(const DflexParams& theta, const CalibrationSample& sample) {
  double worst = 0.0;
  for (const auto* rows : {&sample.cases, &sample.population})
    for (const auto& g : *rows)
      worst = std::max(worst, std::abs(generalized_mean(g, theta) - dflex_min(g)));
  return worst;
}

inline FitResult finish(const std::vector<double>& u, double neg_ll, bool converged,
                        int iterations, const CalibrationSample& sample,
                        const CalibrationConfig& cfg) {
  FitResult fit;
  DflexParams theta;
  from_unconstrained(u, theta.weights, fit.sigma, cfg);
  theta.sigma = fit.sigma;
  fit.alpha = theta.weights;
  fit.log_likelihood = -neg_ll;
  fit.converged = converged;
  fit.iterations = iterations;
  fit.min_approx_gap = max_min_gap(theta, sample);
  fit.seed = cfg.seed;
  return fit;
}

}  // namespace detail

inline FitResult fit_ml(const CalibrationSample& sample, const DflexParams& init,
                        const CalibrationConfig& cfg = {}) {
  sample.validate();
  init.validate();
  const std::size_t S = init.weights.size();

  auto f = [&](const std::vector<double>& u) { return detail::objective(u, sample, cfg); };

  std::vector<std::vector<double>> starts = detail::start_points(S, cfg);
  starts.insert(starts.begin(), detail::to_unconstrained(init.weights, init.sigma, cfg));

  NelderMeadOptions opt;
  opt.max_iter = cfg.max_iter;
  opt.f_tol = 1e-10;
  opt.x_tol = 1e-8;

  NelderMeadResult best;
  std::vector<NelderMeadResult> all;
  bool have_best = false;
  int total_iter = 0;
  for (const auto& u0 : starts) {
    NelderMeadResult r = nelder_mead(f, u0, opt);
    total_iter += r.iterations;
    all.push_back(r);
    if (!have_best || r.fx < best.fx) {
      best = all.back();
      have_best = true;
    }
  }

  // Identification check: if several starts tie on the objective but land on
  // clearly different parameters, the optimum is not unique (flat likelihood).
  bool identified = true;
  FitResult best_fit = detail::finish(best.x, best.fx, best.converged, total_iter, sample, cfg);
  for (const auto& r : all) {
    if (r.fx > best.fx + 1e-6 * (1.0 + std::abs(best.fx))) continue;
    FitResult other = detail::finish(r.x, r.fx, r.converged, 0, sample, cfg);
    for (std::size_t s = 0; s < S; ++s)
      if (std::abs(other.alpha[s] - best_fit.alpha[s]) > 0.05) identified = false;
  }
  if (!identified || !best.converged) best_fit.converged = false;
  return best_fit;
}

// Just-identified GMM on the score equations of the membership likelihood:
// moments = average numeric gradient (central differences, step 1e-5) on the
// unconstrained parameterization. Solved by damped Newton with a numeric
// Jacobian, started from the ML path.
inline FitResult fit_gmm(const CalibrationSample& sample, const DflexParams& init,
                         const CalibrationConfig& cfg = {}) {
  sample.validate();
  const double n = static_cast<double>(sample.cases.size() + sample.population.size());
  const double grad_step = 1e-5;

  auto mean_obj = [&](const std::vector<double>& u) {
    return detail::objective(u, sample, cfg) / n;
  };
  auto moments = [&](const std::vector<double>& u) {
    std::vector<double> m(u.size());
    for (std::size_t d = 0; d < u.size(); ++d) {
      std::vector<double> up = u, dn = u;
      up[d] += grad_step;
      dn[d] -= grad_step;
      m[d] = (mean_obj(up) - mean_obj(dn)) / (2.0 * grad_step);
    }
    return m;
  };
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  FitResult ml = fit_ml(sample, init, cfg);
  std::vector<double> u = detail::to_unconstrained(ml.alpha, ml.sigma, cfg);
  const std::size_t dim = u.size();

  bool solved = false;
  int iters = 0;
  std::vector<double> m = moments(u);
  for (; iters < 60; ++iters) {
    if (norm(m) <= 1e-6) {
      solved = true;
      break;
    }
    // numeric Jacobian of the moments
    const double jstep = 1e-4;
    std::vector<std::vector<double>> J(dim, std::vector<double>(dim));
    for (std::size_t d = 0; d < dim; ++d) {
      std::vector<double> up = u, dn = u;
      up[d] += jstep;
      dn[d] -= jstep;
      std::vector<double> mu = moments(up), md = moments(dn);
      for (std::size_t r = 0; r < dim; ++r) J[r][d] = (mu[r] - md[r]) / (2.0 * jstep);
    }
    // solve J * delta = m (Gaussian elimination with partial pivoting)
    std::vector<double> rhs = m;
    bool singular = false;
    for (std::size_t col = 0; col < dim && !singular; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < dim; ++r)
        if (std::abs(J[r][col]) > std::abs(J[piv][col])) piv = r;
      if (std::abs(J[piv][col]) < 1e-14) {
        singular = true;
        break;
      }
      std::swap(J[piv], J[col]);
      std::swap(rhs[piv], rhs[col]);
      for (std::size_t r = col + 1; r < dim; ++r) {
        const double fac = J[r][col] / J[col][col];
        for (std::size_t cc = col; cc < dim; ++cc) J[r][cc] -= fac * J[col][cc];
        rhs[r] -= fac * rhs[col];
      }
    }
    if (singular) break;
    std::vector<double> delta(dim, 0.0);
    for (std::size_t r = dim; r-- > 0;) {
      double acc = rhs[r];
      for (std::size_t cc = r + 1; cc < dim; ++cc) acc -= J[r][cc] * delta[cc];
      delta[r] = acc / J[r][r];
    }
    // damped step: accept the largest halving that reduces the moment norm
    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 12; ++half, lambda *= 0.5) {
      std::vector<double> trial = u;
      for (std::size_t d = 0; d < dim; ++d) trial[d] -= lambda * delta[d];
      std::vector<double> mt = moments(trial);
      if (norm(mt) < norm(m)) {
        u = std::move(trial);
        m = std::move(mt);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!solved && norm(m) <= 1e-6) solved = true;

  FitResult fit = detail::finish(u, detail::objective(u, sample, cfg), solved,
                                 ml.iterations + iters, sample, cfg);
  fit.converged = solved && ml.converged;
  return fit;
}

}  // namespace dflex
