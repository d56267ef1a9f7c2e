#pragma once
// Weighted generalized power mean with numerically stable special and limit cases.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dflex/error.hpp"

namespace dflex {

enum class MeanMode { exact, min, max, geometric };
enum class WeightMode { simplex, free_exponents };

inline std::optional<MeanMode> parse_mean_mode(const std::string& s) {
  if (s == "exact") return MeanMode::exact;
  if (s == "min") return MeanMode::min;
  if (s == "max") return MeanMode::max;
  if (s == "geometric") return MeanMode::geometric;
  return std::nullopt;
}

struct DflexParams {
  std::vector<double> weights;  // alpha_1..alpha_S, non-negative
  double sigma = 1.0;           // finite, or +-infinity
  MeanMode mode = MeanMode::exact;
  WeightMode weight_mode = WeightMode::simplex;
  double geometric_threshold = 1e-6;  // |sigma| at or below this -> geometric limit

  void validate() const {
    if (weights.empty()) throw NumericError("DflexParams: no weights (S = 0)");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw NumericError("DflexParams: negative or NaN weight");
      sum += w;
    }
    if (weight_mode == WeightMode::simplex) {
      if (std::abs(sum - 1.0) > 1e-9)
        throw NumericError("DflexParams: simplex weights must sum to 1 (got " +
                           std::to_string(sum) + ")");
    } else if (mode != MeanMode::geometric && !(std::abs(sigma) <= geometric_threshold)) {
      throw NumericError("DflexParams: free-exponent weights are only defined in geometric mode");
    }
    if (std::isnan(sigma)) throw NumericError("DflexParams: sigma is NaN");
  }
};

// Coordinate-wise minimum; the strict-complements approximation.
inline double dflex_min(std::span<const double> g) {
  if (g.empty()) throw NumericError("dflex_min: empty input");
  return *std::min_element(g.begin(), g.end());
}

namespace detail {

inline double weighted_geometric(std::span<const double> g, std::span<const double> w) {
  double log_acc = 0.0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (w[s] == 0.0) continue;
    if (g[s] == 0.0) return 0.0;
    log_acc += w[s] * std::log(g[s]);
  }
  return std::exp(log_acc);
}

// Extremum over coordinates with positive weight.
inline double weighted_extremum(std::span<const double> g, std::span<const double> w, bool want_min) {
  bool found = false;
  double ext = 0.0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (w[s] == 0.0) continue;
    if (!found || (want_min ? g[s] < ext : g[s] > ext)) ext = g[s];
    found = true;
  }
  if (!found) throw NumericError("generalized_mean: all weights are zero");
  return ext;
}

}  // namespace detail

inline double generalized_mean(std::span<const double> g, const DflexParams& params) {
  params.validate();
  if (g.size() != params.weights.size())
    throw NumericError("generalized_mean: dimension mismatch between scores and weights");
  for (double v : g)
    if (!(v >= 0.0 && v <= 1.0))
      throw NumericError("generalized_mean: scores must lie in [0,1]");

  const std::span<const double> w(params.weights);
  switch (params.mode) {
    case MeanMode::min: return dflex_min(g);
    case MeanMode::max: return *std::max_element(g.begin(), g.end());
    case MeanMode::geometric: return detail::weighted_geometric(g, w);
    case MeanMode::exact: break;
  }

  const double sigma = params.sigma;
  if (std::isinf(sigma)) return detail::weighted_extremum(g, w, sigma < 0.0);
  if (std::abs(sigma) <= params.geometric_threshold) return detail::weighted_geometric(g, w);

  // Factor out the pivot (min for sigma<0, max for sigma>0) so every
  // pow() argument stays in a safe range.
  const double pivot = detail::weighted_extremum(g, w, sigma < 0.0);
  if (pivot == 0.0) return 0.0;  // sigma<0 limit; for sigma>0 all g with alpha>0 are 0
  double acc = 0.0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (w[s] == 0.0) continue;
    if (g[s] == 0.0) {
      if (sigma < 0.0) return 0.0;  // limit value of the mean with a vanishing coordinate
      continue;                     // 0^sigma = 0 contributes nothing for sigma>0
    }
    acc += w[s] * std::pow(g[s] / pivot, sigma);
  }
  return pivot * std::pow(acc, 1.0 / sigma);
}

struct ApproximationGap {
  double max_abs_gap = 0.0;
  double mean_abs_gap = 0.0;
  std::size_t argmax_row = 0;
};

// |M_sigma(g) - min(g)| over a table of score triples.
inline ApproximationGap approximation_gap(const DflexParams& params,
                                          std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw NumericError("approximation_gap: empty table");
  if (std::isinf(params.sigma) && params.mode == MeanMode::exact)
    throw NumericError("approximation_gap: sigma must be finite");
  ApproximationGap out;
  double total = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double gap = std::abs(generalized_mean(rows[r], params) - dflex_min(rows[r]));
    total += gap;
    if (gap > out.max_abs_gap) {
      out.max_abs_gap = gap;
      out.argmax_row = r;
    }
  }
  out.mean_abs_gap = total / static_cast<double>(rows.size());
  return out;
}

}  // namespace dflex
