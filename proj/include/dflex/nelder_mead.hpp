#pragma once
// Derivative-free simplex minimizer (Nelder-Mead), deterministic.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace dflex {

struct NelderMeadOptions {
  double initial_step = 0.5;
  double f_tol = 1e-12;   // spread of simplex function values
  double x_tol = 1e-10;   // spread of simplex vertices
  int max_iter = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0,
                                    const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> verts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += opt.initial_step;
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(verts[i]);

  NelderMeadResult res;
  auto order = [&] {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> v2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      v2[i] = verts[idx[i]];
      f2[i] = fv[idx[i]];
    }
    verts.swap(v2);
    fv.swap(f2);
  };

  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    order();
    double x_spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t d = 0; d < n; ++d)
        x_spread = std::max(x_spread, std::abs(verts[i][d] - verts[0][d]));
    if (std::abs(fv[n] - fv[0]) <= opt.f_tol && x_spread <= opt.x_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < n; ++d) centroid[d] += verts[i][d] / static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + t * (verts[n][d] - centroid[d]);
      return x;
    };

    std::vector<double> xr = blend(-1.0);
    double fr = f(xr);
    if (fr < fv[0]) {
      std::vector<double> xe = blend(-2.0);
      double fe = f(xe);
      if (fe < fr) {
        verts[n] = std::move(xe);
        fv[n] = fe;
      } else {
        verts[n] = std::move(xr);
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      verts[n] = std::move(xr);
      fv[n] = fr;
    } else {
      std::vector<double> xc = blend(fr < fv[n] ? -0.5 : 0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        verts[n] = std::move(xc);
        fv[n] = fc;
      } else {
        // shrink towards the best vertex
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t d = 0; d < n; ++d)
            verts[i][d] = verts[0][d] + 0.5 * (verts[i][d] - verts[0][d]);
          fv[i] = f(verts[i]);
        }
      }
    }
  }
  order();
  res.x = verts[0];
  res.fx = fv[0];
  res.iterations = iter;
  return res;
}

}  // namespace dflex
