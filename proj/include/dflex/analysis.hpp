#pragma once
// Diagnostic summaries, histograms, long-horizon validation bins, trend series,
// logistic regression, and single-patent reports over score tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dflex/corpus.hpp"
#include "dflex/normalize.hpp"

namespace dflex {

// Nearest-rank quantile: the ceil(p*n)-th smallest value.
inline double quantile_nearest(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("quantile_nearest: empty input");
  if (!(p > 0.0 && p <= 1.0)) throw DataError("quantile_nearest: p must be in (0,1]");
  const std::size_t n = values.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

struct GroupStats {
  std::size_t n = 0;
  std::optional<double> share_f_lt5;
  std::optional<double> mean_f, median_f;
  std::optional<double> mean_k, median_k;
  std::optional<double> mean_x3, median_x3;
  std::optional<double> mean_g1, mean_g2, mean_g3;
};

inline GroupStats summarize_rows(const ScoreTable& table, std::span<const char> mask) {
  GroupStats st;
  std::vector<double> fs, ks, x3s;
  double f_lt5 = 0, g1 = 0, g2 = 0, g3 = 0;
  std::size_t g3_n = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!mask[i]) continue;
    const ScoreRow& r = table.rows[i];
    ++st.n;
    fs.push_back(static_cast<double>(r.x1));
    ks.push_back(static_cast<double>(r.x2));
    if (r.x3) x3s.push_back(*r.x3);
    if (r.x1 < 5) f_lt5 += 1.0;
    g1 += r.g1;
    g2 += r.g2;
    if (r.g3) {
      g3 += *r.g3;
      ++g3_n;
    }
  }
  if (st.n == 0) return st;  // all statistics stay absent, not zero
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto median = [](std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + (n - 1) / 2, v.end());
    double lo = v[(n - 1) / 2];
    if (n % 2 == 1) return lo;
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    return 0.5 * (lo + v[n / 2]);
  };
  const double dn = static_cast<double>(st.n);
  st.share_f_lt5 = f_lt5 / dn;
  st.mean_f = mean(fs);
  st.median_f = median(fs);
  st.mean_k = mean(ks);
  st.median_k = median(ks);
  if (!x3s.empty()) {
    st.mean_x3 = mean(x3s);
    st.median_x3 = median(x3s);
  }
  st.mean_g1 = g1 / dn;
  st.mean_g2 = g2 / dn;
  if (g3_n > 0) st.mean_g3 = g3 / static_cast<double>(g3_n);
  return st;
}

enum class ThresholdMode { absolute, percentile };

struct ThresholdSummary {
  ThresholdMode mode = ThresholdMode::absolute;
  double threshold_input = 0.0;   // tau, or p
  double cutoff_value = 0.0;      // resolved selection cutoff
  std::size_t n_selected = 0;
  double share_selected = 0.0;
  GroupStats selected;
  GroupStats complement;
};

// Selection by measure >= tau (absolute) or measure >= nearest-rank p-quantile.
// Rows with an absent measure (NaN) are never selected.
inline ThresholdSummary threshold_summary(const ScoreTable& table,
                                          std::span<const double> measure, ThresholdMode mode,
                                          double value) {
  if (table.rows.empty()) throw DataError("threshold_summary: empty table");
  if (measure.size() != table.rows.size())
    throw DataError("threshold_summary: measure column length mismatch");
  ThresholdSummary out;
  out.mode = mode;
  out.threshold_input = value;
  if (mode == ThresholdMode::absolute) {
    out.cutoff_value = value;
  } else {
    std::vector<double> defined;
    for (double v : measure)
      if (!std::isnan(v)) defined.push_back(v);
    if (defined.empty()) throw DataError("threshold_summary: no defined measure values");
    out.cutoff_value = quantile_nearest(std::move(defined), value);
  }
  std::vector<char> sel(table.rows.size(), 0), comp(table.rows.size(), 0);
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const bool in = !std::isnan(measure[i]) && measure[i] >= out.cutoff_value;
    sel[i] = in;
    comp[i] = !in;
  }
  out.selected = summarize_rows(table, sel);
  out.complement = summarize_rows(table, comp);
  out.n_selected = out.selected.n;
  out.share_selected = static_cast<double>(out.n_selected) / static_cast<double>(table.rows.size());
  return out;
}

// Joint cutoffs, e.g. cd > 0 together with F > e^2.
struct JointCutoff {
  std::function<std::optional<double>(const ScoreRow&)> column;
  double min_exclusive = 0.0;
};

inline ThresholdSummary joint_threshold_summary(const ScoreTable& table,
                                                std::span<const JointCutoff> cuts) {
  if (table.rows.empty()) throw DataError("joint_threshold_summary: empty table");
  ThresholdSummary out;
  std::vector<char> sel(table.rows.size(), 0), comp(table.rows.size(), 0);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    bool in = true;
    for (const auto& cut : cuts) {
      auto v = cut.column(table.rows[i]);
      if (!v || !(*v > cut.min_exclusive)) {
        in = false;
        break;
      }
    }
    sel[i] = in;
    comp[i] = !in;
  }
  out.selected = summarize_rows(table, sel);
  out.complement = summarize_rows(table, comp);
  out.n_selected = out.selected.n;
  out.share_selected = static_cast<double>(out.n_selected) / static_cast<double>(table.rows.size());
  return out;
}

struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<std::size_t> counts;
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

inline Histogram histogram(std::span<const double> values, std::size_t n_bins, double lo,
                           double hi) {
  if (values.empty()) throw DataError("histogram: empty input");
  if (n_bins < 1) throw DataError("histogram: n_bins must be >= 1");
  if (!(hi > lo)) throw DataError("histogram: empty range");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(n_bins, 0);
  const double w = (hi - lo) / static_cast<double>(n_bins);
  for (double v : values) {
    if (std::isnan(v) || v < lo || v > hi) continue;
    auto b = static_cast<std::size_t>((v - lo) / w);
    if (b >= n_bins) b = n_bins - 1;
    ++h.counts[b];
  }
  return h;
}

struct MassPointShare {
  double share_at_max = 0.0;       // exact hits of the maximum attainable value
  double share_adjacent_bin = 0.0; // bin immediately left of the maximum's bin
};

inline MassPointShare mass_point_share(std::span<const double> values, double max_attainable,
                                       std::size_t n_bins, double lo, double hi) {
  Histogram h = histogram(values, n_bins, lo, hi);
  std::size_t at_max = 0, total = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    ++total;
    if (v == max_attainable) ++at_max;
  }
  if (total == 0) throw DataError("mass_point_share: no defined values");
  const double w = h.bin_width();
  auto max_bin = static_cast<std::size_t>((max_attainable - lo) / w);
  if (max_bin >= n_bins) max_bin = n_bins - 1;
  MassPointShare out;
  out.share_at_max = static_cast<double>(at_max) / static_cast<double>(total);
  if (max_bin > 0)
    out.share_adjacent_bin =
        static_cast<double>(h.counts[max_bin - 1]) / static_cast<double>(total);
  return out;
}

struct ScatterPoint {
  std::string patent_id;
  double cd = 0.0;
  double mcd = 0.0;
  long long F = 0;
};

struct McdScatter {
  std::vector<ScatterPoint> points;
  std::vector<std::pair<double, double>> mcd_percentiles;  // (p, value) over the whole table
};

inline McdScatter mcd_scale_scatter(std::span<const IndexRow> table, double cd_lo, double cd_hi,
                                    std::span<const double> percentiles) {
  McdScatter out;
  std::vector<double> mcds;
  for (const auto& row : table) {
    if (row.indices.mcd) mcds.push_back(*row.indices.mcd);
    if (!row.indices.cd || *row.indices.cd < cd_lo || *row.indices.cd > cd_hi) continue;
    out.points.push_back({row.patent_id, *row.indices.cd, *row.indices.mcd, row.counts.F});
  }
  for (double p : percentiles)
    if (!mcds.empty()) out.mcd_percentiles.emplace_back(p, quantile_nearest(mcds, p));
  return out;
}

struct BinnedValidation {
  std::vector<double> edges;           // n_bins+1 edges over [0,1]
  std::vector<std::size_t> counts;
  std::vector<double> mean_long_term;  // absent bins hold NaN
  std::vector<double> share_top;
  double top_threshold = 0.0;          // resolved citation count
  std::size_t cohort_size = 0;
};

struct TopThreshold {
  enum class Kind { count, percentile } kind = Kind::count;
  double value = 120.0;
};

// Figures-5/6 machinery: bins of equal length over the aggregate score,
// per-bin mean post-window citations and top-tail share.
inline BinnedValidation long_term_bins(const CitationCorpus& corpus, const ScoreTable& table,
                                       DayNumber cohort_start, DayNumber cohort_end,
                                       DayNumber horizon, std::size_t n_bins,
                                       TopThreshold top) {
  if (n_bins < 1) throw DataError("long_term_bins: n_bins must be >= 1");
  if (horizon < add_months(cohort_end, table.window_months))
    throw DataError("long_term_bins: horizon must exceed cohort end plus the scoring window");

  struct Entry {
    double dflex;
    double long_term;
  };
  std::vector<Entry> entries;
  for (const auto& row : table.rows) {
    if (!row.dflex) continue;
    auto idx = corpus.find(row.patent_id);
    if (!idx) continue;
    const auto& rec = corpus.record(*idx);
    if (!rec.grant_date || *rec.grant_date < cohort_start || *rec.grant_date > cohort_end)
      continue;
    const long long total = long_term_citations(corpus, *idx, horizon);
    entries.push_back({*row.dflex, static_cast<double>(total - row.F)});
  }
  if (entries.empty()) throw DataError("long_term_bins: empty cohort");

  BinnedValidation out;
  out.cohort_size = entries.size();
  out.edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b)
    out.edges[b] = static_cast<double>(b) / static_cast<double>(n_bins);
  out.counts.assign(n_bins, 0);
  out.mean_long_term.assign(n_bins, std::numeric_limits<double>::quiet_NaN());
  out.share_top.assign(n_bins, std::numeric_limits<double>::quiet_NaN());

  if (top.kind == TopThreshold::Kind::count) {
    out.top_threshold = top.value;
  } else {
    std::vector<double> lts;
    for (const auto& e : entries) lts.push_back(e.long_term);
    out.top_threshold = quantile_nearest(std::move(lts), top.value);
  }

  std::vector<double> sums(n_bins, 0.0), tops(n_bins, 0.0);
  for (const auto& e : entries) {
    auto b = static_cast<std::size_t>(e.dflex * static_cast<double>(n_bins));
    if (b >= n_bins) b = n_bins - 1;
    ++out.counts[b];
    sums[b] += e.long_term;
    if (e.long_term >= out.top_threshold) tops[b] += 1.0;
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (out.counts[b] == 0) continue;
    out.mean_long_term[b] = sums[b] / static_cast<double>(out.counts[b]);
    out.share_top[b] = tops[b] / static_cast<double>(out.counts[b]);
  }
  return out;
}

struct TrendPoint {
  std::string group_code;
  int year = 0;
  bool partial_year = false;
  std::size_t n = 0;
  double mean_dflex = 0.0;
  double share_high = 0.0;  // dflex >= 0.90
  double p90 = 0.0;         // nearest-rank 90th percentile of the year
  double share_low = 0.0;   // dflex < 0.30
};

// Four aligned per-industry-per-year series.
inline std::vector<TrendPoint> trend_panels(const ScoreTable& table, double high_cut = 0.90,
                                            double low_cut = 0.30,
                                            std::optional<int> partial_year = std::nullopt) {
  std::map<std::pair<std::string, int>, std::vector<double>> cells;
  for (const auto& row : table.rows) {
    if (!row.dflex) continue;
    cells[{row.group_code, row.grant_year}].push_back(*row.dflex);
  }
  std::vector<TrendPoint> out;
  for (auto& [key, vals] : cells) {
    TrendPoint pt;
    pt.group_code = key.first;
    pt.year = key.second;
    pt.partial_year = partial_year && key.second == *partial_year;
    pt.n = vals.size();
    double sum = 0, hi = 0, lo = 0;
    for (double v : vals) {
      sum += v;
      if (v >= high_cut) hi += 1;
      if (v < low_cut) lo += 1;
    }
    const double dn = static_cast<double>(vals.size());
    pt.mean_dflex = sum / dn;
    pt.share_high = hi / dn;
    pt.share_low = lo / dn;
    pt.p90 = quantile_nearest(vals, 0.90);
    out.push_back(std::move(pt));
  }
  return out;
}

namespace detail {

// Gaussian elimination with partial pivoting; throws on a singular system.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> A,
                                        std::vector<double> b) {
  const std::size_t n = A.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-12) throw NumericError("singular design matrix");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= A[r][c] * x[c];
    x[r] = acc / A[r][r];
  }
  return x;
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace detail

struct LogitResult {
  std::vector<double> coef;
  std::vector<double> std_err;
  std::vector<double> p_value;            // Wald
  std::vector<double> marginal_effect;    // average marginal effect per covariate
  std::vector<double> lpm_coef;           // linear probability model
  int iterations = 0;
};

// Maximum-likelihood logistic regression via IRLS. X rows must include the
// intercept column supplied by the caller.
inline LogitResult logit_fit(std::span<const int> labels,
                             const std::vector<std::vector<double>>& X,
                             double tol = 1e-12, int max_iter = 200) {
  const std::size_t n = labels.size();
  if (n == 0 || X.size() != n) throw DataError("logit_fit: shape mismatch");
  const std::size_t k = X[0].size();
  bool any0 = false, any1 = false;
  for (int y : labels) (y ? any1 : any0) = true;
  if (!any0 || !any1) throw DataError("logit_fit: both classes must be present");

  std::vector<double> beta(k, 0.0);
  LogitResult out;
  std::vector<double> p(n, 0.5);
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    std::vector<std::vector<double>> H(k, std::vector<double>(k, 0.0));
    std::vector<double> grad(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (std::size_t j = 0; j < k; ++j) eta += X[i][j] * beta[j];
      p[i] = 1.0 / (1.0 + std::exp(-eta));
      const double w = p[i] * (1.0 - p[i]);
      const double resid = static_cast<double>(labels[i]) - p[i];
      for (std::size_t a = 0; a < k; ++a) {
        grad[a] += X[i][a] * resid;
        for (std::size_t b = a; b < k; ++b) H[a][b] += w * X[i][a] * X[i][b];
      }
    }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < a; ++b) H[a][b] = H[b][a];
    std::vector<double> step = detail::solve_linear(H, grad);
    double step_norm = 0.0, beta_norm = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      beta[j] += step[j];
      step_norm = std::max(step_norm, std::abs(step[j]));
      beta_norm = std::max(beta_norm, std::abs(beta[j]));
    }
    if (beta_norm > 1e3) {
      // Diverging coefficients: find the separating covariate for the message.
      std::size_t worst = 0;
      for (std::size_t j = 1; j < k; ++j)
        if (std::abs(beta[j]) > std::abs(beta[worst])) worst = j;
      throw NumericError("logit_fit: perfect separation on covariate " + std::to_string(worst));
    }
    if (step_norm < tol) break;
  }

  out.coef = beta;
  // covariance = inverse Fisher information, via k solves
  std::vector<std::vector<double>> H(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double w = p[i] * (1.0 - p[i]);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a; b < k; ++b) H[a][b] += w * X[i][a] * X[i][b];
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < a; ++b) H[a][b] = H[b][a];
  out.std_err.resize(k);
  out.p_value.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> e(k, 0.0);
    e[j] = 1.0;
    std::vector<double> col = detail::solve_linear(H, e);
    out.std_err[j] = std::sqrt(std::max(col[j], 0.0));
    const double z = out.std_err[j] > 0 ? std::abs(beta[j]) / out.std_err[j] : 0.0;
    out.p_value[j] = 2.0 * detail::normal_sf(z);
  }
  out.marginal_effect.resize(k);
  double mean_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_w += p[i] * (1.0 - p[i]);
  mean_w /= static_cast<double>(n);
  for (std::size_t j = 0; j < k; ++j) out.marginal_effect[j] = mean_w * beta[j];

  // linear probability fit on the same design
  {
    std::vector<std::vector<double>> XtX(k, std::vector<double>(k, 0.0));
    std::vector<double> Xty(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < k; ++a) {
        Xty[a] += X[i][a] * static_cast<double>(labels[i]);
        for (std::size_t b = a; b < k; ++b) XtX[a][b] += X[i][a] * X[i][b];
      }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < a; ++b) XtX[a][b] = XtX[b][a];
    out.lpm_coef = detail::solve_linear(XtX, Xty);
  }
  return out;
}

struct CaseReport {
  std::string patent_id;
  long long x1 = 0, x2 = 0;
  std::optional<double> x3;
  double g1 = 0, g2 = 0, g3 = 0;
  double dflex = 0.0;
  int binding_dimension = -1;  // 0=impact, 1=novelty, 2=disruptiveness, -1=tie
  double relative_cutoff = 0.0;  // p90 of the table's scores
  bool passes_relative = false;
  bool passes_absolute = false;  // >= 0.90
};

inline CaseReport case_lookup(const ScoreTable& table, const std::string& patent_id,
                              const DflexParams& params, double absolute_cutoff = 0.90) {
  const ScoreRow* found = nullptr;
  std::vector<double> scores;
  for (const auto& row : table.rows) {
    if (row.dflex) scores.push_back(*row.dflex);
    if (row.patent_id == patent_id) found = &row;
  }
  if (!found) throw DataError("case_lookup: unknown patent_id `" + patent_id + "`");
  if (!found->g3) throw DataError("case_lookup: `" + patent_id + "` has no disruption rank");

  CaseReport rep;
  rep.patent_id = patent_id;
  rep.x1 = found->x1;
  rep.x2 = found->x2;
  rep.x3 = found->x3;
  rep.g1 = found->g1;
  rep.g2 = found->g2;
  rep.g3 = *found->g3;
  const std::array<double, 3> g{rep.g1, rep.g2, rep.g3};
  rep.dflex = generalized_mean(std::span<const double>(g), params);
  const double mn = *std::min_element(g.begin(), g.end());
  int binding = -1;
  int hits = 0;
  for (int s = 0; s < 3; ++s)
    if (g[s] == mn) {
      binding = s;
      ++hits;
    }
  rep.binding_dimension = hits == 1 ? binding : -1;
  rep.relative_cutoff = scores.empty() ? 0.0 : quantile_nearest(scores, 0.90);
  rep.passes_relative = rep.dflex >= rep.relative_cutoff;
  rep.passes_absolute = rep.dflex >= absolute_cutoff;
  return rep;
}

inline std::string render_case_report(const CaseReport& r) {
  static const char* dims[] = {"impact", "novelty", "disruptiveness"};
  std::ostringstream os;
  os << "patent " << r.patent_id << "\n"
     << "  raw: F=" << r.x1 << " K=" << r.x2 << " index=";
  if (r.x3)
    os << *r.x3;
  else
    os << "undefined";
  os << "\n  ranks: g1=" << r.g1 << " g2=" << r.g2 << " g3=" << r.g3 << "\n"
     << "  dflex: " << r.dflex << "\n"
     << "  binding dimension: " << (r.binding_dimension < 0 ? "tie" : dims[r.binding_dimension])
     << "\n"
     << "  relative criterion (p90 = " << r.relative_cutoff
     << "): " << (r.passes_relative ? "yes" : "no") << "\n"
     << "  absolute criterion (0.90): " << (r.passes_absolute ? "yes" : "no") << "\n";
  return os.str();
}

}  // namespace dflex
