#include "looplink/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "looplink/errors.hpp"
#include "looplink/evaluation.hpp"
#include "looplink/rng.hpp"
#include "cv_detail.hpp"

namespace looplink {

double cn_score(const Hypergraph& g, const Hyperlink& e, CnVariant variant) {
  const Hyperlink c = g.canonical_hyperlink(e);
  const NodeAdjacency a = adjacency(g);
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t u = 0; u < c.size(); ++u) {
    for (std::size_t v = u + 1; v < c.size(); ++v) {
      // Two-pointer sweep of the CSR rows; shared columns are common
      // neighbors (the diagonal is absent, so u and v never count).
      std::size_t pi = a.row_ptr[c[u]], pe = a.row_ptr[c[u] + 1];
      std::size_t qi = a.row_ptr[c[v]], qe = a.row_ptr[c[v] + 1];
      double s = 0.0;
      while (pi < pe && qi < qe) {
        if (a.col[pi] < a.col[qi]) {
          ++pi;
        } else if (a.col[pi] > a.col[qi]) {
          ++qi;
        } else {
          s += variant == CnVariant::binarized ? 1.0 : a.val[pi] * a.val[qi];
          ++pi;
          ++qi;
        }
      }
      total += s;
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

double spectral_radius(const SparseSymmetric& a) {
  const std::size_t n = a.dim;
  if (n == 0 || a.col.empty()) return 0.0;
  // Power iteration on A^2; A^2 is PSD, so the Rayleigh quotient converges
  // to rho(A)^2 even on bipartite graphs where A itself alternates sign.
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> ax(n), y(n);
  double prev = 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    spmv(a, x.data(), ax.data());
    spmv(a, ax.data(), y.data());
    double rq = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rq += x[i] * y[i];
      norm2 += y[i] * y[i];
    }
    if (norm2 == 0.0) return 0.0;
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] * inv;
    if (iter > 0 && std::abs(rq - prev) <= 1e-13 * std::max(1.0, std::abs(rq))) {
      return std::sqrt(rq);
    }
    prev = rq;
  }
  return std::sqrt(prev);
}

DenseMatrix katz_matrix(const Hypergraph& g, double damping) {
  if (damping < 0.0) throw Error("katz damping must be nonnegative");
  const NodeAdjacency a = adjacency(g);
  const double rho = spectral_radius(a);
  if (damping * rho >= 1.0 - 1e-9) {
    throw DivergentSeries("katz damping " + std::to_string(damping) +
                          " with spectral radius " + std::to_string(rho));
  }
  const std::size_t n = a.dim;
  // M = I - damping * A is SPD below the radius bound, so the inverse comes
  // from one Cholesky factorization and n solves.
  DenseMatrix m = a.to_dense();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m.at(i, j) = (i == j ? 1.0 : 0.0) - damping * m.at(i, j);
    }
  }
  if (!cholesky_factor(m)) {
    throw DivergentSeries("katz system not positive definite at damping " +
                          std::to_string(damping));
  }
  DenseMatrix k(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    cholesky_solve(m, col);
    for (std::size_t i = 0; i < n; ++i) k.at(i, j) = col[i] - (i == j ? 1.0 : 0.0);
  }
  return k;
}

double katz_score_from_matrix(const DenseMatrix& katz, const Hyperlink& e) {
  Hyperlink c(e);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  if (c.size() < 2) throw SingletonHyperlink("katz score needs >= 2 distinct nodes");
  if (c.back() >= katz.rows) throw UnknownLabel("node index out of range");
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t u = 0; u < c.size(); ++u) {
    for (std::size_t v = u + 1; v < c.size(); ++v) {
      total += katz.at(c[u], c[v]);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

std::vector<double> default_katz_damping_grid(const Hypergraph& g) {
  static const double kFactors[] = {0.5, 0.1, 0.05, 0.01, 0.005};
  const double rho = spectral_radius(adjacency(g));
  std::vector<double> grid;
  for (double f : kFactors) grid.push_back(rho > 0.0 ? f / rho : f);
  std::sort(grid.begin(), grid.end());
  return grid;
}

double select_katz_damping(const Hypergraph& g,
                           const std::vector<std::pair<Hyperlink, int>>& labeled,
                           const KatzConfig& config) {
  std::vector<double> grid =
      config.damping_grid.empty() ? default_katz_damping_grid(g) : config.damping_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw Error("katz damping grid must be non-empty");
  if (config.folds < 2) throw Error("cross-validation needs folds >= 2");

  std::vector<int> labels(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) labels[i] = labeled[i].second;
  const auto fold_of = detail::stratified_folds(labels, config.folds, config.seed);

  double best_damping = 0.0, best_auc = -1.0;
  bool any = false;
  for (double damping : grid) {
    DenseMatrix k;
    try {
      k = katz_matrix(g, damping);
    } catch (const DivergentSeries&) {
      continue;  // user grids may overshoot the radius bound
    }
    std::vector<double> scores(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      scores[i] = katz_score_from_matrix(k, labeled[i].first);
    }
    std::vector<double> fold_aucs;
    for (int f = 0; f < config.folds; ++f) {
      std::vector<double> pos, neg;
      for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (fold_of[i] != f) continue;
        (labels[i] > 0 ? pos : neg).push_back(scores[i]);
      }
      fold_aucs.push_back(auc(pos, neg));
    }
    const double mean_auc = mean(fold_aucs);
    if (!any || mean_auc > best_auc + 1e-12) {
      best_auc = mean_auc;
      best_damping = damping;
      any = true;
    }
  }
  if (!any) throw DivergentSeries("no damping in the grid converges");
  return best_damping;
}

double katz_score(const Hypergraph& g, const Hyperlink& e, const KatzConfig& config) {
  if (config.damping <= 0.0) {
    throw Error("katz damping unset; pick one via select_katz_damping");
  }
  return katz_score_from_matrix(katz_matrix(g, config.damping), e);
}

}  // namespace looplink
