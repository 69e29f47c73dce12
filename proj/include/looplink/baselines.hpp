#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "looplink/dense.hpp"
#include "looplink/hypergraph.hpp"

namespace looplink {

// Common-neighbor semantics: count over the binarized adjacency (entry 1 iff
// A > 0). walk_count scores by (A^2)_ij instead.
enum class CnVariant { binarized, walk_count };

// Average pairwise common-neighbor count over all unordered node pairs in e.
double cn_score(const Hypergraph& g, const Hyperlink& e,
                CnVariant variant = CnVariant::binarized);

// Spectral radius of the node adjacency (power iteration on A^2,
// deterministic start vector).
double spectral_radius(const SparseSymmetric& a);

// (I - damping * A)^-1 - I. Throws DivergentSeries when damping is not
// strictly below 1 / rho(A).
DenseMatrix katz_matrix(const Hypergraph& g, double damping);

double katz_score_from_matrix(const DenseMatrix& katz, const Hyperlink& e);

struct KatzConfig {
  double damping = 0.0;               // resolved value; <= 0 means unset
  std::vector<double> damping_grid;   // absolute values for cross-validation
  int folds = 5;
  std::uint64_t seed = 0;
};

// {0.5, 0.1, 0.05, 0.01, 0.005} scaled by 1 / rho(A).
std::vector<double> default_katz_damping_grid(const Hypergraph& g);

// Picks the damping with the best mean validation AUC over stratified folds
// of the labeled candidates (same harness as select_tau_c); ties toward the
// smaller damping.
double select_katz_damping(const Hypergraph& g,
                           const std::vector<std::pair<Hyperlink, int>>& labeled,
                           const KatzConfig& config);

// Average Katz entry over all unordered pairs in e; config.damping must be
// set (use select_katz_damping or default_katz_damping_grid first).
double katz_score(const Hypergraph& g, const Hyperlink& e, const KatzConfig& config);

}  // namespace looplink
