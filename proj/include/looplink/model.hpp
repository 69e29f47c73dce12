#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "looplink/hypergraph.hpp"
#include "looplink/spectrum.hpp"

namespace looplink {

enum class AblationMode { full, node_only, hyperlink_only };
const char* ablation_name(AblationMode mode);
AblationMode parse_ablation(const std::string& name);

struct TrainingSet {
  std::vector<PerturbationFeatures> rows;  // labels must be +1 / -1
};

// |e|^-gamma * delta; the model's linear predictor is
// intercept + <(alpha, beta), standardized row>.
std::vector<double> design_row(const PerturbationFeatures& f, double gamma);

// Per-feature affine transform fitted on the training design matrix.
// Constant features keep scale 1 (and end with coefficient 0).
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;
  void apply(std::vector<double>& x) const;
};

struct FitOptions {
  double tolerance = 1e-8;   // stop when objective improves by less
  int max_iterations = 100;
  bool standardize = true;
  AblationMode mode = AblationMode::full;
};

struct FitResult {
  std::vector<double> weights;  // standardized space; masked features are 0
  double intercept = 0.0;
  double objective = 0.0;  // penalized log-likelihood at the final iterate
  int iterations = 0;
  bool non_convergence = false;
  Standardization standardization;
  std::vector<double> objective_trace;  // value after each Newton iteration
};

// sum_r log sigma(label_r * (intercept + <weights, rows[r]>)) - lambda*||weights||^2
// and, when grad is non-null, its gradient in (weights..., intercept) order.
// The optimizer and the finite-difference checks share this one definition.
double penalized_loglik(const std::vector<std::vector<double>>& rows,
                        const std::vector<int>& labels,
                        const std::vector<double>& weights, double intercept,
                        double ridge_lambda, std::vector<double>* grad = nullptr);

// Maximizes sum log sigma(label * eta) - lambda * ||weights||^2 by damped
// Newton with step-halving. Throws DegenerateLabels when one class is
// missing. Non-convergence (iteration cap, or exact separation at
// lambda = 0) is reported via the flag, with the best iterate returned.
FitResult fit_fixed_gamma(const TrainingSet& data, double gamma, double ridge_lambda,
                          const FitOptions& opts = {});

std::vector<double> make_grid(double min, double step, double max);
std::vector<double> default_gamma_grid();  // 0 : 0.1 : 2

struct GammaSearchRow {
  double gamma = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool non_convergence = false;
};

struct FittedModel {
  int tau_max = 0;
  AblationMode mode = AblationMode::full;
  double gamma = 0.0;
  double ridge_lambda = 0.0;
  double intercept = 0.0;
  double objective = 0.0;
  bool non_convergence = false;
  std::vector<double> alpha;  // node-block coefficients, standardized space
  std::vector<double> beta;   // link-block coefficients
  Standardization standardization;

  std::size_t feature_dim() const { return alpha.size() + beta.size(); }
  double linear_predictor(const PerturbationFeatures& f) const;  // DimensionMismatch
  double predict_proba(const PerturbationFeatures& f) const;

  // Plain-text key-value serialization, 17 significant digits; load
  // reproduces predictions bit-identically.
  void save(std::ostream& out, const std::string& config_echo = {}) const;
  static FittedModel load(std::istream& in);
};

// Runs fit_fixed_gamma per grid value and keeps the gamma with the highest
// achieved objective; near-ties (relative 1e-9) break toward smaller gamma.
FittedModel fit(const TrainingSet& data, int tau_max,
                const std::vector<double>& gamma_grid, double ridge_lambda,
                const FitOptions& opts = {},
                std::vector<GammaSearchRow>* search_log = nullptr);

struct TauSelectConfig {
  std::vector<int> grid;  // candidate cutoffs, e.g. 6..14
  int folds = 5;
  std::uint64_t seed = 0;
  std::vector<double> gamma_grid;  // empty -> default_gamma_grid()
  double ridge_lambda = 1e-6;
  AblationMode mode = AblationMode::full;
  int jobs = 1;
};

// Stratified k-fold cross-validation over the labeled candidates; picks the
// cutoff with the best mean validation AUC, ties toward the smaller value.
int select_tau_c(const Hypergraph& g,
                 const std::vector<std::pair<Hyperlink, int>>& labeled,
                 const TauSelectConfig& config);

}  // namespace looplink
