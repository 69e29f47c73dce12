#include "looplink/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "looplink/dataio.hpp"
#include "looplink/dense.hpp"
#include "looplink/errors.hpp"
#include "looplink/evaluation.hpp"
#include "looplink/kernels.hpp"
#include "cv_detail.hpp"

namespace looplink {

const char* ablation_name(AblationMode mode) {
  switch (mode) {
    case AblationMode::full:
      return "full";
    case AblationMode::node_only:
      return "node-only";
    case AblationMode::hyperlink_only:
      return "hyperlink-only";
  }
  return "?";
}

AblationMode parse_ablation(const std::string& name) {
  if (name == "full") return AblationMode::full;
  if (name == "node-only") return AblationMode::node_only;
  if (name == "hyperlink-only") return AblationMode::hyperlink_only;
  throw Error("unknown ablation mode '" + name + "' (full|node-only|hyperlink-only)");
}

std::vector<double> design_row(const PerturbationFeatures& f, double gamma) {
  const double scale = std::pow(static_cast<double>(f.cardinality), -gamma);
  std::vector<double> row(f.delta);
  for (double& x : row) x *= scale;
  return row;
}

void Standardization::apply(std::vector<double>& x) const {
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] = (x[j] - mean[j]) / scale[j];
  }
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// Feature indices kept under an ablation mode; the delta layout is the node
// block followed by the link block, each of length tau_max - 1.
std::vector<std::size_t> kept_indices(std::size_t dim, AblationMode mode) {
  const std::size_t block = dim / 2;
  std::vector<std::size_t> kept;
  kept.reserve(dim);
  const std::size_t begin = mode == AblationMode::hyperlink_only ? block : 0;
  const std::size_t end = mode == AblationMode::node_only ? block : dim;
  for (std::size_t j = begin; j < end; ++j) kept.push_back(j);
  return kept;
}

}  // namespace

double penalized_loglik(const std::vector<std::vector<double>>& rows,
                        const std::vector<int>& labels,
                        const std::vector<double>& weights, double intercept,
                        double ridge_lambda, std::vector<double>* grad) {
  const std::size_t d = weights.size();
  double obj = 0.0;
  if (grad) grad->assign(d + 1, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double y = labels[r] > 0 ? 1.0 : -1.0;
    const double eta = intercept + kernels::dot(weights.data(), rows[r].data(), d);
    obj += log_sigmoid(y * eta);
    if (grad) {
      const double pull = y * sigmoid(-y * eta);
      kernels::axpy(pull, rows[r].data(), grad->data(), d);
      (*grad)[d] += pull;
    }
  }
  double penalty = 0.0;
  for (double w : weights) penalty += w * w;
  obj -= ridge_lambda * penalty;
  if (grad) {
    for (std::size_t j = 0; j < d; ++j) (*grad)[j] -= 2.0 * ridge_lambda * weights[j];
  }
  return obj;
}

FitResult fit_fixed_gamma(const TrainingSet& data, double gamma, double ridge_lambda,
                          const FitOptions& opts) {
  const std::size_t n = data.rows.size();
  if (n == 0) throw DegenerateLabels("empty training set");
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& row : data.rows) {
    if (row.label > 0) {
      ++n_pos;
    } else if (row.label < 0) {
      ++n_neg;
    } else {
      throw DegenerateLabels("training row without a +1/-1 label");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw DegenerateLabels("training set needs both positive and negative rows");
  }

  const std::size_t full_dim = data.rows.front().delta.size();
  const auto kept = kept_indices(full_dim, opts.mode);
  const std::size_t d = kept.size();

  // Scaled design restricted to the kept features.
  std::vector<std::vector<double>> rows(n);
  std::vector<int> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (data.rows[r].delta.size() != full_dim) {
      throw DimensionMismatch("inconsistent feature dimensions in training set");
    }
    const auto scaled = design_row(data.rows[r], gamma);
    rows[r].resize(d);
    for (std::size_t j = 0; j < d; ++j) rows[r][j] = scaled[kept[j]];
    labels[r] = data.rows[r].label;
  }

  // Standardize per feature; (near-)constant columns are zeroed and keep
  // scale 1 so their coefficients stay exactly 0.
  std::vector<double> mean_kept(d, 0.0), scale_kept(d, 1.0);
  if (opts.standardize) {
    for (std::size_t j = 0; j < d; ++j) {
      double m = 0.0;
      for (std::size_t r = 0; r < n; ++r) m += rows[r][j];
      m /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double c = rows[r][j] - m;
        var += c * c;
      }
      var /= static_cast<double>(n);
      const double s = std::sqrt(var);
      mean_kept[j] = m;
      const bool constant = !(s > 1e-12 * std::max(1.0, std::abs(m)));
      scale_kept[j] = constant ? 1.0 : s;
      for (std::size_t r = 0; r < n; ++r) {
        rows[r][j] = constant ? 0.0 : (rows[r][j] - m) / s;
      }
    }
  }

  FitResult res;
  std::vector<double> w(d, 0.0);
  double c = 0.0;
  double obj = penalized_loglik(rows, labels, w, c, ridge_lambda);
  res.objective_trace.push_back(obj);

  std::vector<double> grad;
  DenseMatrix hess(d + 1, d + 1);
  std::vector<double> step(d + 1);
  bool hit_cap = true;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    penalized_loglik(rows, labels, w, c, ridge_lambda, &grad);

    // Newton system: H = sum p(1-p) [z;1][z;1]^T + 2*lambda*diag(1..1,0).
    hess.data.assign((d + 1) * (d + 1), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double eta = c + kernels::dot(w.data(), rows[r].data(), d);
      const double p = sigmoid(eta);
      const double wr = p * (1.0 - p);
      if (wr == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double f = wr * rows[r][j];
        if (f == 0.0) continue;
        kernels::axpy(f, rows[r].data(), hess.row(j), d);
        hess.at(j, d) += f;
      }
      kernels::axpy(wr, rows[r].data(), hess.row(d), d);
      hess.at(d, d) += wr;
    }
    for (std::size_t j = 0; j < d; ++j) hess.at(j, j) += 2.0 * ridge_lambda;

    // Solve H * step = grad, boosting the diagonal if the factorization
    // stalls on a collinear design.
    bool solved = false;
    double boost = 0.0;
    for (int attempt = 0; attempt < 8 && !solved; ++attempt) {
      DenseMatrix h = hess;
      if (boost > 0.0) {
        for (std::size_t j = 0; j <= d; ++j) h.at(j, j) += boost;
      }
      solved = solve_spd(std::move(h), grad, step);
      boost = boost == 0.0 ? 1e-10 : boost * 100.0;
    }
    if (!solved) break;

    // Backtracking line search on the objective.
    double t = 1.0;
    double new_obj = obj;
    bool improved = false;
    std::vector<double> w_try(d);
    while (t >= 0x1.0p-40) {
      for (std::size_t j = 0; j < d; ++j) w_try[j] = w[j] + t * step[j];
      const double c_try = c + t * step[d];
      const double o = penalized_loglik(rows, labels, w_try, c_try, ridge_lambda);
      if (o > obj || (o == obj && t == 1.0)) {
        w = w_try;
        c = c_try;
        new_obj = o;
        improved = o > obj;
        break;
      }
      t *= 0.5;
    }
    res.iterations = iter + 1;
    res.objective_trace.push_back(new_obj);
    if (!improved) {
      hit_cap = false;
      break;
    }
    const double gain = new_obj - obj;
    obj = new_obj;
    if (gain < opts.tolerance) {
      hit_cap = false;
      break;
    }
  }
  res.non_convergence = hit_cap && res.iterations == opts.max_iterations;

  // With no ridge, a final iterate that classifies every row correctly
  // means the data are separated and the unpenalized optimum diverges.
  if (ridge_lambda == 0.0) {
    bool separated = true;
    for (std::size_t r = 0; r < rows.size() && separated; ++r) {
      const double y = labels[r] > 0 ? 1.0 : -1.0;
      separated = y * (c + kernels::dot(w.data(), rows[r].data(), d)) > 0.0;
    }
    if (separated) res.non_convergence = true;
  }

  res.objective = obj;
  res.intercept = c;
  res.weights.assign(full_dim, 0.0);
  res.standardization.mean.assign(full_dim, 0.0);
  res.standardization.scale.assign(full_dim, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    res.weights[kept[j]] = w[j];
    res.standardization.mean[kept[j]] = mean_kept[j];
    res.standardization.scale[kept[j]] = scale_kept[j];
  }
  return res;
}

std::vector<double> make_grid(double min, double step, double max) {
  if (max < min) throw Error("grid max below min");
  if (step <= 0.0) {
    if (max == min) return {min};
    throw Error("grid step must be positive");
  }
  const int count = static_cast<int>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (int i = 0; i < count; ++i) grid.push_back(min + i * step);
  return grid;
}

std::vector<double> default_gamma_grid() { return make_grid(0.0, 0.1, 2.0); }

FittedModel fit(const TrainingSet& data, int tau_max,
                const std::vector<double>& gamma_grid, double ridge_lambda,
                const FitOptions& opts, std::vector<GammaSearchRow>* search_log) {
  if (gamma_grid.empty()) throw Error("gamma grid must be non-empty");

  FitResult best;
  double best_gamma = gamma_grid.front();
  bool have_best = false;
  for (double gamma : gamma_grid) {
    FitResult r = fit_fixed_gamma(data, gamma, ridge_lambda, opts);
    if (search_log) {
      search_log->push_back({gamma, r.objective, r.iterations, r.non_convergence});
    }
    // Near-ties (relative 1e-9) keep the earlier, smaller gamma.
    const double margin = 1e-9 * std::max(1.0, std::abs(have_best ? best.objective : 0.0));
    if (!have_best || r.objective > best.objective + margin) {
      best = std::move(r);
      best_gamma = gamma;
      have_best = true;
    }
  }

  FittedModel model;
  model.tau_max = tau_max;
  model.mode = opts.mode;
  model.gamma = best_gamma;
  model.ridge_lambda = ridge_lambda;
  model.intercept = best.intercept;
  model.objective = best.objective;
  model.non_convergence = best.non_convergence;
  const std::size_t block = best.weights.size() / 2;
  model.alpha.assign(best.weights.begin(), best.weights.begin() + block);
  model.beta.assign(best.weights.begin() + block, best.weights.end());
  model.standardization = std::move(best.standardization);
  if (model.alpha.size() != static_cast<std::size_t>(tau_max - 1)) {
    throw DimensionMismatch("feature dimension does not match tau_max " +
                            std::to_string(tau_max));
  }
  return model;
}

double FittedModel::linear_predictor(const PerturbationFeatures& f) const {
  if (f.delta.size() != feature_dim()) {
    throw DimensionMismatch("feature vector of length " + std::to_string(f.delta.size()) +
                            " does not match model dimension " +
                            std::to_string(feature_dim()));
  }
  std::vector<double> row = design_row(f, gamma);
  standardization.apply(row);
  double eta = intercept;
  const std::size_t block = alpha.size();
  eta += kernels::dot(alpha.data(), row.data(), block);
  eta += kernels::dot(beta.data(), row.data() + block, beta.size());
  return eta;
}

double FittedModel::predict_proba(const PerturbationFeatures& f) const {
  return sigmoid(linear_predictor(f));
}

namespace {

void write_vector(std::ostream& out, const char* key, const std::vector<double>& v) {
  out << key;
  for (double x : v) out << ' ' << format_double(x);
  out << '\n';
}

std::vector<double> parse_doubles(std::istringstream& in) {
  std::vector<double> v;
  std::string tok;
  while (in >> tok) v.push_back(std::strtod(tok.c_str(), nullptr));
  return v;
}

}  // namespace

void FittedModel::save(std::ostream& out, const std::string& config_echo) const {
  out << "# looplink model\n";
  if (!config_echo.empty()) {
    std::istringstream lines(config_echo);
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
  }
  out << "format 1\n";
  out << "tau_max " << tau_max << '\n';
  out << "mode " << ablation_name(mode) << '\n';
  out << "gamma " << format_double(gamma) << '\n';
  out << "lambda " << format_double(ridge_lambda) << '\n';
  out << "intercept " << format_double(intercept) << '\n';
  out << "objective " << format_double(objective) << '\n';
  out << "non_convergence " << (non_convergence ? 1 : 0) << '\n';
  write_vector(out, "alpha", alpha);
  write_vector(out, "beta", beta);
  write_vector(out, "mean", standardization.mean);
  write_vector(out, "scale", standardization.scale);
}

FittedModel FittedModel::load(std::istream& in) {
  FittedModel m;
  bool saw_format = false;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "format") {
      int v = 0;
      fields >> v;
      if (v != 1) throw Error("unsupported model format " + std::to_string(v));
      saw_format = true;
    } else if (key == "tau_max") {
      fields >> m.tau_max;
    } else if (key == "mode") {
      std::string mode;
      fields >> mode;
      m.mode = parse_ablation(mode);
    } else if (key == "gamma") {
      fields >> m.gamma;
    } else if (key == "lambda") {
      fields >> m.ridge_lambda;
    } else if (key == "intercept") {
      fields >> m.intercept;
    } else if (key == "objective") {
      fields >> m.objective;
    } else if (key == "non_convergence") {
      int v = 0;
      fields >> v;
      m.non_convergence = v != 0;
    } else if (key == "alpha") {
      m.alpha = parse_doubles(fields);
    } else if (key == "beta") {
      m.beta = parse_doubles(fields);
    } else if (key == "mean") {
      m.standardization.mean = parse_doubles(fields);
    } else if (key == "scale") {
      m.standardization.scale = parse_doubles(fields);
    } else {
      throw Error("unknown model file key '" + key + "'");
    }
  }
  if (!saw_format || m.tau_max < 2) throw Error("malformed model file");
  const auto block = static_cast<std::size_t>(m.tau_max - 1);
  if (m.alpha.size() != block || m.beta.size() != block ||
      m.standardization.mean.size() != 2 * block ||
      m.standardization.scale.size() != 2 * block) {
    throw DimensionMismatch("model file dimensions do not match tau_max");
  }
  return m;
}

int select_tau_c(const Hypergraph& g,
                 const std::vector<std::pair<Hyperlink, int>>& labeled,
                 const TauSelectConfig& config) {
  if (config.grid.empty()) throw Error("tau grid must be non-empty");
  if (config.folds < 2) throw Error("cross-validation needs folds >= 2");
  for (int t : config.grid) {
    if (t < 2) throw Error("tau cutoff must be >= 2");
  }

  std::vector<int> labels(labeled.size());
  std::vector<Hyperlink> candidates(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    candidates[i] = labeled[i].first;
    labels[i] = labeled[i].second;
  }
  const auto fold_of = detail::stratified_folds(labels, config.folds, config.seed);

  const int tau_hi = *std::max_element(config.grid.begin(), config.grid.end());
  auto features = perturbation_features_batch(g, candidates, tau_hi, config.jobs);
  for (std::size_t i = 0; i < features.size(); ++i) features[i].label = labels[i];

  const auto gamma_grid =
      config.gamma_grid.empty() ? default_gamma_grid() : config.gamma_grid;
  std::vector<int> grid = config.grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  int best_tau = grid.front();
  double best_auc = -1.0;
  for (int tau : grid) {
    std::vector<PerturbationFeatures> rows(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
      rows[i] = truncate_features(features[i], tau_hi, tau);
    }
    std::vector<double> fold_aucs;
    for (int f = 0; f < config.folds; ++f) {
      TrainingSet train;
      std::vector<std::size_t> held;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (fold_of[i] == f) {
          held.push_back(i);
        } else {
          train.rows.push_back(rows[i]);
        }
      }
      FitOptions opts;
      opts.mode = config.mode;
      const FittedModel model = fit(train, tau, gamma_grid, config.ridge_lambda, opts);
      std::vector<double> pos, neg;
      for (std::size_t i : held) {
        (labels[i] > 0 ? pos : neg).push_back(model.predict_proba(rows[i]));
      }
      fold_aucs.push_back(auc(pos, neg));
    }
    const double mean_auc = mean(fold_aucs);
    if (mean_auc > best_auc + 1e-12) {
      best_auc = mean_auc;
      best_tau = tau;
    }
  }
  return best_tau;
}

}  // namespace looplink
