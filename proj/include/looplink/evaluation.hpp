#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "looplink/baselines.hpp"
#include "looplink/dataio.hpp"
#include "looplink/hypergraph.hpp"
#include "looplink/model.hpp"

namespace looplink {

// Probability that a random positive outranks a random negative, ties at
// half credit; exact Mann-Whitney form. auc(p, n) + auc(n, p) == 1 exactly.
double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

// Fraction of true positives among the top L of the ranking; a tie group
// straddling the cutoff contributes fractional credit
// slots * ties_in_pos / ties_total.
double precision_at(const std::unordered_set<std::string>& positives,
                    const std::vector<std::pair<std::string, double>>& scored,
                    std::size_t top_l);

enum class ScorerKind { model, cn, katz, external };
const char* scorer_name(ScorerKind kind);

struct ExperimentProtocol {
  std::size_t test_count = 0;       // q deleted per repetition
  std::size_t negatives = 0;        // generated per repetition (when no pool given)
  std::vector<Hyperlink> candidate_pool;  // fixed negative pool; empty -> generate
  int repetitions = 12;
  std::uint64_t base_seed = 0;

  int tau_max = 8;
  std::vector<int> tau_grid;        // non-empty -> cross-validated cutoff
  std::vector<double> gamma_grid;   // empty -> default 0:0.1:2
  double ridge_lambda = 1e-6;
  AblationMode mode = AblationMode::full;
  int cv_folds = 5;

  ScorerKind scorer = ScorerKind::model;
  CnVariant cn_variant = CnVariant::binarized;
  std::vector<double> katz_grid;    // empty -> default grid per train graph
  std::unordered_map<std::string, double> external_scores;

  int jobs = 1;
};

struct RunResult {
  std::uint64_t seed = 0;
  double auc = 0.0;
  double precision = 0.0;
  double gamma = 0.0;   // selected (model scorer; NaN otherwise)
  int tau_c = 0;        // selected or fixed cutoff
  double runtime_seconds = 0.0;
};

struct ExperimentReport {
  std::vector<RunResult> runs;
  double auc_mean = 0.0, auc_std = 0.0;
  double precision_mean = 0.0, precision_std = 0.0;
  nlohmann::ordered_json config;  // effective-configuration snapshot
};

// Per repetition r: seed = base_seed + r; split; build labels (observed train
// positives vs negative candidates); fit; score test positives + negatives;
// aggregate mean and sample standard deviation.
ExperimentReport run_experiment(const Hypergraph& g, const ExperimentProtocol& protocol);

// run_experiment with the feature blocks restricted per `mode`.
ExperimentReport ablation(const Hypergraph& g, ExperimentProtocol protocol,
                          AblationMode mode);

// Canonical report document. Wall times are excluded so that reports are
// byte-identical across parallelism settings; they go to the timings sidecar.
nlohmann::ordered_json report_json(const ExperimentReport& report);
std::string report_timings_text(const ExperimentReport& report);

// "method,dataset,auc_mean,auc_std,prec_mean,prec_std"
std::string summary_csv_row(const std::string& method, const std::string& dataset,
                            const ExperimentReport& report);

double mean(const std::vector<double>& xs);
double sample_std(const std::vector<double>& xs);  // n-1 denominator, 0 for n <= 1

}  // namespace looplink
