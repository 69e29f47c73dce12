#include "looplink/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "looplink/errors.hpp"
#include "looplink/rng.hpp"
#include "looplink/spectrum.hpp"
#include "looplink/version.hpp"

namespace looplink {

double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw EmptyScoreList("auc needs both positive and negative scores");
  }
  std::vector<double> neg(neg_scores);
  std::sort(neg.begin(), neg.end());
  // Twice the Mann-Whitney count stays integral under half-credit ties:
  // W2 = 2 * wins + ties.
  std::uint64_t w2 = 0;
  for (double p : pos_scores) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    w2 += 2 * static_cast<std::uint64_t>(lo - neg.begin());
    w2 += static_cast<std::uint64_t>(hi - lo);
  }
  const std::uint64_t d =
      static_cast<std::uint64_t>(pos_scores.size()) * neg_scores.size();
  // Complement form keeps auc(p,n) + auc(n,p) == 1 exact in doubles.
  if (w2 <= d) return static_cast<double>(w2) / static_cast<double>(2 * d);
  return 1.0 - static_cast<double>(2 * d - w2) / static_cast<double>(2 * d);
}

double precision_at(const std::unordered_set<std::string>& positives,
                    const std::vector<std::pair<std::string, double>>& scored,
                    std::size_t top_l) {
  if (top_l < 1 || top_l > scored.size()) {
    throw RankTooLarge("cutoff " + std::to_string(top_l) + " outside 1.." +
                       std::to_string(scored.size()));
  }
  std::vector<std::pair<std::string, double>> ranked(scored);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const double cut = ranked[top_l - 1].second;
  std::size_t above = 0, above_pos = 0, tie_total = 0, tie_pos = 0;
  for (const auto& [key, score] : ranked) {
    if (score > cut) {
      ++above;
      above_pos += positives.count(key);
    } else if (score == cut) {
      ++tie_total;
      tie_pos += positives.count(key);
    }
  }
  // Slots left after the strictly-above block are filled from the tie group
  // with expected-value credit.
  const std::size_t slots = top_l - above;
  const double credit =
      static_cast<double>(above_pos) +
      static_cast<double>(slots * tie_pos) / static_cast<double>(tie_total);
  return credit / static_cast<double>(top_l);
}

const char* scorer_name(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::model:
      return "model";
    case ScorerKind::cn:
      return "cn";
    case ScorerKind::katz:
      return "katz";
    case ScorerKind::external:
      return "external";
  }
  return "?";
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() <= 1) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) {
    const double c = x - m;
    s += c * c;
  }
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

namespace {

struct RunScores {
  std::vector<double> pos;  // test positives, in split order
  std::vector<double> neg;  // negatives, in pool order
  double gamma = std::numeric_limits<double>::quiet_NaN();
  int tau_c = 0;
};

RunScores score_run(const Hypergraph& train, const std::vector<Hyperlink>& test_pos,
                    const std::vector<Hyperlink>& negatives,
                    const ExperimentProtocol& protocol, std::uint64_t run_seed) {
  RunScores out;

  std::vector<std::pair<Hyperlink, int>> labeled;
  labeled.reserve(train.hyperlink_count() + negatives.size());
  for (const auto& e : train.hyperlinks()) labeled.emplace_back(e, 1);
  for (const auto& e : negatives) labeled.emplace_back(e, -1);

  switch (protocol.scorer) {
    case ScorerKind::model: {
      int tau_c = protocol.tau_max;
      if (!protocol.tau_grid.empty()) {
        TauSelectConfig cfg;
        cfg.grid = protocol.tau_grid;
        cfg.folds = protocol.cv_folds;
        cfg.seed = derive_seed(run_seed, 2);
        cfg.gamma_grid = protocol.gamma_grid;
        cfg.ridge_lambda = protocol.ridge_lambda;
        cfg.mode = protocol.mode;
        cfg.jobs = protocol.jobs;
        tau_c = select_tau_c(train, labeled, cfg);
      }
      out.tau_c = tau_c;

      TrainingSet data;
      {
        std::vector<Hyperlink> cands(labeled.size());
        for (std::size_t i = 0; i < labeled.size(); ++i) cands[i] = labeled[i].first;
        data.rows = perturbation_features_batch(train, cands, tau_c, protocol.jobs);
        for (std::size_t i = 0; i < labeled.size(); ++i) {
          data.rows[i].label = labeled[i].second;
        }
      }
      FitOptions opts;
      opts.mode = protocol.mode;
      const auto gamma_grid =
          protocol.gamma_grid.empty() ? default_gamma_grid() : protocol.gamma_grid;
      const FittedModel model =
          fit(data, tau_c, gamma_grid, protocol.ridge_lambda, opts);
      out.gamma = model.gamma;

      std::vector<Hyperlink> eval(test_pos);
      eval.insert(eval.end(), negatives.begin(), negatives.end());
      const auto feats =
          perturbation_features_batch(train, eval, tau_c, protocol.jobs);
      for (std::size_t i = 0; i < feats.size(); ++i) {
        const double p = model.predict_proba(feats[i]);
        (i < test_pos.size() ? out.pos : out.neg).push_back(p);
      }
      break;
    }
    case ScorerKind::cn: {
      for (const auto& e : test_pos) {
        out.pos.push_back(cn_score(train, e, protocol.cn_variant));
      }
      for (const auto& e : negatives) {
        out.neg.push_back(cn_score(train, e, protocol.cn_variant));
      }
      break;
    }
    case ScorerKind::katz: {
      double damping;
      if (protocol.katz_grid.size() == 1) {
        damping = protocol.katz_grid.front();
      } else {
        KatzConfig cfg;
        cfg.damping_grid = protocol.katz_grid;
        cfg.folds = protocol.cv_folds;
        cfg.seed = derive_seed(run_seed, 2);
        damping = select_katz_damping(train, labeled, cfg);
      }
      const DenseMatrix k = katz_matrix(train, damping);
      for (const auto& e : test_pos) out.pos.push_back(katz_score_from_matrix(k, e));
      for (const auto& e : negatives) out.neg.push_back(katz_score_from_matrix(k, e));
      break;
    }
    case ScorerKind::external: {
      auto lookup = [&](const Hyperlink& e) {
        const std::string key = train.hyperlink_key(e);
        const auto it = protocol.external_scores.find(key);
        if (it == protocol.external_scores.end()) {
          throw Error("no external score for candidate '" + key + "'");
        }
        return it->second;
      };
      for (const auto& e : test_pos) out.pos.push_back(lookup(e));
      for (const auto& e : negatives) out.neg.push_back(lookup(e));
      break;
    }
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const Hypergraph& g, const ExperimentProtocol& protocol) {
  if (protocol.repetitions < 1) throw Error("repetitions must be >= 1");
  if (protocol.candidate_pool.empty() && protocol.negatives == 0) {
    throw Error("need --negatives or a candidate pool");
  }

  ExperimentReport report;
  for (int r = 0; r < protocol.repetitions; ++r) {
    const std::uint64_t seed = protocol.base_seed + static_cast<std::uint64_t>(r);
    const auto wall_start = std::chrono::steady_clock::now();

    SplitSpec split_spec;
    split_spec.test_count = protocol.test_count;
    split_spec.seed = seed;
    const Split split = split_train_test(g, split_spec);

    std::vector<Hyperlink> negatives;
    if (!protocol.candidate_pool.empty()) {
      negatives = protocol.candidate_pool;
    } else {
      NegativeSamplerConfig cfg;
      cfg.count = protocol.negatives;
      cfg.seed = derive_seed(seed, 1);
      negatives = sample_negative_hyperlinks(split.train, cfg);
    }

    const RunScores scores =
        score_run(split.train, split.test_positives, negatives, protocol, seed);

    RunResult run;
    run.seed = seed;
    run.auc = auc(scores.pos, scores.neg);
    {
      std::unordered_set<std::string> pos_keys;
      std::vector<std::pair<std::string, double>> ranked;
      ranked.reserve(scores.pos.size() + scores.neg.size());
      for (std::size_t i = 0; i < split.test_positives.size(); ++i) {
        std::string key = g.hyperlink_key(split.test_positives[i]);
        pos_keys.insert(key);
        ranked.emplace_back(std::move(key), scores.pos[i]);
      }
      for (std::size_t i = 0; i < negatives.size(); ++i) {
        ranked.emplace_back(g.hyperlink_key(negatives[i]), scores.neg[i]);
      }
      run.precision = precision_at(pos_keys, ranked, split.test_positives.size());
    }
    run.gamma = scores.gamma;
    run.tau_c = scores.tau_c;
    run.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
            .count();
    report.runs.push_back(std::move(run));
  }

  std::vector<double> aucs, precisions;
  for (const auto& run : report.runs) {
    aucs.push_back(run.auc);
    precisions.push_back(run.precision);
  }
  report.auc_mean = mean(aucs);
  report.auc_std = sample_std(aucs);
  report.precision_mean = mean(precisions);
  report.precision_std = sample_std(precisions);

  nlohmann::ordered_json cfg;
  cfg["scorer"] = scorer_name(protocol.scorer);
  cfg["test_count"] = protocol.test_count;
  cfg["candidate_source"] =
      protocol.candidate_pool.empty() ? "generated-per-run" : "provided-pool";
  if (protocol.candidate_pool.empty()) {
    cfg["negatives"] = protocol.negatives;
  } else {
    cfg["candidate_pool_size"] = protocol.candidate_pool.size();
  }
  cfg["repetitions"] = protocol.repetitions;
  cfg["base_seed"] = protocol.base_seed;
  if (protocol.scorer == ScorerKind::model) {
    if (protocol.tau_grid.empty()) {
      cfg["tau_max"] = protocol.tau_max;
    } else {
      cfg["tau_grid"] = protocol.tau_grid;
      cfg["cv_folds"] = protocol.cv_folds;
    }
    cfg["gamma_grid"] =
        protocol.gamma_grid.empty() ? default_gamma_grid() : protocol.gamma_grid;
    cfg["lambda"] = protocol.ridge_lambda;
    cfg["ablation"] = ablation_name(protocol.mode);
  }
  if (protocol.scorer == ScorerKind::cn) {
    cfg["cn_variant"] =
        protocol.cn_variant == CnVariant::binarized ? "binarized" : "walk-count";
  }
  if (protocol.scorer == ScorerKind::katz) {
    if (protocol.katz_grid.empty()) {
      cfg["katz_grid"] = "default";
    } else {
      cfg["katz_grid"] = protocol.katz_grid;
    }
    if (protocol.katz_grid.size() != 1) cfg["cv_folds"] = protocol.cv_folds;
  }
  report.config = std::move(cfg);
  return report;
}

ExperimentReport ablation(const Hypergraph& g, ExperimentProtocol protocol,
                          AblationMode mode) {
  protocol.mode = mode;
  return run_experiment(g, protocol);
}

nlohmann::ordered_json report_json(const ExperimentReport& report) {
  nlohmann::ordered_json doc;
  doc["looplink_version"] = kVersion;
  doc["config"] = report.config;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& run : report.runs) {
    nlohmann::ordered_json row;
    row["seed"] = run.seed;
    row["auc"] = run.auc;
    row["precision"] = run.precision;
    if (std::isnan(run.gamma)) {
      row["gamma"] = nullptr;
    } else {
      row["gamma"] = run.gamma;
    }
    if (run.tau_c > 0) {
      row["tau_c"] = run.tau_c;
    } else {
      row["tau_c"] = nullptr;
    }
    runs.push_back(std::move(row));
  }
  doc["runs"] = std::move(runs);
  doc["aggregate"] = {{"auc_mean", report.auc_mean},
                      {"auc_std", report.auc_std},
                      {"precision_mean", report.precision_mean},
                      {"precision_std", report.precision_std}};
  return doc;
}

std::string report_timings_text(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# wall-clock seconds per repetition (excluded from the report so\n"
         "# reports stay byte-identical across parallelism settings)\n";
  double total = 0.0;
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    out << "run " << r << " seed " << report.runs[r].seed << " seconds "
        << format_double(report.runs[r].runtime_seconds) << '\n';
    total += report.runs[r].runtime_seconds;
  }
  out << "total seconds " << format_double(total) << '\n';
  return out.str();
}

std::string summary_csv_row(const std::string& method, const std::string& dataset,
                            const ExperimentReport& report) {
  std::ostringstream out;
  out << method << ',' << dataset << ',' << format_double(report.auc_mean) << ','
      << format_double(report.auc_std) << ',' << format_double(report.precision_mean)
      << ',' << format_double(report.precision_std);
  return out.str();
}

}  // namespace looplink
