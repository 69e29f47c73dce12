// looplink: hyperlink prediction from loop-spectrum perturbations.
//
// Subcommands:
//   fit         train a model on a graph plus a negative-candidate file
//   score       rank candidates under a saved model
//   experiment  repeated delete/sample/fit/evaluate runs with a report
//   oracle      cross-check trace loop counts against brute-force enumeration

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "looplink/dataio.hpp"
#include "looplink/errors.hpp"
#include "looplink/evaluation.hpp"
#include "looplink/kernels.hpp"
#include "looplink/model.hpp"
#include "looplink/spectrum.hpp"
#include "looplink/version.hpp"

namespace {

using namespace looplink;

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Candidate file: same line format as the graph file, labels resolved
// against the graph's node set.
std::vector<Hyperlink> read_candidates(const std::string& path, const Hypergraph& g) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<Hyperlink> out;
  std::unordered_set<Hyperlink, HyperlinkHash> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> labels;
    std::string tok;
    while (fields >> tok) labels.push_back(std::move(tok));
    std::vector<std::string> sorted(labels);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw MalformedLine(line_no, "repeated node label within the candidate");
    }
    Hyperlink e;
    try {
      e = g.hyperlink_from_labels(labels);
    } catch (const SingletonHyperlink&) {
      throw SingletonHyperlink("line " + std::to_string(line_no) +
                               ": candidate needs >= 2 distinct nodes");
    }
    if (!seen.insert(e).second) {
      throw DuplicateHyperlink("line " + std::to_string(line_no) +
                               ": candidate already listed");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<double> parse_gamma_grid(const std::string& text) {
  double lo = 0.0, step = 0.0, hi = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (in >> lo >> c1 >> step >> c2 >> hi && c1 == ':' && c2 == ':' && in.eof()) {
    return make_grid(lo, step, hi);
  }
  throw Error("--gamma expects min:step:max, got '" + text + "'");
}

std::vector<int> parse_tau_grid(const std::string& text) {
  // Accepted forms: "6:14" (step 1), "6:2:14", or "6,8,10".
  std::vector<int> grid;
  if (text.find(',') != std::string::npos) {
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) grid.push_back(std::stoi(part));
  } else {
    int lo = 0, step = 1, hi = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1)) throw Error("--tau-grid expects lo:hi, lo:step:hi or a,b,c");
    if (!(in >> hi)) throw Error("--tau-grid expects lo:hi, lo:step:hi or a,b,c");
    if (in >> c2) {
      step = hi;
      if (!(in >> hi) || c2 != ':') {
        throw Error("--tau-grid expects lo:hi, lo:step:hi or a,b,c");
      }
    }
    if (c1 != ':' || step < 1 || hi < lo) {
      throw Error("--tau-grid expects lo:hi, lo:step:hi or a,b,c");
    }
    for (int t = lo; t <= hi; t += step) grid.push_back(t);
  }
  for (int t : grid) {
    if (t < 2) throw Error("tau cutoffs must be >= 2");
  }
  return grid;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

struct FitArgs {
  std::string graph, candidates, output;
  int tau_max = 8;
  std::string tau_grid, gamma = "0:0.1:2";
  double lambda = 1e-6;
  std::string ablation = "full";
  std::uint64_t seed = 0;
  int jobs = default_jobs();
  bool no_standardize = false;
};

int cmd_fit(const FitArgs& args) {
  const Hypergraph g = parse_hyperlink_file(args.graph);
  const auto negatives = read_candidates(args.candidates, g);

  std::vector<std::pair<Hyperlink, int>> labeled;
  for (const auto& e : g.hyperlinks()) labeled.emplace_back(e, 1);
  for (const auto& e : negatives) labeled.emplace_back(e, -1);

  const auto gamma_grid = parse_gamma_grid(args.gamma);
  const AblationMode mode = parse_ablation(args.ablation);

  int tau_c = args.tau_max;
  if (!args.tau_grid.empty()) {
    TauSelectConfig cfg;
    cfg.grid = parse_tau_grid(args.tau_grid);
    cfg.seed = args.seed;
    cfg.gamma_grid = gamma_grid;
    cfg.ridge_lambda = args.lambda;
    cfg.mode = mode;
    cfg.jobs = args.jobs;
    tau_c = select_tau_c(g, labeled, cfg);
  }
  if (tau_c < 2) throw Error("--tau-max must be >= 2");

  TrainingSet data;
  {
    std::vector<Hyperlink> cands(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) cands[i] = labeled[i].first;
    data.rows = perturbation_features_batch(g, cands, tau_c, args.jobs);
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      data.rows[i].label = labeled[i].second;
    }
  }

  FitOptions opts;
  opts.mode = mode;
  opts.standardize = !args.no_standardize;
  std::vector<GammaSearchRow> search;
  const FittedModel model =
      fit(data, tau_c, gamma_grid, args.lambda, opts, &search);

  std::ostringstream echo;
  echo << "looplink " << kVersion << '\n';
  echo << "graph " << args.graph << '\n';
  echo << "candidates " << args.candidates << '\n';
  echo << "tau_c " << tau_c
       << (args.tau_grid.empty() ? " (fixed)" : " (cross-validated)") << '\n';
  echo << "gamma_grid " << args.gamma << '\n';
  echo << "lambda " << format_double(args.lambda) << '\n';
  echo << "ablation " << ablation_name(mode) << '\n';
  echo << "seed " << args.seed << '\n';
  echo << "standardize " << (opts.standardize ? 1 : 0) << '\n';
  {
    auto out = open_output(args.output);
    model.save(out, echo.str());
  }

  auto log = open_output(args.output + ".log");
  log << "# looplink " << kVersion << " fit log\n";
  log << "tau_c " << tau_c << '\n';
  log << "selected_gamma " << format_double(model.gamma) << '\n';
  log << "objective " << format_double(model.objective) << '\n';
  log << "non_convergence " << (model.non_convergence ? 1 : 0) << '\n';
  log << "rows " << data.rows.size() << " (" << g.hyperlink_count()
      << " positive, " << negatives.size() << " negative)\n";
  for (const auto& row : search) {
    log << "gamma " << format_double(row.gamma) << " objective "
        << format_double(row.objective) << " iterations " << row.iterations
        << (row.non_convergence ? " non-convergent" : "") << '\n';
  }
  std::cerr << "fit: tau_c " << tau_c << ", gamma " << format_double(model.gamma)
            << ", objective " << format_double(model.objective) << '\n';
  if (model.non_convergence) {
    std::cerr << "fit: warning: optimizer did not converge "
                 "(separable data or iteration cap)\n";
  }
  return 0;
}

struct ScoreArgs {
  std::string model, graph, candidates, output;
  int jobs = default_jobs();
};

int cmd_score(const ScoreArgs& args) {
  FittedModel model;
  {
    std::ifstream in(args.model);
    if (!in) throw Error("cannot open '" + args.model + "'");
    model = FittedModel::load(in);
  }
  const Hypergraph g = parse_hyperlink_file(args.graph);
  const auto candidates = read_candidates(args.candidates, g);

  const auto feats =
      perturbation_features_batch(g, candidates, model.tau_max, args.jobs);
  std::vector<std::pair<std::string, double>> scored(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scored[i] = {g.hyperlink_key(candidates[i]), model.predict_proba(feats[i])};
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.output.empty()) {
    file = open_output(args.output);
    out = &file;
  }
  *out << "# looplink " << kVersion << " scores\n";
  *out << "# model " << args.model << " tau_max " << model.tau_max << " gamma "
       << format_double(model.gamma) << " ablation " << ablation_name(model.mode)
       << '\n';
  *out << "# graph " << args.graph << " candidates " << args.candidates << '\n';
  for (std::size_t i = 0; i < scored.size(); ++i) {
    *out << scored[i].first << '\t' << format_double(scored[i].second) << '\t'
         << i + 1 << '\n';
  }
  return 0;
}

struct ExperimentArgs {
  std::string graph, candidates, output, external_scores;
  std::size_t test_count = 0;
  std::size_t negatives = 0;
  int repetitions = 12;
  std::uint64_t seed = 0;
  int tau_max = 8;
  std::string tau_grid, gamma = "0:0.1:2";
  double lambda = 1e-6;
  std::string ablation = "full";
  std::string baseline;
  int jobs = default_jobs();
};

int cmd_experiment(const ExperimentArgs& args) {
  const Hypergraph g = parse_hyperlink_file(args.graph);

  ExperimentProtocol protocol;
  protocol.test_count = args.test_count;
  protocol.negatives = args.negatives;
  if (!args.candidates.empty()) {
    protocol.candidate_pool = read_candidates(args.candidates, g);
  }
  protocol.repetitions = args.repetitions;
  protocol.base_seed = args.seed;
  protocol.tau_max = args.tau_max;
  if (!args.tau_grid.empty()) protocol.tau_grid = parse_tau_grid(args.tau_grid);
  protocol.gamma_grid = parse_gamma_grid(args.gamma);
  protocol.ridge_lambda = args.lambda;
  protocol.mode = parse_ablation(args.ablation);
  protocol.jobs = args.jobs;

  if (!args.baseline.empty() && !args.external_scores.empty()) {
    throw Error("--baseline and --external-scores are mutually exclusive");
  }
  if (args.baseline == "cn") {
    protocol.scorer = ScorerKind::cn;
  } else if (args.baseline == "katz") {
    protocol.scorer = ScorerKind::katz;
  } else if (!args.baseline.empty()) {
    throw Error("unknown --baseline '" + args.baseline + "' (cn|katz)");
  } else if (!args.external_scores.empty()) {
    protocol.scorer = ScorerKind::external;
    protocol.external_scores = read_external_scores(args.external_scores);
  }
  if (args.tau_max < 2) throw Error("--tau-max must be >= 2");

  const ExperimentReport report = run_experiment(g, protocol);

  std::string method = scorer_name(protocol.scorer);
  if (protocol.scorer == ScorerKind::model && protocol.mode != AblationMode::full) {
    method += std::string("-") + ablation_name(protocol.mode);
  }
  const std::string dataset = std::filesystem::path(args.graph).stem().string();

  {
    auto out = open_output(args.output);
    out << report_json(report).dump(2) << '\n';
  }
  {
    auto out = open_output(args.output + ".summary.csv");
    out << "method,dataset,auc_mean,auc_std,prec_mean,prec_std\n";
    out << summary_csv_row(method, dataset, report) << '\n';
  }
  {
    auto out = open_output(args.output + ".timings.txt");
    out << report_timings_text(report);
  }
  std::cerr << "experiment: " << report.runs.size() << " runs, auc "
            << format_double(report.auc_mean) << " +/- "
            << format_double(report.auc_std) << ", precision "
            << format_double(report.precision_mean) << " +/- "
            << format_double(report.precision_std) << '\n';
  return 0;
}

struct OracleArgs {
  std::string graph;
  int tau = 0;
  std::string kind = "node";
};

int cmd_oracle(const OracleArgs& args) {
  if (args.tau < 2) throw Error("--tau must be >= 2");
  const Hypergraph g = parse_hyperlink_file(args.graph);
  const WalkKind kind =
      args.kind == "link" ? WalkKind::hyperlink_based : WalkKind::node_based;

  const std::int64_t bf = count_loops_bruteforce(g, args.tau, kind);
  const DenseMatrix m = kind == WalkKind::node_based
                            ? adjacency(g).to_dense()
                            : intersection_profile(g).to_dense();
  const double trace = trace_powers(m, args.tau).at(args.tau - 2);

  std::cout << "bruteforce " << bf << '\n';
  std::cout << "trace " << format_double(trace) << '\n';
  const bool agree =
      std::abs(trace - static_cast<double>(bf)) <=
      1e-6 * std::max(1.0, std::abs(static_cast<double>(bf)));
  if (!agree) {
    std::cerr << "oracle: MISMATCH\n";
    return 4;
  }
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"hyperlink prediction from loop-spectrum perturbations"};
  app.set_version_flag("--version", std::string("looplink ") + kVersion);
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "train a model");
  fit_cmd->add_option("--graph", fit_args.graph, "observed hyperlink file")->required();
  fit_cmd->add_option("--candidates", fit_args.candidates,
                      "negative-candidate hyperlink file")->required();
  fit_cmd->add_option("--tau-max", fit_args.tau_max, "loop-length cutoff");
  fit_cmd->add_option("--tau-grid", fit_args.tau_grid,
                      "cross-validate the cutoff over lo:hi, lo:step:hi or a,b,c");
  fit_cmd->add_option("--gamma", fit_args.gamma, "gamma grid min:step:max");
  fit_cmd->add_option("--lambda", fit_args.lambda, "ridge strength (0 disables)");
  fit_cmd->add_option("--ablation", fit_args.ablation,
                      "full|node-only|hyperlink-only");
  fit_cmd->add_option("--seed", fit_args.seed, "seed for cutoff cross-validation");
  fit_cmd->add_option("--jobs", fit_args.jobs, "worker threads");
  fit_cmd->add_flag("--no-standardize", fit_args.no_standardize,
                    "skip per-feature standardization");
  fit_cmd->add_option("--output", fit_args.output, "model file path")->required();

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "rank candidates under a model");
  score_cmd->add_option("--model", score_args.model, "model file")->required();
  score_cmd->add_option("--graph", score_args.graph, "observed hyperlink file")
      ->required();
  score_cmd->add_option("--candidates", score_args.candidates, "candidates to score")
      ->required();
  score_cmd->add_option("--output", score_args.output, "score table (default stdout)");
  score_cmd->add_option("--jobs", score_args.jobs, "worker threads");

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand("experiment", "repeated evaluation runs");
  exp_cmd->add_option("--graph", exp_args.graph, "full hyperlink file")->required();
  exp_cmd->add_option("--test-count", exp_args.test_count,
                      "hyperlinks deleted per run")->required();
  exp_cmd->add_option("--negatives", exp_args.negatives,
                      "fake hyperlinks generated per run");
  exp_cmd->add_option("--candidates", exp_args.candidates,
                      "fixed negative pool file (instead of --negatives)");
  exp_cmd->add_option("--repetitions", exp_args.repetitions, "independent runs");
  exp_cmd->add_option("--seed", exp_args.seed, "base seed; run r uses seed+r");
  exp_cmd->add_option("--tau-max", exp_args.tau_max, "loop-length cutoff");
  exp_cmd->add_option("--tau-grid", exp_args.tau_grid,
                      "cross-validate the cutoff per run");
  exp_cmd->add_option("--gamma", exp_args.gamma, "gamma grid min:step:max");
  exp_cmd->add_option("--lambda", exp_args.lambda, "ridge strength");
  exp_cmd->add_option("--ablation", exp_args.ablation,
                      "full|node-only|hyperlink-only");
  exp_cmd->add_option("--baseline", exp_args.baseline,
                      "score with a baseline instead of the model (cn|katz)");
  exp_cmd->add_option("--external-scores", exp_args.external_scores,
                      "key<TAB>score file from an external method");
  exp_cmd->add_option("--jobs", exp_args.jobs, "worker threads");
  exp_cmd->add_option("--output", exp_args.output, "report path")->required();

  OracleArgs oracle_args;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "verify loop counts on a small graph");
  oracle_cmd->add_option("--graph", oracle_args.graph, "hyperlink file")->required();
  oracle_cmd->add_option("--tau", oracle_args.tau, "loop length (2..6)")->required();
  oracle_cmd->add_option("--kind", oracle_args.kind, "node|link");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (fit_cmd->parsed()) return cmd_fit(fit_args);
  if (score_cmd->parsed()) return cmd_score(score_args);
  if (exp_cmd->parsed()) return cmd_experiment(exp_args);
  return cmd_oracle(oracle_args);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const MalformedLine& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 1;
  } catch (const DuplicateHyperlink& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 1;
  } catch (const SingletonHyperlink& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 1;
  } catch (const UnknownLabel& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 1;
  } catch (const DegenerateLabels& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 2;
  } catch (const DimensionMismatch& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 2;
  } catch (const NonSquareMatrix& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 2;
  } catch (const DivergentSeries& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 2;
  } catch (const InsufficientData& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 2;
  } catch (const SamplerExhausted& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 2;
  } catch (const EmptyScoreList& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 2;
  } catch (const RankTooLarge& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 2;
  } catch (const looplink::Error& e) {
    // Remaining library errors are configuration problems
    // (TestCountTooLarge, EnumerationTooLarge, bad flag values).
    std::cerr << "looplink: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "looplink: " << e.what() << '\n';
    return 3;
  }
}
