#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "looplink/errors.hpp"
#include "looplink/model.hpp"
#include "looplink/rng.hpp"

using namespace looplink;

namespace {

PerturbationFeatures feat(std::vector<double> delta, std::size_t card, int label) {
  PerturbationFeatures f;
  f.delta = std::move(delta);
  f.cardinality = card;
  f.label = label;
  return f;
}

// Rows with iid standard-normal features, labels drawn from the logistic
// model with the given weights, intercept and cardinality exponent.
TrainingSet planted_rows(Rng& rng, std::size_t n, const std::vector<double>& w,
                         double c, double gamma_true, std::size_t card_min,
                         std::size_t card_max) {
  TrainingSet data;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> delta(w.size());
    for (double& x : delta) x = normal_unit(rng);
    const std::size_t card =
        card_min + uniform_index(rng, card_max - card_min + 1);
    double eta = c;
    const double scale = std::pow(static_cast<double>(card), -gamma_true);
    for (std::size_t j = 0; j < w.size(); ++j) eta += scale * w[j] * delta[j];
    const double p = 1.0 / (1.0 + std::exp(-eta));
    data.rows.push_back(feat(std::move(delta), card, uniform_unit(rng) < p ? 1 : -1));
  }
  return data;
}

}  // namespace

TEST_CASE("design_row applies the cardinality exponent") {
  const auto f = feat({std::log(4.0)}, 3, 1);
  const auto row = design_row(f, 2.0);
  CHECK(row[0] == doctest::Approx(std::log(4.0) / 9.0).epsilon(1e-15));
  CHECK(design_row(f, 0.0)[0] == std::log(4.0));
}

TEST_CASE("make_grid covers the endpoints") {
  const auto g = make_grid(0.0, 0.1, 2.0);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(make_grid(0.5, 0.1, 0.5) == std::vector<double>{0.5});
  CHECK(default_gamma_grid().size() == 21);
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(314159);
  const std::size_t n = 40, d = 6;
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  std::vector<int> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (double& x : rows[r]) x = normal_unit(rng);
    labels[r] = uniform_unit(rng) < 0.5 ? 1 : -1;
  }
  const double lambda = 0.37;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> w(d);
    for (double& x : w) x = normal_unit(rng) * 0.8;
    double c = normal_unit(rng) * 0.5;

    std::vector<double> grad;
    penalized_loglik(rows, labels, w, c, lambda, &grad);

    const double h = 1e-5;
    for (std::size_t j = 0; j <= d; ++j) {
      auto wp = w, wm = w;
      double cp = c, cm = c;
      if (j < d) {
        wp[j] += h;
        wm[j] -= h;
      } else {
        cp += h;
        cm -= h;
      }
      const double fd = (penalized_loglik(rows, labels, wp, cp, lambda) -
                         penalized_loglik(rows, labels, wm, cm, lambda)) /
                        (2.0 * h);
      CHECK(std::abs(fd - grad[j]) / std::max(1.0, std::abs(grad[j])) < 1e-6);
    }
  }
}

TEST_CASE("objective trace is monotone nondecreasing") {
  Rng rng(2718);
  const auto data = planted_rows(rng, 300, {0.9, -0.4, 0.2, 1.1}, -0.2, 0.0, 2, 2);
  const auto res = fit_fixed_gamma(data, 0.0, 1e-6, {});
  REQUIRE(res.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
    CHECK(res.objective_trace[i] >= res.objective_trace[i - 1] - 1e-12);
  }
  CHECK(res.objective == res.objective_trace.back());
  CHECK_FALSE(res.non_convergence);
}

TEST_CASE("constant features collapse to the intercept-only solution") {
  TrainingSet data;
  for (int i = 0; i < 30; ++i) data.rows.push_back(feat({0.3, 0.7}, 2, 1));
  for (int i = 0; i < 10; ++i) data.rows.push_back(feat({0.3, 0.7}, 2, -1));
  const auto res = fit_fixed_gamma(data, 1.0, 1e-6, {});
  CHECK(res.weights[0] == 0.0);
  CHECK(res.weights[1] == 0.0);
  // MLE of the intercept alone: log(p / (1-p)) at p = 3/4.
  CHECK(res.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-6));
}

TEST_CASE("planted coefficients recovered within 10 percent") {
  Rng rng(424242);
  const std::vector<double> truth{1.2, -0.8, 0.5, 2.0};
  const double c_truth = 0.3;
  const auto data = planted_rows(rng, 10000, truth, c_truth, 0.0, 2, 2);
  const auto res = fit_fixed_gamma(data, 0.0, 1e-6, {});
  REQUIRE_FALSE(res.non_convergence);
  double c_orig = res.intercept;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double w_orig = res.weights[j] / res.standardization.scale[j];
    c_orig -= w_orig * res.standardization.mean[j];
    CHECK(std::abs(w_orig - truth[j]) / std::abs(truth[j]) < 0.10);
  }
  CHECK(std::abs(c_orig - c_truth) < 0.15);
}

TEST_CASE("degenerate labels are rejected") {
  TrainingSet all_pos;
  all_pos.rows.push_back(feat({1.0, 0.0}, 2, 1));
  all_pos.rows.push_back(feat({0.0, 1.0}, 2, 1));
  CHECK_THROWS_AS(fit_fixed_gamma(all_pos, 0.0, 1e-6, {}), DegenerateLabels);
  CHECK_THROWS_AS(fit_fixed_gamma(TrainingSet{}, 0.0, 1e-6, {}), DegenerateLabels);

  TrainingSet unlabeled;
  unlabeled.rows.push_back(feat({1.0, 0.0}, 2, 0));
  CHECK_THROWS_AS(fit_fixed_gamma(unlabeled, 0.0, 1e-6, {}), DegenerateLabels);
}

TEST_CASE("separable data without ridge is flagged non-convergent") {
  TrainingSet data;
  for (int i = 0; i < 4; ++i) data.rows.push_back(feat({1.0, 1.0 + 0.1 * i}, 2, 1));
  for (int i = 0; i < 4; ++i) data.rows.push_back(feat({-1.0, -1.0 - 0.1 * i}, 2, -1));
  CHECK(fit_fixed_gamma(data, 0.0, 0.0, {}).non_convergence);
  CHECK_FALSE(fit_fixed_gamma(data, 0.0, 1e-6, {}).non_convergence);
}

TEST_CASE("uniform cardinality makes gamma irrelevant and keeps the grid minimum") {
  Rng rng(606060);
  const auto data = planted_rows(rng, 400, {0.7, -0.3, 0.4, -0.9}, 0.1, 0.0, 3, 3);
  std::vector<GammaSearchRow> search;
  const auto model = fit(data, 3, {0.0, 0.5, 1.0, 1.5}, 1e-6, {}, &search);
  CHECK(model.gamma == 0.0);
  REQUIRE(search.size() == 4);
  for (const auto& row : search) {
    CHECK(row.objective == doctest::Approx(search.front().objective).epsilon(1e-9));
  }
}

TEST_CASE("grid search prefers a strictly better gamma") {
  Rng rng(515151);
  const auto data = planted_rows(rng, 3000, {1.5, -1.0, 0.8, 1.2}, 0.0, 1.0, 2, 6);
  std::vector<GammaSearchRow> search;
  const auto model = fit(data, 3, default_gamma_grid(), 1e-6, {}, &search);
  CHECK(model.gamma >= 0.6);
  CHECK(model.gamma <= 1.4);
}

TEST_CASE("model round-trips through save and load") {
  Rng rng(808);
  const auto data = planted_rows(rng, 200, {0.6, -0.2, 0.9, 0.1}, -0.4, 0.0, 2, 4);
  const auto model = fit(data, 3, {0.0, 1.0}, 1e-6, {});

  std::stringstream buf;
  model.save(buf, "smoke test\nsecond line");
  const auto loaded = FittedModel::load(buf);

  CHECK(loaded.tau_max == model.tau_max);
  CHECK(loaded.gamma == model.gamma);
  CHECK(loaded.ridge_lambda == model.ridge_lambda);
  CHECK(loaded.intercept == model.intercept);
  CHECK(loaded.alpha == model.alpha);
  CHECK(loaded.beta == model.beta);
  CHECK(loaded.standardization.mean == model.standardization.mean);
  CHECK(loaded.standardization.scale == model.standardization.scale);

  const auto probe = feat({0.3, -1.2, 0.8, 0.05}, 3, 0);
  CHECK(loaded.predict_proba(probe) == model.predict_proba(probe));
  CHECK_THROWS_AS(model.predict_proba(feat({1.0}, 2, 0)), DimensionMismatch);
}

TEST_CASE("load rejects malformed model files") {
  std::stringstream empty("# nothing\n");
  CHECK_THROWS_AS(FittedModel::load(empty), Error);
  std::stringstream bad_dims(
      "format 1\ntau_max 3\nmode full\ngamma 0\nlambda 0\nintercept 0\n"
      "objective 0\nnon_convergence 0\nalpha 1\nbeta 1 2\nmean 0 0 0 0\n"
      "scale 1 1 1 1\n");
  CHECK_THROWS_AS(FittedModel::load(bad_dims), DimensionMismatch);
}

TEST_CASE("ablation masks one feature block") {
  Rng rng(1234);
  const auto data = planted_rows(rng, 500, {1.0, 0.5, -0.7, 0.9, 0.2, -1.1}, 0.0,
                                 0.0, 2, 3);
  FitOptions node_only;
  node_only.mode = AblationMode::node_only;
  const auto m1 = fit(data, 4, {0.0}, 1e-6, node_only);
  for (double b : m1.beta) CHECK(b == 0.0);
  CHECK(m1.alpha != std::vector<double>(3, 0.0));

  FitOptions link_only;
  link_only.mode = AblationMode::hyperlink_only;
  const auto m2 = fit(data, 4, {0.0}, 1e-6, link_only);
  for (double a : m2.alpha) CHECK(a == 0.0);

  // Masked-block inputs cannot influence the prediction.
  auto probe = feat({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 2, 0);
  auto probe_junk = probe;
  probe_junk.delta[3] = 99.0;
  probe_junk.delta[5] = -99.0;
  CHECK(m1.predict_proba(probe) == m1.predict_proba(probe_junk));

  CHECK(parse_ablation("node-only") == AblationMode::node_only);
  CHECK_THROWS_AS(parse_ablation("both"), Error);
}

TEST_CASE("tau cross-validation finds the loop length that separates") {
  // Ring with chord candidates: every chord shifts tr A^2 and tr P^2 by the
  // same amount, so tau 2 carries no signal; distance-2 chords close a
  // triangle and show up first at tau 3.
  const auto g = testutil::ring(12);
  std::vector<std::pair<Hyperlink, int>> labeled;
  for (NodeIndex i = 0; i < 12; ++i) {
    labeled.push_back({g.canonical_hyperlink({i, static_cast<NodeIndex>((i + 2) % 12)}), 1});
    labeled.push_back({g.canonical_hyperlink({i, static_cast<NodeIndex>((i + 3) % 12)}), -1});
  }
  TauSelectConfig cfg;
  cfg.folds = 3;
  cfg.seed = 77;
  cfg.gamma_grid = {0.0};

  cfg.grid = {2, 3};
  CHECK(select_tau_c(g, labeled, cfg) == 3);
  cfg.grid = {3, 4};
  CHECK(select_tau_c(g, labeled, cfg) == 3);  // ties go to the shorter cutoff
  cfg.grid = {2};
  CHECK(select_tau_c(g, labeled, cfg) == 2);
}
