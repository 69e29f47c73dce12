#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "looplink/errors.hpp"
#include "looplink/kernels.hpp"
#include "looplink/spectrum.hpp"

using namespace looplink;

TEST_CASE("trace powers of the triangle adjacency") {
  const auto a = adjacency(testutil::triangle()).to_dense();
  const auto traces = trace_powers(a, 4);
  CHECK(traces[0] == 6.0);   // tr A^2: each of 3 edges walked both ways
  CHECK(traces[1] == 6.0);   // tr A^3: the two 3-cycles from each node
  CHECK(traces[2] == 18.0);  // tr A^4
}

TEST_CASE("trace powers of the 3-path adjacency") {
  const auto a = adjacency(testutil::path3()).to_dense();
  const auto traces = trace_powers(a, 3);
  CHECK(traces[0] == 4.0);
  CHECK(traces[1] == 0.0);  // bipartite: no odd loops
}

TEST_CASE("trace_powers validates its input") {
  CHECK_THROWS_AS(trace_powers(DenseMatrix(2, 3), 3), NonSquareMatrix);
  CHECK_THROWS_AS(trace_powers(DenseMatrix(2, 2), 1), std::invalid_argument);
}

TEST_CASE("loop-free traces clamp to the floor") {
  const auto g = Hypergraph::build({}, {{"a", "b"}});
  const auto s = spectrum(g, 3);
  CHECK(s.node_log_traces[0] == std::log(2.0));
  CHECK(s.node_log_traces[1] == std::log(kTraceFloor));  // tr A^3 = 0
  CHECK(s.link_log_traces[0] == std::log(kTraceFloor));  // single hyperlink
}

TEST_CASE("empty graph has an all-floor spectrum") {
  const auto s = spectrum(Hypergraph::build({}, {}), 4);
  for (double v : s.node_log_traces) CHECK(v == std::log(kTraceFloor));
  for (double v : s.link_log_traces) CHECK(v == std::log(kTraceFloor));
}

// The enumeration oracle walks alternating node/hyperlink sequences with no
// matrix algebra; traces must reproduce it exactly on small graphs.
TEST_CASE("traces equal brute-force loop counts on random graphs") {
  Rng rng(99991);
  int done = 0;
  while (done < 120) {
    const auto g = testutil::random_hypergraph(rng, 3 + done % 4, 1 + done % 6, 4);
    const auto a = adjacency(g).to_dense();
    const auto p = intersection_profile(g).to_dense();
    const auto node_traces = trace_powers(a, 5);
    const auto link_traces = trace_powers(p, 5);
    for (int tau = 2; tau <= 5; ++tau) {
      const auto node_bf = count_loops_bruteforce(g, tau, WalkKind::node_based);
      const auto link_bf = count_loops_bruteforce(g, tau, WalkKind::hyperlink_based);
      CHECK(node_traces[tau - 2] == static_cast<double>(node_bf));
      CHECK(link_traces[tau - 2] == static_cast<double>(link_bf));
    }
    ++done;
  }
}

TEST_CASE("enumeration guard refuses big graphs") {
  const auto g = testutil::ring(11);
  CHECK_THROWS_AS(count_loops_bruteforce(g, 2, WalkKind::node_based),
                  EnumerationTooLarge);
  CHECK_THROWS_AS(count_loops_bruteforce(testutil::triangle(), 7, WalkKind::node_based),
                  EnumerationTooLarge);
}

TEST_CASE("adding a hyperlink to the triangle lifts tr A^2 to 24") {
  const auto g = testutil::triangle();
  const auto f = perturbation_features(g, {0, 1, 2}, 2);
  // 3-hyperlink on top of the triangle doubles every A entry: trace 4x.
  CHECK(f.delta[0] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(f.cardinality == 3);
}

TEST_CASE("features do not depend on whether the hyperlink is observed") {
  const auto g = testutil::triangle();
  const Hyperlink e{0, 1, 2};
  const auto absent = perturbation_features(g, e, 4);
  const auto present = perturbation_features(g.with_hyperlink(e), e, 4);
  REQUIRE(absent.delta.size() == present.delta.size());
  for (std::size_t i = 0; i < absent.delta.size(); ++i) {
    CHECK(absent.delta[i] == present.delta[i]);
  }
}

TEST_CASE("feature layout is node block then link block") {
  const auto g = testutil::ring(6);
  const Hyperlink e{0, 2};
  const int tau = 4;
  const auto f = perturbation_features(g, e, tau);
  REQUIRE(f.delta.size() == 2 * (tau - 1));

  const auto plus = spectrum(g.with_hyperlink(e), tau);
  const auto minus = spectrum(g, tau);
  for (int t = 0; t < tau - 1; ++t) {
    CHECK(f.delta[t] == plus.node_log_traces[t] - minus.node_log_traces[t]);
    CHECK(f.delta[tau - 1 + t] == plus.link_log_traces[t] - minus.link_log_traces[t]);
  }
}

TEST_CASE("batch extraction is order-preserving and thread-count independent") {
  const auto g = testutil::ring(8);
  std::vector<Hyperlink> cands;
  for (NodeIndex i = 0; i < 8; ++i) {
    cands.push_back(g.canonical_hyperlink({i, static_cast<NodeIndex>((i + 2) % 8)}));
  }
  const auto serial = perturbation_features_batch(g, cands, 5, 1);
  const auto parallel = perturbation_features_batch(g, cands, 5, 4);
  REQUIRE(serial.size() == cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto direct = perturbation_features(g, cands[i], 5);
    CHECK(serial[i].delta == direct.delta);
    CHECK(parallel[i].delta == direct.delta);
    CHECK(serial[i].cardinality == 2);
  }
}

TEST_CASE("truncation equals direct extraction at the smaller cutoff") {
  const auto g = testutil::ring(7);
  const Hyperlink e{1, 4};
  const auto wide = perturbation_features(g, e, 6);
  const auto cut = truncate_features(wide, 6, 3);
  const auto direct = perturbation_features(g, e, 3);
  CHECK(cut.delta == direct.delta);
  CHECK(cut.cardinality == direct.cardinality);
  CHECK_THROWS_AS(truncate_features(wide, 6, 7), DimensionMismatch);
}

TEST_CASE("spectrum is identical across kernel backends") {
  if (!kernels::supported(kernels::Backend::avx2)) return;
  const auto saved = kernels::active();
  Rng rng(555);
  const auto g = testutil::random_hypergraph(rng, 9, 8, 4);

  kernels::set_active(kernels::Backend::scalar);
  const auto s1 = spectrum(g, 8);
  kernels::set_active(kernels::Backend::avx2);
  const auto s2 = spectrum(g, 8);
  kernels::set_active(saved);

  for (std::size_t i = 0; i < s1.node_log_traces.size(); ++i) {
    CHECK(s1.node_log_traces[i] ==
          doctest::Approx(s2.node_log_traces[i]).epsilon(1e-9));
    CHECK(s1.link_log_traces[i] ==
          doctest::Approx(s2.link_log_traces[i]).epsilon(1e-9));
  }
}
