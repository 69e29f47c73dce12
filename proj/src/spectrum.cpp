#include "looplink/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "looplink/errors.hpp"
#include "looplink/kernels.hpp"
#include "looplink/parallel.hpp"

namespace looplink {

std::vector<double> trace_powers(const DenseMatrix& m, int tau_max) {
  if (!m.square()) {
    throw NonSquareMatrix("trace_powers requires a square matrix (" +
                          std::to_string(m.rows) + "x" + std::to_string(m.cols) + ")");
  }
  if (tau_max < 2) throw std::invalid_argument("tau_max must be >= 2");

  std::vector<double> traces;
  traces.reserve(tau_max - 1);
  if (m.rows == 0) {
    traces.assign(tau_max - 1, 0.0);
    return traces;
  }

  // power = m^(t-1); tr(m^t) = <power, m>_F since m is symmetric, which
  // saves the final multiplication at each step.
  DenseMatrix power = m;
  DenseMatrix next;
  for (int t = 2; t <= tau_max; ++t) {
    traces.push_back(kernels::frobenius_dot(power, m));
    if (t < tau_max) {
      kernels::matmul(power, m, next);
      std::swap(power, next);
    }
  }
  return traces;
}

namespace {

std::vector<double> clamped_logs(std::vector<double> traces) {
  for (double& t : traces) {
    // A and P are entrywise nonnegative, so every trace is nonnegative up to
    // rounding.
    if (t < -1e-9) {
      throw Error("negative trace " + std::to_string(t) + " from a nonnegative matrix");
    }
    t = std::log(std::max(t, kTraceFloor));
  }
  return traces;
}

}  // namespace

LoopSpectrum spectrum(const Hypergraph& g, int tau_max) {
  LoopSpectrum s;
  s.tau_max = tau_max;
  s.node_log_traces = clamped_logs(trace_powers(adjacency(g).to_dense(), tau_max));
  s.link_log_traces = clamped_logs(trace_powers(intersection_profile(g).to_dense(), tau_max));
  return s;
}

PerturbationFeatures perturbation_features(const Hypergraph& g, const Hyperlink& e,
                                           int tau_max) {
  return perturbation_features(g, spectrum(g, tau_max), e, tau_max);
}

PerturbationFeatures perturbation_features(const Hypergraph& g,
                                           const LoopSpectrum& g_spectrum,
                                           const Hyperlink& raw, int tau_max) {
  const Hyperlink e = g.canonical_hyperlink(raw);
  // One side of the flip is g itself; only the other needs computing. The
  // two sides may have P matrices of different sizes, which is fine: only
  // scalar traces are differenced.
  LoopSpectrum flipped;
  const LoopSpectrum* plus = nullptr;
  const LoopSpectrum* minus = nullptr;
  if (g.contains(e)) {
    flipped = spectrum(g.without_hyperlink(e), tau_max);
    plus = &g_spectrum;
    minus = &flipped;
  } else {
    flipped = spectrum(g.with_hyperlink(e), tau_max);
    plus = &flipped;
    minus = &g_spectrum;
  }

  PerturbationFeatures f;
  f.cardinality = e.size();
  f.delta.reserve(2 * (tau_max - 1));
  for (int k = 0; k < tau_max - 1; ++k) {
    f.delta.push_back(plus->node_log_traces[k] - minus->node_log_traces[k]);
  }
  for (int k = 0; k < tau_max - 1; ++k) {
    f.delta.push_back(plus->link_log_traces[k] - minus->link_log_traces[k]);
  }
  return f;
}

std::vector<PerturbationFeatures> perturbation_features_batch(
    const Hypergraph& g, const std::vector<Hyperlink>& candidates, int tau_max,
    int jobs) {
  const LoopSpectrum base = spectrum(g, tau_max);
  std::vector<PerturbationFeatures> out(candidates.size());
  parallel_for(candidates.size(), jobs, [&](std::size_t i) {
    out[i] = perturbation_features(g, base, candidates[i], tau_max);
  });
  return out;
}

PerturbationFeatures truncate_features(const PerturbationFeatures& f, int from_tau,
                                       int to_tau) {
  if (to_tau > from_tau || to_tau < 2 ||
      f.delta.size() != 2 * static_cast<std::size_t>(from_tau - 1)) {
    throw DimensionMismatch("cannot truncate features from tau_max " +
                            std::to_string(from_tau) + " to " + std::to_string(to_tau));
  }
  PerturbationFeatures out;
  out.cardinality = f.cardinality;
  out.label = f.label;
  const std::size_t block = from_tau - 1;
  const std::size_t keep = to_tau - 1;
  out.delta.reserve(2 * keep);
  for (std::size_t k = 0; k < keep; ++k) out.delta.push_back(f.delta[k]);
  for (std::size_t k = 0; k < keep; ++k) out.delta.push_back(f.delta[block + k]);
  return out;
}

namespace {

struct WalkEnumerator {
  const std::vector<Hyperlink>* links;
  std::vector<std::vector<std::uint32_t>> incident;  // node -> link ids

  std::int64_t node_loops(NodeIndex origin, NodeIndex current, int steps_left) const {
    if (steps_left == 0) return current == origin ? 1 : 0;
    std::int64_t total = 0;
    for (std::uint32_t a : incident[current]) {
      for (NodeIndex next : (*links)[a]) {
        if (next == current) continue;  // no consecutive repeated node
        total += node_loops(origin, next, steps_left - 1);
      }
    }
    return total;
  }

  std::int64_t link_loops(std::uint32_t origin, std::uint32_t current,
                          int steps_left) const {
    if (steps_left == 0) return current == origin ? 1 : 0;
    std::int64_t total = 0;
    for (NodeIndex v : (*links)[current]) {
      for (std::uint32_t next : incident[v]) {
        if (next == current) continue;  // no consecutive repeated hyperlink
        total += link_loops(origin, next, steps_left - 1);
      }
    }
    return total;
  }
};

}  // namespace

std::int64_t count_loops_bruteforce(const Hypergraph& g, int tau, WalkKind kind) {
  if (g.node_count() > 10 || g.hyperlink_count() > 10 || tau > 6) {
    throw EnumerationTooLarge("brute-force loop enumeration is limited to n <= 10, "
                              "m <= 10, tau <= 6");
  }
  if (tau < 1) throw std::invalid_argument("tau must be >= 1");

  WalkEnumerator walker;
  walker.links = &g.hyperlinks();
  walker.incident.resize(g.node_count());
  for (std::uint32_t a = 0; a < g.hyperlink_count(); ++a) {
    for (NodeIndex v : g.hyperlink(a)) walker.incident[v].push_back(a);
  }

  std::int64_t total = 0;
  if (kind == WalkKind::node_based) {
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      total += walker.node_loops(v, v, tau);
    }
  } else {
    for (std::uint32_t a = 0; a < g.hyperlink_count(); ++a) {
      total += walker.link_loops(a, a, tau);
    }
  }
  return total;
}

}  // namespace looplink
