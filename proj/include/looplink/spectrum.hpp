#pragma once

#include <cstdint>
#include <vector>

#include "looplink/dense.hpp"
#include "looplink/hypergraph.hpp"

namespace looplink {

// Traces below this floor are clamped before the logarithm so that empty or
// loop-free graphs still yield finite features.
inline constexpr double kTraceFloor = 1e-12;

// Log loop counts of one hypergraph: log tr(A^t) and log tr(P^t) for
// t = 2..tau_max (vectors of length tau_max - 1).
struct LoopSpectrum {
  int tau_max = 0;
  std::vector<double> node_log_traces;
  std::vector<double> link_log_traces;
};

// Change in loop spectrum caused by forcing a hyperlink present vs absent,
// ordered [node block t=2..tau_max, link block t=2..tau_max].
struct PerturbationFeatures {
  std::vector<double> delta;
  std::size_t cardinality = 0;
  int label = 0;  // +1 / -1 when known, 0 otherwise
};

// tr(m^t) for t = 2..tau_max by iterated multiplication. m must be square
// (NonSquareMatrix otherwise) and is assumed symmetric with zero diagonal.
std::vector<double> trace_powers(const DenseMatrix& m, int tau_max);

LoopSpectrum spectrum(const Hypergraph& g, int tau_max);

PerturbationFeatures perturbation_features(const Hypergraph& g, const Hyperlink& e,
                                           int tau_max);

// Same, reusing a precomputed spectrum(g, tau_max); only the flipped side is
// recomputed. Bitwise identical to the two-sided overload.
PerturbationFeatures perturbation_features(const Hypergraph& g,
                                           const LoopSpectrum& g_spectrum,
                                           const Hyperlink& e, int tau_max);

// Feature extraction over a candidate list: an order-preserving parallel map
// over a shared read-only hypergraph.
std::vector<PerturbationFeatures> perturbation_features_batch(
    const Hypergraph& g, const std::vector<Hyperlink>& candidates, int tau_max,
    int jobs);

// Restricts features computed at a larger cutoff to a smaller one by taking
// the leading entries of each block.
PerturbationFeatures truncate_features(const PerturbationFeatures& f, int from_tau,
                                       int to_tau);

enum class WalkKind { node_based, hyperlink_based };

// Exact closed-walk count by explicit enumeration of alternating
// node/hyperlink sequences; the independent oracle for trace_powers.
// Guarded to n <= 10, m <= 10, tau <= 6 (EnumerationTooLarge beyond).
std::int64_t count_loops_bruteforce(const Hypergraph& g, int tau, WalkKind kind);

}  // namespace looplink
