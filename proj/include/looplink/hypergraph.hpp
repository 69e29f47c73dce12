#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "looplink/dense.hpp"

namespace looplink {

using NodeIndex = std::uint32_t;

// A hyperlink is a set of node indices, stored sorted ascending with no
// repeats. Two hyperlinks are equal iff they are equal as sets.
using Hyperlink = std::vector<NodeIndex>;

struct HyperlinkHash {
  std::size_t operator()(const Hyperlink& e) const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (NodeIndex v : e) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Immutable hypergraph: ordered node labels (lexicographic) plus hyperlinks
// in input order. with_hyperlink / without_hyperlink return new values.
class Hypergraph {
 public:
  Hypergraph() = default;

  // Builds from labels. `node_labels` may be empty, in which case the node
  // set is the union of the hyperlink labels. Nodes are indexed in
  // lexicographic label order regardless of the order given.
  static Hypergraph build(std::vector<std::string> node_labels,
                          const std::vector<std::vector<std::string>>& hyperlinks);

  // Builds from pre-indexed data. `node_labels` must already be sorted
  // ascending; hyperlink node indices must be valid.
  static Hypergraph from_indexed(std::vector<std::string> node_labels,
                                 const std::vector<Hyperlink>& hyperlinks);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t hyperlink_count() const { return links_.size(); }

  const std::vector<std::string>& node_labels() const { return nodes_; }
  const std::string& label(NodeIndex i) const { return nodes_[i]; }
  NodeIndex index_of(const std::string& label) const;  // throws UnknownLabel

  const std::vector<Hyperlink>& hyperlinks() const { return links_; }
  const Hyperlink& hyperlink(std::size_t a) const { return links_[a]; }
  bool contains(const Hyperlink& e) const { return link_set_.count(e) != 0; }

  // Number of hyperlinks each node belongs to.
  std::vector<std::size_t> degrees() const;

  // Sorts, checks cardinality >= 2 and indices < n. Throws
  // SingletonHyperlink / UnknownLabel.
  Hyperlink canonical_hyperlink(Hyperlink e) const;
  Hyperlink hyperlink_from_labels(const std::vector<std::string>& labels) const;

  // Sorted labels joined with '+'; the stable textual identity of a
  // hyperlink in output files.
  std::string hyperlink_key(const Hyperlink& e) const;

  // G with e appended (identity if already present).
  Hypergraph with_hyperlink(const Hyperlink& e) const;
  // G with e removed (identity if absent).
  Hypergraph without_hyperlink(const Hyperlink& e) const;

  bool operator==(const Hypergraph& o) const {
    return nodes_ == o.nodes_ && links_ == o.links_;
  }

 private:
  void rebuild_index();

  std::vector<std::string> nodes_;
  std::vector<Hyperlink> links_;
  std::unordered_map<std::string, NodeIndex> label_index_;
  std::unordered_set<Hyperlink, HyperlinkHash> link_set_;
};

// Symmetric sparse matrix with zero diagonal, CSR layout, entries stored as
// doubles (the counts are small integers). Column indices per row ascend.
struct SparseSymmetric {
  std::size_t dim = 0;
  std::vector<std::size_t> row_ptr;  // dim + 1
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  double at(std::size_t i, std::size_t j) const;
  DenseMatrix to_dense() const;
};

using NodeAdjacency = SparseSymmetric;
using IntersectionProfile = SparseSymmetric;

// A = S S^T - D: entry (i, j) counts hyperlinks containing both i and j.
NodeAdjacency adjacency(const Hypergraph& g);

// P = S^T S - Z: entry (a, b) is |e_a intersect e_b|.
IntersectionProfile intersection_profile(const Hypergraph& g);

// y = M x for the symmetric sparse matrix.
void spmv(const SparseSymmetric& m, const double* x, double* y);

}  // namespace looplink
