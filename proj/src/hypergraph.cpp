#include "looplink/hypergraph.hpp"

#include <algorithm>
#include <map>

#include "looplink/errors.hpp"

namespace looplink {

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += '+';
    out += labels[i];
  }
  return out;
}

}  // namespace

void Hypergraph::rebuild_index() {
  label_index_.clear();
  label_index_.reserve(nodes_.size());
  for (NodeIndex i = 0; i < nodes_.size(); ++i) label_index_.emplace(nodes_[i], i);
  link_set_.clear();
  link_set_.reserve(links_.size());
  for (const auto& e : links_) link_set_.insert(e);
}

Hypergraph Hypergraph::build(std::vector<std::string> node_labels,
                             const std::vector<std::vector<std::string>>& hyperlinks) {
  if (node_labels.empty()) {
    for (const auto& link : hyperlinks) {
      for (const auto& label : link) node_labels.push_back(label);
    }
  }
  std::sort(node_labels.begin(), node_labels.end());
  node_labels.erase(std::unique(node_labels.begin(), node_labels.end()),
                    node_labels.end());

  Hypergraph g;
  g.nodes_ = std::move(node_labels);
  for (NodeIndex i = 0; i < g.nodes_.size(); ++i) g.label_index_.emplace(g.nodes_[i], i);

  g.links_.reserve(hyperlinks.size());
  for (const auto& labels : hyperlinks) {
    Hyperlink e;
    e.reserve(labels.size());
    for (const auto& label : labels) {
      auto it = g.label_index_.find(label);
      if (it == g.label_index_.end()) {
        throw UnknownLabel("unknown node label '" + label + "'");
      }
      e.push_back(it->second);
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    if (e.size() < 2) {
      throw SingletonHyperlink("hyperlink '" + join_labels(labels) +
                               "' has fewer than 2 distinct nodes");
    }
    if (g.link_set_.count(e)) {
      throw DuplicateHyperlink("duplicate hyperlink '" + g.hyperlink_key(e) + "'");
    }
    g.link_set_.insert(e);
    g.links_.push_back(std::move(e));
  }
  return g;
}

Hypergraph Hypergraph::from_indexed(std::vector<std::string> node_labels,
                                    const std::vector<Hyperlink>& hyperlinks) {
  if (!std::is_sorted(node_labels.begin(), node_labels.end())) {
    throw Error("from_indexed requires lexicographically sorted node labels");
  }
  Hypergraph g;
  g.nodes_ = std::move(node_labels);
  for (NodeIndex i = 0; i < g.nodes_.size(); ++i) g.label_index_.emplace(g.nodes_[i], i);
  g.links_.reserve(hyperlinks.size());
  for (const auto& raw : hyperlinks) {
    Hyperlink e = g.canonical_hyperlink(raw);
    if (g.link_set_.count(e)) {
      throw DuplicateHyperlink("duplicate hyperlink '" + g.hyperlink_key(e) + "'");
    }
    g.link_set_.insert(e);
    g.links_.push_back(std::move(e));
  }
  return g;
}

NodeIndex Hypergraph::index_of(const std::string& label) const {
  auto it = label_index_.find(label);
  if (it == label_index_.end()) {
    throw UnknownLabel("unknown node label '" + label + "'");
  }
  return it->second;
}

std::vector<std::size_t> Hypergraph::degrees() const {
  std::vector<std::size_t> deg(nodes_.size(), 0);
  for (const auto& e : links_) {
    for (NodeIndex v : e) ++deg[v];
  }
  return deg;
}

Hyperlink Hypergraph::canonical_hyperlink(Hyperlink e) const {
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  if (e.size() < 2) {
    throw SingletonHyperlink("hyperlink has fewer than 2 distinct nodes");
  }
  if (!e.empty() && e.back() >= nodes_.size()) {
    throw UnknownLabel("node index " + std::to_string(e.back()) + " out of range (n=" +
                       std::to_string(nodes_.size()) + ")");
  }
  return e;
}

Hyperlink Hypergraph::hyperlink_from_labels(const std::vector<std::string>& labels) const {
  Hyperlink e;
  e.reserve(labels.size());
  for (const auto& label : labels) e.push_back(index_of(label));
  return canonical_hyperlink(std::move(e));
}

std::string Hypergraph::hyperlink_key(const Hyperlink& e) const {
  std::vector<std::string> labels;
  labels.reserve(e.size());
  for (NodeIndex v : e) labels.push_back(nodes_[v]);
  std::sort(labels.begin(), labels.end());
  return join_labels(labels);
}

Hypergraph Hypergraph::with_hyperlink(const Hyperlink& raw) const {
  Hyperlink e = canonical_hyperlink(raw);
  if (link_set_.count(e)) return *this;
  Hypergraph g;
  g.nodes_ = nodes_;
  g.links_ = links_;
  g.links_.push_back(std::move(e));
  g.rebuild_index();
  return g;
}

Hypergraph Hypergraph::without_hyperlink(const Hyperlink& raw) const {
  Hyperlink e = canonical_hyperlink(raw);
  if (!link_set_.count(e)) return *this;
  Hypergraph g;
  g.nodes_ = nodes_;
  g.links_.reserve(links_.size() - 1);
  for (const auto& link : links_) {
    if (link != e) g.links_.push_back(link);
  }
  g.rebuild_index();
  return g;
}

double SparseSymmetric::at(std::size_t i, std::size_t j) const {
  const auto begin = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto end = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(j));
  if (it == end || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

DenseMatrix SparseSymmetric::to_dense() const {
  DenseMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      m.at(i, col[k]) = val[k];
    }
  }
  return m;
}

namespace {

// Assembles CSR from per-row ordered count maps.
SparseSymmetric from_row_maps(std::vector<std::map<std::uint32_t, double>> rows) {
  SparseSymmetric s;
  s.dim = rows.size();
  s.row_ptr.resize(s.dim + 1, 0);
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    nnz += rows[i].size();
    s.row_ptr[i + 1] = nnz;
  }
  s.col.reserve(nnz);
  s.val.reserve(nnz);
  for (auto& row : rows) {
    for (const auto& [j, v] : row) {
      s.col.push_back(j);
      s.val.push_back(v);
    }
  }
  return s;
}

}  // namespace

NodeAdjacency adjacency(const Hypergraph& g) {
  std::vector<std::map<std::uint32_t, double>> rows(g.node_count());
  for (const auto& e : g.hyperlinks()) {
    for (std::size_t p = 0; p < e.size(); ++p) {
      for (std::size_t q = p + 1; q < e.size(); ++q) {
        rows[e[p]][e[q]] += 1.0;
        rows[e[q]][e[p]] += 1.0;
      }
    }
  }
  return from_row_maps(std::move(rows));
}

IntersectionProfile intersection_profile(const Hypergraph& g) {
  // Links incident to each node; every co-incidence contributes one shared
  // node to the pair's intersection.
  std::vector<std::vector<std::uint32_t>> incident(g.node_count());
  for (std::uint32_t a = 0; a < g.hyperlink_count(); ++a) {
    for (NodeIndex v : g.hyperlink(a)) incident[v].push_back(a);
  }
  std::vector<std::map<std::uint32_t, double>> rows(g.hyperlink_count());
  for (const auto& links : incident) {
    for (std::size_t p = 0; p < links.size(); ++p) {
      for (std::size_t q = p + 1; q < links.size(); ++q) {
        rows[links[p]][links[q]] += 1.0;
        rows[links[q]][links[p]] += 1.0;
      }
    }
  }
  return from_row_maps(std::move(rows));
}

void spmv(const SparseSymmetric& m, const double* x, double* y) {
  for (std::size_t i = 0; i < m.dim; ++i) {
    double acc = 0.0;
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      acc += m.val[k] * x[m.col[k]];
    }
    y[i] = acc;
  }
}

}  // namespace looplink
