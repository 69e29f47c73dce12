#pragma once

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "looplink/hypergraph.hpp"
#include "looplink/rng.hpp"

namespace testutil {

inline looplink::Hypergraph triangle() {
  return looplink::Hypergraph::build({}, {{"v1", "v2"}, {"v1", "v3"}, {"v2", "v3"}});
}

inline looplink::Hypergraph single3() {
  return looplink::Hypergraph::build({}, {{"v1", "v2", "v3"}});
}

inline looplink::Hypergraph path3() {
  return looplink::Hypergraph::build({}, {{"a", "b"}, {"b", "c"}});
}

// n-node cycle out of 2-node hyperlinks.
inline looplink::Hypergraph ring(int n) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%02d", i);
    labels.push_back(buf);
  }
  std::vector<std::vector<std::string>> links;
  for (int i = 0; i < n; ++i) links.push_back({labels[i], labels[(i + 1) % n]});
  return looplink::Hypergraph::build(labels, links);
}

// Random hypergraph with n nodes and m distinct hyperlinks of cardinality
// 2..max_card. Labels are fixed-width so index order equals label order.
inline looplink::Hypergraph random_hypergraph(looplink::Rng& rng, int n, int m,
                                              int max_card) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%02d", i);
    labels.push_back(buf);
  }
  std::set<std::vector<std::string>> links;
  const int card_cap = std::min(max_card, n);
  int guard = 0;
  while (static_cast<int>(links.size()) < m && ++guard < 10000) {
    const std::size_t k = 2 + looplink::uniform_index(
                                  rng, static_cast<std::size_t>(card_cap - 1));
    std::set<std::string> pick;
    while (pick.size() < k) {
      pick.insert(labels[looplink::uniform_index(rng, labels.size())]);
    }
    links.insert(std::vector<std::string>(pick.begin(), pick.end()));
  }
  return looplink::Hypergraph::build(
      labels, std::vector<std::vector<std::string>>(links.begin(), links.end()));
}

}  // namespace testutil
