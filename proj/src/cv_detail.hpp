#pragma once

#include <cstdint>
#include <vector>

#include "looplink/errors.hpp"
#include "looplink/rng.hpp"

namespace looplink::detail {

// Stratified fold assignment: shuffle each class, deal round-robin. Every
// fold then holds both classes whenever each class has >= folds rows.
inline std::vector<int> stratified_folds(const std::vector<int>& labels, int folds,
                                         std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] > 0 ? pos : neg).push_back(i);
  }
  if (pos.size() < static_cast<std::size_t>(folds) ||
      neg.size() < static_cast<std::size_t>(folds)) {
    throw InsufficientData("cross-validation needs at least `folds` rows of each label");
  }
  Rng rng(seed);
  auto shuffle = [&rng](std::vector<std::size_t>& idx) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    }
  };
  shuffle(pos);
  shuffle(neg);
  std::vector<int> fold(labels.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) fold[pos[i]] = static_cast<int>(i % folds);
  for (std::size_t i = 0; i < neg.size(); ++i) fold[neg[i]] = static_cast<int>(i % folds);
  return fold;
}

}  // namespace looplink::detail
