#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "credulens/rng.hpp"

namespace credulens::learn {

// One balanced fold: all (or, in the final partial fold, a random subset of)
// minority members paired with an equal-size slice of the majority.
template <class Id>
struct BalancedFold {
  std::vector<Id> minority;
  std::vector<Id> majority;
};

// Under-sampling iteration: the majority set is consumed in disjoint
// equal-size slices, one fold per slice, until none remain. The leftover
// slice is paired with an equally sized random minority subset so its fold
// is balanced too.
template <class Id>
std::vector<BalancedFold<Id>> balanced_folds(const std::vector<Id>& minority_ids,
                                             const std::vector<Id>& majority_ids,
                                             std::uint64_t seed) {
  if (minority_ids.empty()) throw std::invalid_argument("balanced_folds: empty minority set");
  if (majority_ids.empty()) throw std::invalid_argument("balanced_folds: empty majority set");

  std::vector<Id> shuffled = majority_ids;
  Rng majority_rng = Rng::substream(seed, "balanced-folds-majority");
  majority_rng.shuffle(shuffled);

  const std::size_t m = minority_ids.size();
  std::vector<BalancedFold<Id>> folds;
  std::size_t offset = 0;
  while (offset + m <= shuffled.size()) {
    BalancedFold<Id> fold;
    fold.minority = minority_ids;
    fold.majority.assign(shuffled.begin() + offset, shuffled.begin() + offset + m);
    folds.push_back(std::move(fold));
    offset += m;
  }
  const std::size_t remainder = shuffled.size() - offset;
  if (remainder > 0) {
    BalancedFold<Id> fold;
    fold.majority.assign(shuffled.begin() + offset, shuffled.end());
    Rng minority_rng = Rng::substream(seed, "balanced-folds-minority");
    for (auto i : minority_rng.sample_without_replacement(m, remainder))
      fold.minority.push_back(minority_ids[i]);
    folds.push_back(std::move(fold));
  }
  return folds;
}

// Stratified k-fold test partitions: each class is shuffled once and dealt
// round-robin, so fold class counts differ by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                              int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_folds: k must be >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("stratified_folds: a class has fewer rows than k");
  Rng rng = Rng::substream(seed, "stratified-folds");
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].push_back(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].push_back(neg[i]);
  return folds;
}

}  // namespace credulens::learn
