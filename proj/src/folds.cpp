#include "multipcl/folds.h"

#include <algorithm>
#include <map>

namespace multipcl::corpus {

std::vector<FoldSplit> make_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw DomainError("make_folds: k must be >= 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, idxs] : by_class) {
    if (idxs.size() < static_cast<std::size_t>(k)) {
      throw DomainError("make_folds: class " + std::to_string(cls) + " has " +
                        std::to_string(idxs.size()) + " members, fewer than k=" +
                        std::to_string(k));
    }
  }
  Rng rng = Rng(seed).fork("folds");
  std::vector<std::vector<std::size_t>> test(k);
  for (auto& [cls, idxs] : by_class) {
    Rng crng = rng.fork(static_cast<std::uint64_t>(cls));
    crng.shuffle(idxs);
    // split into k nearly equal chunks; the remainder goes to the lowest folds
    std::size_t base = idxs.size() / k, rem = idxs.size() % k;
    std::size_t pos = 0;
    for (int f = 0; f < k; ++f) {
      std::size_t take = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
      for (std::size_t c = 0; c < take; ++c) test[f].push_back(idxs[pos++]);
    }
  }
  std::vector<FoldSplit> folds(k);
  for (int f = 0; f < k; ++f) {
    std::sort(test[f].begin(), test[f].end());
    folds[f].test = test[f];
    for (int g = 0; g < k; ++g) {
      if (g == f) continue;
      folds[f].train.insert(folds[f].train.end(), test[g].begin(), test[g].end());
    }
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

std::vector<FoldSplit> make_folds(const std::vector<ManifestEntry>& entries, int k,
                                  std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(entries.size());
  for (const auto& e : entries) labels.push_back(e.label);
  return make_folds(labels, k, seed);
}

}  // namespace multipcl::corpus
