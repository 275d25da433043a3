#pragma once

#include <cstdint>
#include <vector>

#include "multipcl/manifest.h"

namespace multipcl::corpus {

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified k-fold partition over binary labels: test folds are disjoint,
/// cover every index, and match the corpus class ratio within one item per
/// class. Deterministic for a fixed seed.
std::vector<FoldSplit> make_folds(const std::vector<int>& labels, int k, std::uint64_t seed);

std::vector<FoldSplit> make_folds(const std::vector<ManifestEntry>& entries, int k,
                                  std::uint64_t seed);

}  // namespace multipcl::corpus
