#pragma once

#include <string>
#include <vector>

#include "multipcl/common.h"

namespace multipcl::corpus {

/// N items rated by R annotators with categorical labels. Categories are the
/// distinct labels observed anywhere in the matrix.
struct AnnotationMatrix {
  std::vector<std::string> item_ids;                // size N (may be empty ids)
  std::vector<std::vector<std::string>> labels;     // N rows x R columns

  std::size_t items() const { return labels.size(); }
  std::size_t annotators() const { return labels.empty() ? 0 : labels[0].size(); }
  std::vector<std::string> categories() const;
  void validate() const;
};

/// Fleiss' kappa: chance-corrected agreement over R annotators and K
/// categories, kappa = (Pbar - Pe) / (1 - Pe). Throws DomainError when
/// Pe == 1 (every annotator always used one category, no agreement signal).
double fleiss_kappa(const AnnotationMatrix& matrix);

/// Reads a delimited table: first column item id, remaining columns one label
/// per annotator. Tab-delimited when the first line contains a tab, otherwise
/// comma-delimited.
AnnotationMatrix load_annotation_table(const std::string& path);
AnnotationMatrix parse_annotation_table(const std::string& contents);

}  // namespace multipcl::corpus
