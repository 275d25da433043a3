#include "multipcl/agreement.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace multipcl::corpus {

std::vector<std::string> AnnotationMatrix::categories() const {
  std::set<std::string> cats;
  for (const auto& row : labels)
    for (const auto& l : row) cats.insert(l);
  return {cats.begin(), cats.end()};
}

void AnnotationMatrix::validate() const {
  if (labels.empty()) throw ValidationError("annotation matrix has no items");
  std::size_t r = labels[0].size();
  if (r < 2) throw ValidationError("annotation matrix needs at least 2 annotators");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() != r) {
      throw ValidationError("annotation row " + std::to_string(i + 1) +
                            " has inconsistent annotator count");
    }
    for (const auto& l : labels[i]) {
      if (l.empty()) {
        throw ValidationError("annotation row " + std::to_string(i + 1) + " has an empty label");
      }
    }
  }
}

double fleiss_kappa(const AnnotationMatrix& matrix) {
  matrix.validate();
  const auto cats = matrix.categories();
  std::map<std::string, std::size_t> cat_index;
  for (std::size_t k = 0; k < cats.size(); ++k) cat_index[cats[k]] = k;

  const double n_items = static_cast<double>(matrix.items());
  const double n_raters = static_cast<double>(matrix.annotators());

  std::vector<double> p_j(cats.size(), 0.0);
  double p_bar = 0.0;
  for (const auto& row : matrix.labels) {
    std::vector<double> counts(cats.size(), 0.0);
    for (const auto& l : row) counts[cat_index.at(l)] += 1.0;
    double agree = 0.0;
    for (std::size_t k = 0; k < cats.size(); ++k) {
      agree += counts[k] * (counts[k] - 1.0);
      p_j[k] += counts[k];
    }
    p_bar += agree / (n_raters * (n_raters - 1.0));
  }
  p_bar /= n_items;

  double p_e = 0.0;
  for (double c : p_j) {
    double frac = c / (n_items * n_raters);
    p_e += frac * frac;
  }
  if (p_e >= 1.0) {
    throw DomainError(
        "fleiss_kappa: degenerate agreement (every annotator always used one category)");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

AnnotationMatrix parse_annotation_table(const std::string& contents) {
  AnnotationMatrix m;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  char delim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (delim == 0) delim = line.find('\t') != std::string::npos ? '\t' : ',';
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, delim)) {
      // trim surrounding whitespace
      std::size_t b = cell.find_first_not_of(" \t");
      std::size_t e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (cells.size() < 3) {
      throw ParseError("annotation table line " + std::to_string(line_no) +
                       ": need an item id and at least 2 labels");
    }
    m.item_ids.push_back(cells[0]);
    m.labels.emplace_back(cells.begin() + 1, cells.end());
  }
  m.validate();
  return m;
}

AnnotationMatrix load_annotation_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open annotation table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_annotation_table(buf.str());
}

}  // namespace multipcl::corpus
