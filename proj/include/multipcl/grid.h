#pragma once

#include "multipcl/train.h"

namespace multipcl::harness {

struct GridRow {
  std::string subset;  // verbatim key, e.g. "V+T"
  fusion::Variant variant = fusion::Variant::mhca;
  EvalReport report;
};

/// One cross-validation run per (modality subset, fusion variant)
/// combination. Subset keys are kept verbatim in the output rows.
std::vector<GridRow> run_ablation_grid(const BundleCorpus& corpus,
                                       const ExperimentConfig& base,
                                       const std::vector<std::string>& subsets,
                                       const std::vector<fusion::Variant>& variants,
                                       int jobs = 1);

std::string report_record_json(const GridRow& row);
void write_report_jsonl(const std::vector<GridRow>& rows, const std::string& path);
std::vector<GridRow> load_report_jsonl(const std::string& path);

/// Plain-text table, columns P_p R_p F1_p F1_m Acc.
std::string render_table(const std::vector<GridRow>& rows);

}  // namespace multipcl::harness
