#include "multipcl/grid.h"

#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

namespace multipcl::harness {

std::vector<GridRow> run_ablation_grid(const BundleCorpus& corpus, const ExperimentConfig& base,
                                       const std::vector<std::string>& subsets,
                                       const std::vector<fusion::Variant>& variants, int jobs) {
  if (subsets.empty()) throw ConfigError("run_ablation_grid: no subsets requested");
  if (variants.empty()) throw ConfigError("run_ablation_grid: no variants requested");
  std::vector<GridRow> rows;
  for (const std::string& key : subsets) {
    ExperimentConfig config = base.with_subset(parse_subset(key));
    for (fusion::Variant v : variants) {
      config.variant = v;
      GridRow row;
      row.subset = key;
      row.variant = v;
      row.report = cross_validate(config, corpus, jobs);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

nlohmann::ordered_json metrics_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["P_p"] = r.precision_pos;
  j["R_p"] = r.recall_pos;
  j["F1_p"] = r.f1_pos;
  j["F1_macro"] = r.f1_macro;
  j["Acc"] = r.accuracy;
  j["confusion"] = {{"tp", r.confusion.tp},
                    {"fp", r.confusion.fp},
                    {"fn", r.confusion.fn},
                    {"tn", r.confusion.tn}};
  return j;
}

EvalReport metrics_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.precision_pos = j.at("P_p").get<double>();
  r.recall_pos = j.at("R_p").get<double>();
  r.f1_pos = j.at("F1_p").get<double>();
  r.f1_macro = j.at("F1_macro").get<double>();
  r.accuracy = j.at("Acc").get<double>();
  const auto& c = j.at("confusion");
  r.confusion = {c.at("tp").get<long>(), c.at("fp").get<long>(), c.at("fn").get<long>(),
                 c.at("tn").get<long>()};
  return r;
}

}  // namespace

std::string report_record_json(const GridRow& row) {
  nlohmann::ordered_json j;
  j["subset"] = row.subset;
  j["variant"] = fusion::variant_name(row.variant);
  nlohmann::ordered_json m = metrics_json(row.report);
  for (auto it = m.begin(); it != m.end(); ++it) j[it.key()] = it.value();
  auto folds = nlohmann::ordered_json::array();
  for (const EvalReport& f : row.report.per_fold) folds.push_back(metrics_json(f));
  j["per_fold"] = folds;
  return j.dump();
}

void write_report_jsonl(const std::vector<GridRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError("cannot open report file '" + path + "' for writing");
  for (const GridRow& row : rows) out << report_record_json(row) << "\n";
}

std::vector<GridRow> load_report_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open report file '" + path + "'");
  std::vector<GridRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    GridRow row;
    row.subset = j.at("subset").get<std::string>();
    row.variant = fusion::variant_from_name(j.at("variant").get<std::string>());
    row.report = metrics_from_json(j);
    if (j.contains("per_fold")) {
      for (const auto& f : j.at("per_fold")) row.report.per_fold.push_back(metrics_from_json(f));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_table(const std::vector<GridRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "Subset" << std::setw(9) << "Variant" << std::right
     << std::setw(8) << "P_p" << std::setw(8) << "R_p" << std::setw(8) << "F1_p" << std::setw(8)
     << "F1_m" << std::setw(8) << "Acc" << "\n";
  os << std::string(61, '-') << "\n";
  os << std::fixed << std::setprecision(2);
  for (const GridRow& row : rows) {
    os << std::left << std::setw(12) << row.subset << std::setw(9)
       << fusion::variant_name(row.variant) << std::right << std::setw(8)
       << row.report.precision_pos << std::setw(8) << row.report.recall_pos << std::setw(8)
       << row.report.f1_pos << std::setw(8) << row.report.f1_macro << std::setw(8)
       << row.report.accuracy << "\n";
  }
  return os.str();
}

}  // namespace multipcl::harness
