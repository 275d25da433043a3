// Command-line entry point wiring corpus, ingest, fusion, and harness into
// reproducible workflows. Every run is deterministic given --seed.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>

#include "multipcl/agreement.h"
#include "multipcl/checkpoint.h"
#include "multipcl/folds.h"
#include "multipcl/grid.h"
#include "multipcl/loss.h"
#include "multipcl/pipeline.h"
#include "multipcl/stats.h"
#include "multipcl/train.h"

namespace fs = std::filesystem;
using namespace multipcl;

namespace {

// Exit codes: 0 ok, 2 usage, 3 config, 4 input/parse, 5 validation,
// 6 runtime/training, 10 unexpected.
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInput = 4;
constexpr int kExitValidation = 5;
constexpr int kExitRuntime = 6;
constexpr int kExitInternal = 10;

struct GlobalOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  std::string out_dir;
  std::vector<std::string> overrides;
};

harness::ExperimentConfig build_config(const GlobalOptions& g) {
  harness::ExperimentConfig config;
  if (!g.config_path.empty()) config = harness::load_experiment_config(g.config_path);
  for (const std::string& kv : g.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    harness::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed_given) config.seed = g.seed;
  config.validate();
  return config;
}

void ensure_out_dir(const std::string& out) {
  if (out.empty()) throw ConfigError("this subcommand needs --out DIR");
  fs::create_directories(out);
}

std::string cache_path(const std::string& dir, const std::string& id) {
  return (fs::path(dir) / (id + ".pclf")).string();
}

harness::BundleCorpus load_corpus(const std::vector<corpus::ManifestEntry>& entries,
                                  const std::string& cache_dir) {
  harness::BundleCorpus corpus;
  corpus.reserve(entries.size());
  for (const auto& e : entries) {
    harness::LabeledBundle s;
    s.id = e.id;
    s.label = e.label;
    s.bundle = ingest::load_cached(cache_path(cache_dir, e.id));
    corpus.push_back(std::move(s));
  }
  return corpus;
}

int cmd_validate(const std::string& manifest_path) {
  auto entries = corpus::load_manifest(manifest_path);
  std::size_t with_spans = 0, pcl = 0;
  for (const auto& e : entries) {
    if (e.label == 1) ++pcl;
    if (!e.spans.empty()) ++with_spans;
  }
  std::cout << "ok: " << entries.size() << " entries (" << pcl << " PCL, " << with_spans
            << " with spans), all invariants hold\n";
  return 0;
}

int cmd_stats(const std::string& manifest_path, const GlobalOptions& g, bool as_json) {
  auto entries = corpus::load_manifest(manifest_path);
  auto stats = corpus::compute_stats(entries);
  if (as_json) {
    std::cout << corpus::stats_to_json(stats) << "\n";
  } else {
    std::cout << corpus::render_stats(stats);
  }
  if (!g.out_dir.empty()) {
    ensure_out_dir(g.out_dir);
    std::ofstream out(fs::path(g.out_dir) / "stats.json");
    out << corpus::stats_to_json(stats) << "\n";
  }
  return 0;
}

int cmd_kappa(const std::string& table_path) {
  auto matrix = corpus::load_annotation_table(table_path);
  double kappa = corpus::fleiss_kappa(matrix);
  std::cout << "items: " << matrix.items() << "  annotators: " << matrix.annotators()
            << "  categories: " << matrix.categories().size() << "\n";
  std::cout.setf(std::ios::fixed);
  std::cout.precision(4);
  std::cout << "fleiss_kappa: " << kappa << "\n";
  return 0;
}

std::set<Modality> subset_to_set(const std::vector<Modality>& mods) {
  return {mods.begin(), mods.end()};
}

int cmd_ingest(const std::string& manifest_path, const std::string& media_root,
               const GlobalOptions& g, const harness::ExperimentConfig& config,
               double target_fps, std::size_t max_frames, const std::string& detector_name) {
  ensure_out_dir(g.out_dir);
  auto entries = corpus::load_manifest(manifest_path);

  std::unique_ptr<ingest::FaceDetector> detector;
  if (detector_name == "none") detector = std::make_unique<ingest::NullFaceDetector>();
  else if (detector_name == "fullframe") detector = std::make_unique<ingest::FullFrameFaceDetector>();
  else throw ConfigError("unknown detector '" + detector_name + "' (none|fullframe)");

  ingest::EncoderSet encoders = ingest::EncoderSet::toy_defaults();
  ingest::FrameSamplingParams sampling{target_fps, max_frames};
  const std::set<Modality> request = subset_to_set(config.modalities);

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0}, done{0};
  std::vector<std::string> errors;
  auto worker = [&]() {
    auto reader = ingest::make_media_reader();
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= entries.size()) break;
      try {
        ingest::ModalityBundle bundle = ingest::ingest_entry(
            entries[i], *reader, *detector, encoders, request, sampling, media_root);
        ingest::cache_bundle(bundle, cache_path(g.out_dir, entries[i].id));
        ++done;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(log_mutex);
        errors.push_back(e.what());
      }
    }
  };
  const int jobs = std::max(1, g.jobs);
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "ingest error: " << e << "\n";
    throw IngestError(std::to_string(errors.size()) + " of " + std::to_string(entries.size()) +
                      " entries failed to ingest");
  }
  std::cout << "cached " << done.load() << " bundles under " << g.out_dir << "\n";
  return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& cache_dir,
              const GlobalOptions& g, const harness::ExperimentConfig& config) {
  ensure_out_dir(g.out_dir);
  auto entries = corpus::load_manifest(manifest_path);
  auto corpus_data = load_corpus(entries, cache_dir);
  harness::TrainResult result =
      harness::train_one(config, corpus_data, &corpus_data, Rng(config.seed).fork("train"));

  const std::string ckpt = (fs::path(g.out_dir) / "model.pclm").string();
  fusion::save_checkpoint(result.model, ckpt);
  std::ofstream trace(fs::path(g.out_dir) / "trace.jsonl");
  for (const auto& t : result.trace) {
    nlohmann::ordered_json j;
    j["epoch"] = t.epoch;
    j["train_loss"] = t.train_loss;
    j["F1_p"] = t.eval.f1_pos;
    j["F1_macro"] = t.eval.f1_macro;
    j["Acc"] = t.eval.accuracy;
    trace << j.dump() << "\n";
  }
  std::cout << "checkpoint: " << ckpt << "\n";
  std::cout << "final train F1_p: " << result.trace.back().eval.f1_pos << "\n";
  return 0;
}

int cmd_eval(const std::string& manifest_path, const std::string& cache_dir,
             const GlobalOptions& g, const harness::ExperimentConfig& config) {
  ensure_out_dir(g.out_dir);
  auto entries = corpus::load_manifest(manifest_path);
  auto corpus_data = load_corpus(entries, cache_dir);
  harness::GridRow row;
  row.subset = harness::subset_key(config.modalities);
  row.variant = config.variant;
  row.report = harness::cross_validate(config, corpus_data, g.jobs);
  std::vector<harness::GridRow> rows{row};
  harness::write_report_jsonl(rows, (fs::path(g.out_dir) / "report.jsonl").string());
  std::ofstream table(fs::path(g.out_dir) / "report.txt");
  table << harness::render_table(rows);
  std::cout << harness::render_table(rows);
  return 0;
}

int cmd_grid(const std::string& manifest_path, const std::string& cache_dir,
             const GlobalOptions& g, const harness::ExperimentConfig& config,
             const std::string& subset_list, std::vector<std::string> variant_names) {
  ensure_out_dir(g.out_dir);
  auto entries = corpus::load_manifest(manifest_path);
  auto corpus_data = load_corpus(entries, cache_dir);

  std::vector<std::string> subsets;
  std::stringstream ss(subset_list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) subsets.push_back(token);
  }
  if (variant_names.empty()) variant_names.push_back("mhca");
  std::vector<fusion::Variant> variants;
  for (const auto& v : variant_names) variants.push_back(fusion::variant_from_name(v));

  auto rows = harness::run_ablation_grid(corpus_data, config, subsets, variants, g.jobs);
  harness::write_report_jsonl(rows, (fs::path(g.out_dir) / "report.jsonl").string());
  std::ofstream table(fs::path(g.out_dir) / "report.txt");
  table << harness::render_table(rows);
  std::cout << harness::render_table(rows);
  return 0;
}

int cmd_predict(const std::string& checkpoint_path, const std::string& manifest_path,
                const std::string& cache_dir, const GlobalOptions& g,
                const harness::ExperimentConfig& config) {
  ensure_out_dir(g.out_dir);
  fusion::FusionModel model = fusion::load_checkpoint(checkpoint_path);
  auto entries = corpus::load_manifest(manifest_path);
  auto corpus_data = load_corpus(entries, cache_dir);

  std::ofstream out(fs::path(g.out_dir) / "predictions.jsonl");
  for (const auto& s : corpus_data) {
    fusion::FusionOutput fo = model.variant == fusion::Variant::mhca
                                  ? fusion::fuse(s.bundle, model)
                                  : fusion::fc_fusion_baseline(s.bundle, model);
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["probability"] = fo.probability;
    j["predicted"] = fo.probability >= config.threshold ? 1 : 0;
    j["label"] = s.label;
    out << j.dump() << "\n";
  }
  std::cout << "wrote predictions for " << corpus_data.size() << " videos\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multimodal patronizing-language detection toolkit"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "experiment config file (key = value lines)");
  auto* seed_opt = app.add_option("--seed", g.seed, "master random seed");
  app.add_option("--jobs", g.jobs, "worker threads for ingest and folds");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--set", g.overrides, "config override key=value (repeatable)");

  std::string manifest_path, table_path, media_root, cache_dir, checkpoint_path;
  std::string subset_list = "V+F+A+T";
  std::vector<std::string> variant_names;
  std::string detector_name = "fullframe";
  double target_fps = 1.0;
  std::size_t max_frames = 256;
  bool stats_json = false;

  auto* validate = app.add_subcommand("validate", "check manifest invariants");
  validate->add_option("--manifest", manifest_path, "manifest file")->required();

  auto* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("--manifest", manifest_path, "manifest file")->required();
  stats->add_flag("--json", stats_json, "print JSON instead of the table");

  auto* kappa = app.add_subcommand("kappa", "inter-annotator agreement");
  kappa->add_option("--table", table_path, "annotation table (csv/tsv)")->required();

  auto* ingest_cmd = app.add_subcommand("ingest", "encode per-video feature caches");
  ingest_cmd->add_option("--manifest", manifest_path, "manifest file")->required();
  ingest_cmd->add_option("--media-root", media_root, "directory video_path is relative to");
  ingest_cmd->add_option("--fps", target_fps, "frame sampling rate");
  ingest_cmd->add_option("--max-frames", max_frames, "frame budget per video");
  ingest_cmd->add_option("--detector", detector_name, "face detector: none|fullframe");

  auto* train = app.add_subcommand("train", "train one model on the full corpus");
  train->add_option("--manifest", manifest_path, "manifest file")->required();
  train->add_option("--cache-dir", cache_dir, "feature cache directory")->required();

  auto* eval = app.add_subcommand("eval", "cross-validated evaluation");
  eval->add_option("--manifest", manifest_path, "manifest file")->required();
  eval->add_option("--cache-dir", cache_dir, "feature cache directory")->required();

  auto* grid = app.add_subcommand("grid", "modality-subset x fusion-variant ablation grid");
  grid->add_option("--manifest", manifest_path, "manifest file")->required();
  grid->add_option("--cache-dir", cache_dir, "feature cache directory")->required();
  grid->add_option("--subset", subset_list, "comma list of subsets, e.g. V,T,V+T");
  grid->add_option("--variant", variant_names, "fusion variant: mhca|fc (repeatable)");

  auto* predict = app.add_subcommand("predict", "per-video labels from a checkpoint");
  predict->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
  predict->add_option("--manifest", manifest_path, "manifest file")->required();
  predict->add_option("--cache-dir", cache_dir, "feature cache directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  g.seed_given = seed_opt->count() > 0;

  try {
    if (validate->parsed()) return cmd_validate(manifest_path);
    if (stats->parsed()) return cmd_stats(manifest_path, g, stats_json);
    if (kappa->parsed()) return cmd_kappa(table_path);
    harness::ExperimentConfig config = build_config(g);
    if (ingest_cmd->parsed()) {
      return cmd_ingest(manifest_path, media_root, g, config, target_fps, max_frames,
                        detector_name);
    }
    if (train->parsed()) return cmd_train(manifest_path, cache_dir, g, config);
    if (eval->parsed()) return cmd_eval(manifest_path, cache_dir, g, config);
    if (grid->parsed()) {
      return cmd_grid(manifest_path, cache_dir, g, config, subset_list, variant_names);
    }
    if (predict->parsed()) {
      return cmd_predict(checkpoint_path, manifest_path, cache_dir, g, config);
    }
    std::cerr << "usage: no subcommand given\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CacheError& e) {
    std::cerr << "cache error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IngestError& e) {
    std::cerr << "ingest error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const ContractError& e) {
    std::cerr << "contract error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
