#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "multipcl/grid.h"
#include "support/synthetic.h"

using namespace multipcl;
using namespace multipcl::harness;

namespace {

ExperimentConfig quick_config() {
  ExperimentConfig c;
  c.model_dim = 8;
  c.heads = 2;
  c.epochs = 2;
  c.batch_size = 10;
  c.folds = 2;
  c.top_m = 1;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("a grid over V, T, V+T emits three rows with verbatim keys") {
  auto corpus = testing::make_xor_corpus(20, 41);
  auto rows = run_ablation_grid(corpus, quick_config(), {"V", "T", "V+T"},
                                {fusion::Variant::mhca});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].subset == "V");
  CHECK(rows[1].subset == "T");
  CHECK(rows[2].subset == "V+T");
}

TEST_CASE("mhca and fc variants on the same seed differ only in the variant field") {
  auto corpus = testing::make_xor_corpus(20, 43);
  auto rows = run_ablation_grid(corpus, quick_config(), {"V+T"},
                                {fusion::Variant::mhca, fusion::Variant::fc});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].subset == rows[1].subset);
  CHECK(rows[0].variant == fusion::Variant::mhca);
  CHECK(rows[1].variant == fusion::Variant::fc);
}

TEST_CASE("report records round-trip through jsonl and render in column order") {
  auto corpus = testing::make_xor_corpus(20, 47);
  auto rows = run_ablation_grid(corpus, quick_config(), {"V+T"}, {fusion::Variant::mhca});
  auto path = (std::filesystem::temp_directory_path() / "multipcl_report.jsonl").string();
  write_report_jsonl(rows, path);
  auto back = load_report_jsonl(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].subset == "V+T");
  CHECK(back[0].report.f1_pos == rows[0].report.f1_pos);
  CHECK(back[0].report.per_fold.size() == rows[0].report.per_fold.size());

  std::string record = report_record_json(rows[0]);
  for (const char* field : {"subset", "variant", "P_p", "R_p", "F1_p", "F1_macro", "Acc",
                            "per_fold"}) {
    CHECK(record.find(field) != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("two grid runs with the same seed produce byte-identical records") {
  auto corpus = testing::make_xor_corpus(20, 53);
  auto a = run_ablation_grid(corpus, quick_config(), {"V", "V+T"}, {fusion::Variant::mhca});
  auto b = run_ablation_grid(corpus, quick_config(), {"V", "V+T"}, {fusion::Variant::mhca});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(report_record_json(a[i]) == report_record_json(b[i]));
  }
}

TEST_CASE("empty subset or variant lists are config errors") {
  auto corpus = testing::make_xor_corpus(20, 59);
  CHECK_THROWS_AS(run_ablation_grid(corpus, quick_config(), {}, {fusion::Variant::mhca}),
                  ConfigError);
  CHECK_THROWS_AS(run_ablation_grid(corpus, quick_config(), {"V"}, {}), ConfigError);
  CHECK_THROWS_AS(run_ablation_grid(corpus, quick_config(), {"V+V"},
                                    {fusion::Variant::mhca}),
                  ConfigError);
}
