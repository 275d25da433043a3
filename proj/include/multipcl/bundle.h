#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>

#include "multipcl/common.h"

namespace multipcl::ingest {

/// Row-major float32 matrix, the storage precision of the feature cache.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;  // rows * cols, row-major

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

  float& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool all_finite() const;
  bool row_is_zero(std::size_t r) const;

  static FeatureMatrix from_eigen(const Eigen::MatrixXd& m);
  Eigen::MatrixXd to_eigen() const;

  bool operator==(const FeatureMatrix& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

/// The four encoded feature sequences of one sample. Frames without a
/// detected face hold exact zero rows in `face`.
struct ModalityBundle {
  FeatureMatrix video;  // n x d_v
  FeatureMatrix face;   // n x d_f, zero rows where no face
  FeatureMatrix audio;  // l x d_a
  FeatureMatrix text;   // m x d_t
  std::set<Modality> present;

  FeatureMatrix& of(Modality m);
  const FeatureMatrix& of(Modality m) const;
  bool has(Modality m) const { return present.count(m) > 0; }
  void validate() const;
};

/// Binary feature-cache codec. Layout: magic "PCLF", one version byte, then
/// one section per present modality: tag byte ('V','F','A','T'), u32-le row
/// count, u32-le column count, row-major f32-le payload. Write is atomic
/// (temp file + rename). Round-trips are bit-exact at f32 precision.
void cache_bundle(const ModalityBundle& bundle, const std::string& path);
ModalityBundle load_cached(const std::string& path);

}  // namespace multipcl::ingest
