#pragma once

#include <Eigen/Dense>

#include "multipcl/media.h"

namespace multipcl::ingest {

struct MfccParams {
  int n_coeff = 13;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int n_mels = 26;
  double preemphasis = 0.97;
  double log_floor = 1e-10;  // silence guard inside the log
};

/// Frame count for a waveform of `n_samples` under the given windowing.
long mfcc_frame_count(std::size_t n_samples, double sample_rate, const MfccParams& params);

/// Mel-frequency cepstral coefficients: pre-emphasis, Hamming-windowed FFT,
/// triangular mel filterbank, log (floored), orthonormal DCT-II. One row per
/// hop, n_coeff columns.
Eigen::MatrixXd mfcc(const Waveform& wav, const MfccParams& params = {});

}  // namespace multipcl::ingest
