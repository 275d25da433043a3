#include "multipcl/mfcc.h"

#include <cmath>
#include <complex>
#include <vector>

namespace multipcl::ingest {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey, in place.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * M_PI / static_cast<double>(len);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

long mfcc_frame_count(std::size_t n_samples, double sample_rate, const MfccParams& p) {
  auto win = static_cast<std::size_t>(std::lround(sample_rate * p.window_ms / 1000.0));
  auto hop = static_cast<std::size_t>(std::lround(sample_rate * p.hop_ms / 1000.0));
  if (win == 0 || hop == 0 || n_samples < win) return 0;
  return static_cast<long>((n_samples - win) / hop + 1);
}

Eigen::MatrixXd mfcc(const Waveform& wav, const MfccParams& p) {
  if (wav.sample_rate <= 0) throw DomainError("mfcc: sample rate must be positive");
  if (p.n_coeff <= 0 || p.n_coeff > p.n_mels) {
    throw DomainError("mfcc: need 0 < n_coeff <= n_mels");
  }
  const auto win = static_cast<std::size_t>(std::lround(wav.sample_rate * p.window_ms / 1000.0));
  const auto hop = static_cast<std::size_t>(std::lround(wav.sample_rate * p.hop_ms / 1000.0));
  if (win == 0 || hop == 0) throw DomainError("mfcc: window and hop must be at least one sample");
  if (wav.samples.size() < win) {
    throw DomainError("mfcc: waveform shorter than one window (" +
                      std::to_string(wav.samples.size()) + " < " + std::to_string(win) + ")");
  }
  const long n_frames = mfcc_frame_count(wav.samples.size(), wav.sample_rate, p);

  // pre-emphasis
  std::vector<double> x(wav.samples.size());
  x[0] = wav.samples[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    x[i] = wav.samples[i] - p.preemphasis * wav.samples[i - 1];
  }

  std::vector<double> window(win);
  for (std::size_t i = 0; i < win; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                       static_cast<double>(win - 1));
  }

  const std::size_t nfft = next_pow2(win);
  const std::size_t nbins = nfft / 2 + 1;

  // triangular mel filterbank over the power spectrum
  std::vector<double> mel_pts(p.n_mels + 2);
  double mlo = hz_to_mel(0.0), mhi = hz_to_mel(wav.sample_rate / 2.0);
  for (int m = 0; m < p.n_mels + 2; ++m) {
    mel_pts[m] = mel_to_hz(mlo + (mhi - mlo) * m / (p.n_mels + 1));
  }
  std::vector<long> bin(p.n_mels + 2);
  for (int m = 0; m < p.n_mels + 2; ++m) {
    bin[m] = static_cast<long>(std::floor((nfft + 1) * mel_pts[m] / wav.sample_rate));
  }
  Eigen::MatrixXd fbank = Eigen::MatrixXd::Zero(p.n_mels, static_cast<long>(nbins));
  for (int m = 1; m <= p.n_mels; ++m) {
    for (long k = bin[m - 1]; k < bin[m]; ++k) {
      if (bin[m] > bin[m - 1])
        fbank(m - 1, k) = static_cast<double>(k - bin[m - 1]) / (bin[m] - bin[m - 1]);
    }
    for (long k = bin[m]; k < bin[m + 1]; ++k) {
      if (bin[m + 1] > bin[m])
        fbank(m - 1, k) = static_cast<double>(bin[m + 1] - k) / (bin[m + 1] - bin[m]);
    }
  }

  Eigen::MatrixXd out(n_frames, p.n_coeff);
  std::vector<std::complex<double>> buf(nfft);
  Eigen::VectorXd power(static_cast<long>(nbins));
  for (long t = 0; t < n_frames; ++t) {
    const std::size_t off = static_cast<std::size_t>(t) * hop;
    for (std::size_t i = 0; i < nfft; ++i) {
      buf[i] = i < win ? std::complex<double>(x[off + i] * window[i], 0.0)
                       : std::complex<double>(0.0, 0.0);
    }
    fft(buf);
    for (std::size_t k = 0; k < nbins; ++k) {
      power[static_cast<long>(k)] = std::norm(buf[k]) / static_cast<double>(nfft);
    }
    Eigen::VectorXd mel = fbank * power;
    for (int m = 0; m < p.n_mels; ++m) {
      mel[m] = std::log(std::max(mel[m], p.log_floor));
    }
    for (int c = 0; c < p.n_coeff; ++c) {
      double acc = 0.0;
      for (int m = 0; m < p.n_mels; ++m) {
        acc += mel[m] * std::cos(M_PI * c * (2.0 * m + 1.0) / (2.0 * p.n_mels));
      }
      out(t, c) = acc * std::sqrt((c == 0 ? 1.0 : 2.0) / p.n_mels);
    }
  }
  return out;
}

}  // namespace multipcl::ingest
