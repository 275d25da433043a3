#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace multipcl {

// Error taxonomy shared by all modules. Each maps to a distinct CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class ContractError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class IngestError : public Error {
 public:
  using Error::Error;
};
class CacheError : public Error {
 public:
  using Error::Error;
};
class TrainingError : public Error {
 public:
  using Error::Error;
};

enum class Modality : std::uint8_t { video = 0, face = 1, audio = 2, text = 3 };

inline constexpr Modality kAllModalities[] = {Modality::video, Modality::face,
                                              Modality::audio, Modality::text};

std::string modality_name(Modality m);
// Single-letter codes used in experiment subsets: V, F, A, T.
char modality_code(Modality m);
Modality modality_from_code(char code);
Modality modality_from_name(const std::string& name);

/// Deterministic random stream. All randomness in the project flows from a
/// single seed fanned out via fork(); the generator is fully specified here
/// so results are reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n), unbiased. n must be > 0.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

  /// Derive an independent child stream from this seed and a tag.
  Rng fork(const std::string& tag) const;
  Rng fork(std::uint64_t tag) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Number of Unicode code points in a UTF-8 string (invalid bytes count as
/// one code point each).
std::size_t utf8_length(const std::string& s);

bool is_finite(double v);

}  // namespace multipcl
