#include "multipcl/common.h"

#include <cmath>

namespace multipcl {

std::string modality_name(Modality m) {
  switch (m) {
    case Modality::video: return "video";
    case Modality::face: return "face";
    case Modality::audio: return "audio";
    case Modality::text: return "text";
  }
  throw ContractError("unknown modality tag");
}

char modality_code(Modality m) {
  switch (m) {
    case Modality::video: return 'V';
    case Modality::face: return 'F';
    case Modality::audio: return 'A';
    case Modality::text: return 'T';
  }
  throw ContractError("unknown modality tag");
}

Modality modality_from_code(char code) {
  switch (code) {
    case 'V': case 'v': return Modality::video;
    case 'F': case 'f': return Modality::face;
    case 'A': case 'a': return Modality::audio;
    case 'T': case 't': return Modality::text;
  }
  throw ConfigError(std::string("unknown modality code '") + code + "'");
}

Modality modality_from_name(const std::string& name) {
  if (name == "video") return Modality::video;
  if (name == "face") return Modality::face;
  if (name == "audio") return Modality::audio;
  if (name == "text") return Modality::text;
  if (name.size() == 1) return modality_from_code(name[0]);
  throw ConfigError("unknown modality name '" + name + "'");
}

namespace {

// splitmix64: tiny, fully specified, passes BigCrush as a stream mixer.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ContractError("Rng::below(0)");
  // rejection sampling to avoid modulo bias
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x > limit);
  return x % n;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

Rng Rng::fork(const std::string& tag) const { return fork(fnv1a(tag)); }

Rng Rng::fork(std::uint64_t tag) const {
  std::uint64_t s = state_;
  std::uint64_t a = splitmix64(s);
  s ^= tag * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(s);
  return Rng(a ^ (b + 0x165667b19e3779f9ULL + (a << 6) + (a >> 2)));
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;  // count non-continuation bytes
  }
  return n;
}

bool is_finite(double v) { return std::isfinite(v); }

}  // namespace multipcl
