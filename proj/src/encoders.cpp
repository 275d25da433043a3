#include "multipcl/encoders.h"

namespace multipcl::ingest {

Eigen::VectorXd ChannelMeanEncoder::encode_frame(const Image& frame) const {
  if (frame.channels <= 0 || frame.data.empty()) {
    throw ContractError("ChannelMeanEncoder: empty frame");
  }
  Eigen::VectorXd means = Eigen::VectorXd::Zero(frame.channels);
  const std::size_t pixels = frame.data.size() / frame.channels;
  for (std::size_t i = 0; i < frame.data.size(); ++i) {
    means[static_cast<long>(i % frame.channels)] += frame.data[i];
  }
  means /= 255.0 * static_cast<double>(pixels);
  Eigen::VectorXd row(dim_);
  for (long k = 0; k < dim_; ++k) row[k] = means[k % frame.channels];
  return row;
}

Eigen::MatrixXd MfccEncoder::encode_audio(const Waveform& wav) const {
  return mfcc(resample(wav, target_rate_), params_);
}

namespace {

std::uint64_t fnv1a_u64(std::uint32_t cp) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int i = 0; i < 4; ++i) {
    h ^= (cp >> (8 * i)) & 0xFF;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Eigen::MatrixXd HashedCharEncoder::encode_text(const std::string& transcript) const {
  Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, dim_);
  std::size_t count = 0;
  std::uint32_t cp = 0;
  int pending = 0;
  for (unsigned char c : transcript) {
    if ((c & 0x80) == 0) {
      cp = c;
      pending = 0;
    } else if ((c & 0xC0) == 0xC0) {
      cp = c;
      pending = (c & 0xE0) == 0xC0 ? 1 : (c & 0xF0) == 0xE0 ? 2 : 3;
      continue;
    } else {  // continuation byte
      cp = (cp << 6) | (c & 0x3F);
      if (--pending > 0) continue;
    }
    row(0, static_cast<long>(fnv1a_u64(cp) % static_cast<std::uint64_t>(dim_))) += 1.0;
    ++count;
  }
  if (count > 0) row /= static_cast<double>(count);
  return row;
}

EncoderSet EncoderSet::toy_defaults() {
  EncoderSet set;
  set.video = std::make_shared<ChannelMeanEncoder>(Modality::video, 8);
  set.face = std::make_shared<ChannelMeanEncoder>(Modality::face, 8);
  set.audio = std::make_shared<MfccEncoder>();
  set.text = std::make_shared<HashedCharEncoder>(16);
  return set;
}

}  // namespace multipcl::ingest
