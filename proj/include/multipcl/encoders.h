#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "multipcl/faces.h"
#include "multipcl/media.h"
#include "multipcl/mfcc.h"

namespace multipcl::ingest {

/// Common surface of all per-modality encoders. Pretrained backbones (ViT,
/// facial-expression transformers, speech models) plug in behind these seams;
/// the bundled implementations are deterministic toys that exercise every
/// shape contract without external weights.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual Modality modality() const = 0;
  virtual long dim() const = 0;
  virtual bool deterministic() const { return true; }
};

class FrameEncoder : public Encoder {
 public:
  /// One feature row per frame or crop.
  virtual Eigen::VectorXd encode_frame(const Image& frame) const = 0;
};

class AudioEncoder : public Encoder {
 public:
  virtual Eigen::MatrixXd encode_audio(const Waveform& wav) const = 0;
};

class TextEncoder : public Encoder {
 public:
  virtual Eigen::MatrixXd encode_text(const std::string& transcript) const = 0;
};

/// Per-channel pixel means in [0,1], cycled across the output dimension.
/// With dim == channels this is exactly the per-channel mean.
class ChannelMeanEncoder : public FrameEncoder {
 public:
  ChannelMeanEncoder(Modality modality, long dim) : modality_(modality), dim_(dim) {}
  Modality modality() const override { return modality_; }
  long dim() const override { return dim_; }
  Eigen::VectorXd encode_frame(const Image& frame) const override;

 private:
  Modality modality_;
  long dim_;
};

/// MFCC sequence features; resamples to the target rate first.
class MfccEncoder : public AudioEncoder {
 public:
  explicit MfccEncoder(MfccParams params = {}, double target_rate = 16000.0)
      : params_(params), target_rate_(target_rate) {}
  Modality modality() const override { return Modality::audio; }
  long dim() const override { return params_.n_coeff; }
  Eigen::MatrixXd encode_audio(const Waveform& wav) const override;

 private:
  MfccParams params_;
  double target_rate_;
};

/// Hashed bag-of-characters frequencies: each code point is hashed into one of
/// dim buckets; the single output row is normalized by transcript length.
class HashedCharEncoder : public TextEncoder {
 public:
  explicit HashedCharEncoder(long dim) : dim_(dim) {}
  Modality modality() const override { return Modality::text; }
  long dim() const override { return dim_; }
  Eigen::MatrixXd encode_text(const std::string& transcript) const override;

 private:
  long dim_;
};

struct EncoderSet {
  std::shared_ptr<FrameEncoder> video;
  std::shared_ptr<FrameEncoder> face;
  std::shared_ptr<AudioEncoder> audio;
  std::shared_ptr<TextEncoder> text;

  static EncoderSet toy_defaults();
};

}  // namespace multipcl::ingest
