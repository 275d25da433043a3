#pragma once

#include <set>

#include "multipcl/bundle.h"
#include "multipcl/encoders.h"
#include "multipcl/faces.h"
#include "multipcl/manifest.h"
#include "multipcl/media.h"

namespace multipcl::ingest {

struct FrameSamplingParams {
  double target_fps = 1.0;
  std::size_t max_frames = 256;
};

/// Uniformly samples the entry's video at target_fps, truncated to
/// max_frames. Frame count is min(max_frames, floor(duration * target_fps))
/// within one frame.
FrameSequence extract_frames(const corpus::ManifestEntry& entry, MediaReader& reader,
                             const FrameSamplingParams& params,
                             const std::string& media_root = "");

/// Runs the per-modality encoders over one sample's raw segments. Face rows
/// are exact zero vectors wherever the gate found no face. Encoder outputs
/// are checked against the declared dimension and for finiteness.
ModalityBundle encode_bundle(const FrameSequence& frames, const FaceGateResult& gate,
                             const Waveform& audio, const std::string& transcript,
                             const EncoderSet& encoders,
                             const std::set<Modality>& request);

/// Full per-entry pipeline: decode, sample, gate, encode. Used by the CLI.
ModalityBundle ingest_entry(const corpus::ManifestEntry& entry, MediaReader& reader,
                            const FaceDetector& detector, const EncoderSet& encoders,
                            const std::set<Modality>& request,
                            const FrameSamplingParams& params,
                            const std::string& media_root = "");

}  // namespace multipcl::ingest
