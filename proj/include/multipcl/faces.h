#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "multipcl/media.h"

namespace multipcl::ingest {

struct FaceBox {
  int x = 0, y = 0, width = 0, height = 0;
  long area() const { return static_cast<long>(width) * height; }
};

/// Adapter seam for a face detector (e.g. an MTCNN service); no detector
/// weights are bundled.
class FaceDetector {
 public:
  virtual ~FaceDetector() = default;
  virtual std::vector<FaceBox> detect(const Image& frame) const = 0;
};

/// Never detects. Face features fall back to zero-vector fill everywhere.
class NullFaceDetector : public FaceDetector {
 public:
  std::vector<FaceBox> detect(const Image&) const override { return {}; }
};

/// Treats the whole frame as the face region (talking-head assumption).
class FullFrameFaceDetector : public FaceDetector {
 public:
  std::vector<FaceBox> detect(const Image& frame) const override {
    return {FaceBox{0, 0, frame.width, frame.height}};
  }
};

/// Per-frame gate: crops[i] holds the detected face for frame i, or nullopt
/// when no face was found there.
struct FaceGateResult {
  std::vector<std::optional<Image>> crops;

  bool flag(std::size_t i) const { return crops[i].has_value(); }
  std::size_t size() const { return crops.size(); }
  std::size_t detected_count() const;
};

/// Runs the detector on every frame. With multiple detections the largest box
/// wins; a detector failure on one frame clears that frame's flag and logs a
/// warning instead of aborting the sequence.
FaceGateResult gate_faces(const FrameSequence& frames, const FaceDetector& detector);

}  // namespace multipcl::ingest
