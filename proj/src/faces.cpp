#include "multipcl/faces.h"

#include <iostream>

namespace multipcl::ingest {

std::size_t FaceGateResult::detected_count() const {
  std::size_t n = 0;
  for (const auto& c : crops)
    if (c.has_value()) ++n;
  return n;
}

FaceGateResult gate_faces(const FrameSequence& frames, const FaceDetector& detector) {
  FaceGateResult result;
  result.crops.resize(frames.frames.size());
  for (std::size_t i = 0; i < frames.frames.size(); ++i) {
    const Image& frame = frames.frames[i];
    std::vector<FaceBox> boxes;
    try {
      boxes = detector.detect(frame);
    } catch (const std::exception& e) {
      std::cerr << "warning: face detector failed on frame " << i << ": " << e.what() << "\n";
      continue;
    }
    const FaceBox* best = nullptr;
    for (const FaceBox& b : boxes) {
      if (b.width <= 0 || b.height <= 0) continue;
      if (!best || b.area() > best->area()) best = &b;
    }
    if (!best) continue;
    Image crop = frame.crop(best->x, best->y, best->width, best->height);
    if (crop.width == 0 || crop.height == 0) continue;  // box outside the frame
    result.crops[i] = std::move(crop);
  }
  return result;
}

}  // namespace multipcl::ingest
