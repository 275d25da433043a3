#include "multipcl/pipeline.h"

#include <cmath>
#include <filesystem>

namespace multipcl::ingest {

namespace fs = std::filesystem;

FrameSequence extract_frames(const corpus::ManifestEntry& entry, MediaReader& reader,
                             const FrameSamplingParams& params, const std::string& media_root) {
  if (params.target_fps <= 0) throw DomainError("extract_frames: target_fps must be > 0");
  if (params.max_frames == 0) throw DomainError("extract_frames: max_frames must be > 0");
  fs::path path = media_root.empty() ? fs::path(entry.video_path)
                                     : fs::path(media_root) / entry.video_path;
  FrameSequence src;
  try {
    src = reader.read_video(path.string());
  } catch (const Error& e) {
    throw IngestError("entry '" + entry.id + "': " + e.what());
  }
  if (src.frames.empty()) throw IngestError("entry '" + entry.id + "': no decodable frames");

  FrameSequence out;
  out.source_fps = params.target_fps;
  const double step = src.source_fps / params.target_fps;
  for (std::size_t i = 0; out.frames.size() < params.max_frames; ++i) {
    auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(i) * step));
    if (idx >= src.frames.size()) break;
    out.frames.push_back(src.frames[idx]);
  }
  return out;
}

ModalityBundle encode_bundle(const FrameSequence& frames, const FaceGateResult& gate,
                             const Waveform& audio, const std::string& transcript,
                             const EncoderSet& encoders, const std::set<Modality>& request) {
  ModalityBundle bundle;

  auto check_row = [](const Eigen::VectorXd& row, long want, Modality m) {
    if (row.size() != want) {
      throw ContractError(modality_name(m) + " encoder produced dimension " +
                          std::to_string(row.size()) + ", declared " + std::to_string(want));
    }
    if (!row.allFinite()) {
      throw ContractError(modality_name(m) + " encoder produced non-finite values");
    }
  };
  auto check_mat = [](const Eigen::MatrixXd& mat, long want, Modality m) {
    if (mat.cols() != want) {
      throw ContractError(modality_name(m) + " encoder produced dimension " +
                          std::to_string(mat.cols()) + ", declared " + std::to_string(want));
    }
    if (!mat.allFinite()) {
      throw ContractError(modality_name(m) + " encoder produced non-finite values");
    }
  };

  if (request.count(Modality::video)) {
    if (!encoders.video) throw ContractError("video modality requested but no encoder given");
    const long d = encoders.video->dim();
    Eigen::MatrixXd z(static_cast<long>(frames.frames.size()), d);
    for (std::size_t i = 0; i < frames.frames.size(); ++i) {
      Eigen::VectorXd row = encoders.video->encode_frame(frames.frames[i]);
      check_row(row, d, Modality::video);
      z.row(static_cast<long>(i)) = row.transpose();
    }
    bundle.video = FeatureMatrix::from_eigen(z);
    bundle.present.insert(Modality::video);
  }

  if (request.count(Modality::face)) {
    if (!encoders.face) throw ContractError("face modality requested but no encoder given");
    if (gate.size() != frames.frames.size()) {
      throw ContractError("face gate length does not match frame count");
    }
    const long d = encoders.face->dim();
    FeatureMatrix zv(frames.frames.size(), static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < frames.frames.size(); ++i) {
      if (!gate.flag(i)) continue;  // stays an exact zero row
      Eigen::VectorXd row = encoders.face->encode_frame(*gate.crops[i]);
      check_row(row, d, Modality::face);
      for (long c = 0; c < d; ++c) zv.at(i, static_cast<std::size_t>(c)) =
          static_cast<float>(row[c]);
    }
    bundle.face = std::move(zv);
    bundle.present.insert(Modality::face);
  }

  if (request.count(Modality::audio)) {
    if (!encoders.audio) throw ContractError("audio modality requested but no encoder given");
    Eigen::MatrixXd za = encoders.audio->encode_audio(audio);
    check_mat(za, encoders.audio->dim(), Modality::audio);
    bundle.audio = FeatureMatrix::from_eigen(za);
    bundle.present.insert(Modality::audio);
  }

  if (request.count(Modality::text)) {
    if (!encoders.text) throw ContractError("text modality requested but no encoder given");
    Eigen::MatrixXd zt = encoders.text->encode_text(transcript);
    check_mat(zt, encoders.text->dim(), Modality::text);
    bundle.text = FeatureMatrix::from_eigen(zt);
    bundle.present.insert(Modality::text);
  }

  bundle.validate();
  return bundle;
}

ModalityBundle ingest_entry(const corpus::ManifestEntry& entry, MediaReader& reader,
                            const FaceDetector& detector, const EncoderSet& encoders,
                            const std::set<Modality>& request,
                            const FrameSamplingParams& params, const std::string& media_root) {
  const bool needs_frames = request.count(Modality::video) || request.count(Modality::face);
  FrameSequence frames;
  if (needs_frames) frames = extract_frames(entry, reader, params, media_root);

  FaceGateResult gate;
  if (request.count(Modality::face)) gate = gate_faces(frames, detector);

  Waveform audio;
  if (request.count(Modality::audio)) {
    fs::path path = media_root.empty() ? fs::path(entry.video_path)
                                       : fs::path(media_root) / entry.video_path;
    try {
      audio = reader.read_audio(path.string());
    } catch (const Error& e) {
      throw IngestError("entry '" + entry.id + "': " + e.what());
    }
  }

  return encode_bundle(frames, gate, audio, entry.transcript, encoders, request);
}

}  // namespace multipcl::ingest
