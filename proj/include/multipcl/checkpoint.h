#pragma once

#include <optional>
#include <string>

#include "multipcl/fusion.h"

namespace multipcl::fusion {

/// Model checkpoint codec. Layout: magic "PCLM", version byte, u32-le length
/// + JSON config record (variant, dims, modality set, pair set, input dims),
/// then named parameter sections in the feature-cache matrix layout
/// (u16-le name length + name, u32-le rows, u32-le cols, f32-le row-major
/// payload). Parameters are stored at f32 precision.
void save_checkpoint(const FusionModel& model, const std::string& path);

/// Loads a checkpoint. When `expected` is given, any config mismatch is
/// rejected with a ValidationError.
FusionModel load_checkpoint(const std::string& path,
                            const std::optional<FusionConfig>& expected = std::nullopt);

std::string config_to_json(const FusionConfig& config, Variant variant);

}  // namespace multipcl::fusion
