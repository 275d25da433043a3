#pragma once

#include "multipcl/fusion.h"

namespace multipcl::testing {

/// Independent re-derivation of the fusion forward pass as straight-line
/// scalar code: plain nested loops over vectors of doubles, no linear-algebra
/// library, no shared helpers with the implementation. Returns the logit.
double scalar_oracle_logit(const fusion::FusionModel& model,
                           const fusion::SampleInputs& inputs);

}  // namespace multipcl::testing
