// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace n2r {

// Base class for all toolkit errors. Callers that do not care about the
// specific failure can catch this one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define N2R_DEFINE_ERROR(name)              \
  struct name : Error {                     \
    using Error::Error;                     \
  }

// geometry
N2R_DEFINE_ERROR(DegenerateAim);
N2R_DEFINE_ERROR(PlaneBehindCamera);
N2R_DEFINE_ERROR(InvalidPose);

// field / training
N2R_DEFINE_ERROR(EmptyDataset);
N2R_DEFINE_ERROR(BadCheckpoint);

// images and metrics
N2R_DEFINE_ERROR(DimensionMismatch);
N2R_DEFINE_ERROR(TooSmall);
N2R_DEFINE_ERROR(ZeroVector);
N2R_DEFINE_ERROR(LengthMismatch);
N2R_DEFINE_ERROR(SingularHomography);

// systems under test
N2R_DEFINE_ERROR(SutCrashed);
N2R_DEFINE_ERROR(SutTimeout);
N2R_DEFINE_ERROR(EmptyModel);
N2R_DEFINE_ERROR(EmptyClass);

// mutations
N2R_DEFINE_ERROR(PatchTooLarge);

// metamorphic engine / statistics
N2R_DEFINE_ERROR(MissingSidecar);
N2R_DEFINE_ERROR(TooFewSamples);
N2R_DEFINE_ERROR(ConstantInput);
N2R_DEFINE_ERROR(InsufficientData);

// persistence / configuration
N2R_DEFINE_ERROR(IoFailure);
N2R_DEFINE_ERROR(ConfigError);

#undef N2R_DEFINE_ERROR

}  // namespace n2r
