#pragma once

#include <stdexcept>
#include <string>

namespace mhfc {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define MHFC_DEFINE_ERROR(NAME)                                \
  struct NAME : Error {                                        \
    explicit NAME(const std::string& msg) : Error(msg) {}      \
  }

// numerics
MHFC_DEFINE_ERROR(DimensionMismatch);
MHFC_DEFINE_ERROR(NotPositiveDefinite);
MHFC_DEFINE_ERROR(SingularMassMatrix);
MHFC_DEFINE_ERROR(TooFewPoints);
MHFC_DEFINE_ERROR(EmptyVector);
MHFC_DEFINE_ERROR(EigensolverFailure);

// ridge
MHFC_DEFINE_ERROR(NonPositiveMu);

// subspace / fusion
MHFC_DEFINE_ERROR(HeadDimMismatch);
MHFC_DEFINE_ERROR(HeadCountMismatch);

// protocols
MHFC_DEFINE_ERROR(InsufficientSamples);
MHFC_DEFINE_ERROR(InsufficientClasses);
MHFC_DEFINE_ERROR(BudgetExceedsPool);

// dataio
MHFC_DEFINE_ERROR(ManifestParseError);
MHFC_DEFINE_ERROR(HeadFileMissing);
MHFC_DEFINE_ERROR(SampleCountMismatch);
MHFC_DEFINE_ERROR(BadMagic);
MHFC_DEFINE_ERROR(BadVersion);
MHFC_DEFINE_ERROR(IoError);
MHFC_DEFINE_ERROR(EmptyList);
MHFC_DEFINE_ERROR(InvalidConfig);
MHFC_DEFINE_ERROR(NonFiniteData);

#undef MHFC_DEFINE_ERROR

}  // namespace mhfc
