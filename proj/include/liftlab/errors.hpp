#pragma once

#include <stdexcept>
#include <string>

namespace liftlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define LIFTLAB_ERROR(Name)          \
  struct Name : Error {              \
    using Error::Error;              \
  }

LIFTLAB_ERROR(NotAContraction);
LIFTLAB_ERROR(DimensionMismatch);
LIFTLAB_ERROR(GridTooCoarse);
LIFTLAB_ERROR(NotSquare);
LIFTLAB_ERROR(AllZeroModulus);
LIFTLAB_ERROR(NotIsometryOnWindow);
LIFTLAB_ERROR(DefectSingular);
LIFTLAB_ERROR(WrongKernelShapes);
LIFTLAB_ERROR(NotContractiveOnGrid);
LIFTLAB_ERROR(Z0NotAZero);
LIFTLAB_ERROR(BoundaryAssumptionMissing);
LIFTLAB_ERROR(NotIsometricR0);
LIFTLAB_ERROR(SequenceViolatesRecursion);
LIFTLAB_ERROR(DimensionObstruction);
LIFTLAB_ERROR(WindowOverflow);
LIFTLAB_ERROR(SchemaError);

#undef LIFTLAB_ERROR

using NotContraction = NotAContraction;

struct IntertwiningViolated : Error {
  IntertwiningViolated(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual;
};

}  // namespace liftlab
