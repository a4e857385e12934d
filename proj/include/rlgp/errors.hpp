#pragma once

#include <stdexcept>
#include <string>

namespace rlgp {

/// Base class for every error raised by the planner library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RLGP_DEFINE_ERROR(Name)                          \
  class Name : public Error {                            \
   public:                                               \
    explicit Name(const std::string& what)               \
        : Error(std::string(#Name ": ") + what) {}       \
  }

RLGP_DEFINE_ERROR(ModelMismatch);
RLGP_DEFINE_ERROR(InvalidResolution);
RLGP_DEFINE_ERROR(InvalidParameter);
RLGP_DEFINE_ERROR(FormatError);
RLGP_DEFINE_ERROR(PreconditionRejected);
RLGP_DEFINE_ERROR(NoSolution);
RLGP_DEFINE_ERROR(WorkspaceInfeasible);
RLGP_DEFINE_ERROR(UnreachableQuery);
RLGP_DEFINE_ERROR(DisconnectedQuery);
RLGP_DEFINE_ERROR(NoPath);
RLGP_DEFINE_ERROR(EmptyFrontier);
RLGP_DEFINE_ERROR(NoPlan);
RLGP_DEFINE_ERROR(Timeout);
RLGP_DEFINE_ERROR(IntegrityViolation);
RLGP_DEFINE_ERROR(GenerationFailure);
RLGP_DEFINE_ERROR(Infeasible);

#undef RLGP_DEFINE_ERROR

}  // namespace rlgp
