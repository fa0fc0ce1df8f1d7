#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace imcf {

// Exit-code categories used by the CLI: 1 check failed, 2 config error,
// 3 numerical failure, 4 precondition violation.
enum class ErrorKind { Check = 1, Config = 2, Numerical = 3, Precondition = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), kind_(kind), name_(std::move(name)) {}
  ErrorKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

#define IMCF_DEFINE_ERROR(Name, Kind)                              \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& w)                            \
        : Error(ErrorKind::Kind, #Name, w) {}                      \
  };

IMCF_DEFINE_ERROR(DomainError, Precondition)
IMCF_DEFINE_ERROR(NotTimelike, Precondition)
IMCF_DEFINE_ERROR(SingularMetric, Numerical)
IMCF_DEFINE_ERROR(NotSpacelike, Precondition)
IMCF_DEFINE_ERROR(NonPositiveH, Precondition)
IMCF_DEFINE_ERROR(NumericalBlowup, Numerical)
IMCF_DEFINE_ERROR(NoHorizon, Precondition)
IMCF_DEFINE_ERROR(UnsupportedTopology, Precondition)
IMCF_DEFINE_ERROR(NotPositive, Precondition)
IMCF_DEFINE_ERROR(BarrierViolated, Precondition)
IMCF_DEFINE_ERROR(RangeError, Precondition)
IMCF_DEFINE_ERROR(OutOfFoliation, Precondition)
IMCF_DEFINE_ERROR(Unbounded, Precondition)
IMCF_DEFINE_ERROR(StiffnessFailure, Numerical)
IMCF_DEFINE_ERROR(InitialDataInvalid, Precondition)
IMCF_DEFINE_ERROR(ConfigError, Config)

#undef IMCF_DEFINE_ERROR

}  // namespace imcf
