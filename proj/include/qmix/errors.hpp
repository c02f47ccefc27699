#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qmix {

/// Base of every error thrown by the library. `name()` is the stable
/// identifier printed by the command line front-end.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Bad input: malformed models, inconsistent shapes, invalid regions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The input was valid but the numerics cannot deliver (non-primitive
/// generators, unstable drifts, failed optimizations).
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define QMIX_DEFINE_ERROR(Name, Base)                                  \
  class Name : public Base {                                           \
   public:                                                             \
    explicit Name(const std::string& what) : Base(#Name, what) {}      \
  };

QMIX_DEFINE_ERROR(EmptyRegion, InputError)
QMIX_DEFINE_ERROR(RegionsTooClose, InputError)
QMIX_DEFINE_ERROR(OverlappingRegions, InputError)
QMIX_DEFINE_ERROR(SupportNotContained, InputError)
QMIX_DEFINE_ERROR(DimensionMismatch, InputError)
QMIX_DEFINE_ERROR(ShapeMismatch, InputError)
QMIX_DEFINE_ERROR(UnequalBlocks, InputError)
QMIX_DEFINE_ERROR(NonPositiveH, InputError)
QMIX_DEFINE_ERROR(NotPositive, InputError)
QMIX_DEFINE_ERROR(InsufficientRows, InputError)

QMIX_DEFINE_ERROR(DegenerateBinning, NumericalError)
QMIX_DEFINE_ERROR(NotPrimitive, NumericalError)
QMIX_DEFINE_ERROR(SingularSigma, NumericalError)
QMIX_DEFINE_ERROR(ConvergenceFailure, NumericalError)
QMIX_DEFINE_ERROR(NotStable, NumericalError)
QMIX_DEFINE_ERROR(NoCrossing, NumericalError)
QMIX_DEFINE_ERROR(Unsupported, NumericalError)

#undef QMIX_DEFINE_ERROR

/// Malformed model text; line and column are 1-based.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line, int column)
      : InputError("ParseError", "line " + std::to_string(line) + ", column " +
                                     std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_, column_;
};

/// Every schema violation found in a model, one "path: message" entry each.
class ValidationError : public InputError {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : InputError("ValidationError", join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace qmix
