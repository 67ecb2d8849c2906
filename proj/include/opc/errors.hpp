#pragma once

#include <stdexcept>
#include <string>

namespace opc {

// Exit-code families used by the command-line front end. Library code throws
// typed exceptions; the CLI maps them onto these process exit codes.
enum class ErrorClass : int {
  schema = 2,        // malformed input / file format violations
  partial = 3,       // room budget exhausted; best partial result was produced
  precondition = 4,  // operation preconditions violated
  verification = 5,  // independent re-verification failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorClass::schema, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorClass::precondition, what) {}
};

class VerificationError : public Error {
 public:
  explicit VerificationError(const std::string& what) : Error(ErrorClass::verification, what) {}
};

// Signals that an instance ran out of orthogonality room. Carries enough
// context for the partial-result policy: which anchor saturated and an
// estimate of the multiplicity that would have sufficed.
class RoomExhausted : public Error {
 public:
  RoomExhausted(const std::string& what, int anchor, int required_multiplicity)
      : Error(ErrorClass::partial, what),
        anchor_(anchor),
        required_multiplicity_(required_multiplicity) {}
  int anchor() const noexcept { return anchor_; }
  int required_multiplicity() const noexcept { return required_multiplicity_; }

 private:
  int anchor_;
  int required_multiplicity_;
};

struct NotSquare : PreconditionError {
  explicit NotSquare(const std::string& w) : PreconditionError(w) {}
};
struct NotHermitian : PreconditionError {
  explicit NotHermitian(const std::string& w) : PreconditionError(w) {}
};
struct NoConvergence : PreconditionError {
  explicit NoConvergence(const std::string& w) : PreconditionError(w) {}
};
struct NotPSD : PreconditionError {
  explicit NotPSD(const std::string& w) : PreconditionError(w) {}
};
struct NormExceedsOne : PreconditionError {
  explicit NormExceedsOne(const std::string& w) : PreconditionError(w) {}
};
struct Exhausted : PreconditionError {
  explicit Exhausted(const std::string& w) : PreconditionError(w) {}
};
struct NotInRange : PreconditionError {
  explicit NotInRange(const std::string& w) : PreconditionError(w) {}
};
struct NotInside : PreconditionError {
  explicit NotInside(const std::string& w) : PreconditionError(w) {}
};
struct MarginViolated : PreconditionError {
  explicit MarginViolated(const std::string& w) : PreconditionError(w) {}
};
struct ThetaTooSmall : PreconditionError {
  explicit ThetaTooSmall(const std::string& w) : PreconditionError(w) {}
};
struct BadGrid : PreconditionError {
  explicit BadGrid(const std::string& w) : PreconditionError(w) {}
};
struct CoverageGap : PreconditionError {
  explicit CoverageGap(const std::string& w) : PreconditionError(w) {}
};
struct Degenerate2x2 : PreconditionError {
  explicit Degenerate2x2(const std::string& w) : PreconditionError(w) {}
};
struct RegionNotCovered : PreconditionError {
  explicit RegionNotCovered(const std::string& w) : PreconditionError(w) {}
};
struct WeightsNotConvex : PreconditionError {
  explicit WeightsNotConvex(const std::string& w) : PreconditionError(w) {}
};
struct EquivalenceViolated : PreconditionError {
  explicit EquivalenceViolated(const std::string& w) : PreconditionError(w) {}
};
struct RegionViolatedAtT : PreconditionError {
  RegionViolatedAtT(const std::string& w, double t) : PreconditionError(w), t(t) {}
  double t;
};

}  // namespace opc
