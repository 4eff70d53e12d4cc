#pragma once

#include <stdexcept>
#include <string>

namespace sclab {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, configuration or preconditions (CLI exit code 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation ran but its numerical guarantees broke down (CLI exit code 2).
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// Probability mass reached the outer margin of the periodic grid.
class BoundaryLeak : public NumericFailure {
 public:
  BoundaryLeak(const std::string& what, double leaked_fraction)
      : NumericFailure(what), leaked_fraction_(leaked_fraction) {}
  double leaked_fraction() const { return leaked_fraction_; }

 private:
  double leaked_fraction_;
};

/// Phase unwrapping is ambiguous because the density has nodes.
class NodeError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// Characteristics crossed; the single-valued action ceases to exist.
class CausticError : public NumericFailure {
 public:
  CausticError(const std::string& what, double caustic_time)
      : NumericFailure(what), caustic_time_(caustic_time) {}
  double caustic_time() const { return caustic_time_; }

 private:
  double caustic_time_;
};

/// A Newton trajectory left the configured bounding box.
class EscapeError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// Phase-space mass drifted beyond tolerance (grid too coarse).
class MassDriftError : public NumericFailure {
 public:
  MassDriftError(const std::string& what, double drift)
      : NumericFailure(what), drift_(drift) {}
  double drift() const { return drift_; }

 private:
  double drift_;
};

/// Residuals straddle the classification tolerance across widths.
class InconclusiveError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

}  // namespace sclab
