#pragma once

#include <stdexcept>
#include <string>

namespace lyon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An arm, instance, or policy parameter violates its invariants.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// The episode hit its epoch cap without exhausting the budget.
class EpisodeOverrun : public Error {
public:
  using Error::Error;
};

/// No arm satisfies E[Y - cX] < 0.
class SlaterViolation : public Error {
public:
  using Error::Error;
};

/// No point of the simplex meets the penalty-rate constraint.
class Infeasible : public Error {
public:
  using Error::Error;
};

class NoSamples : public Error {
public:
  using Error::Error;
};

class ExplorationIncomplete : public Error {
public:
  using Error::Error;
};

/// A scheduled tightening parameter delta is not in [0, c).
class DeltaOutOfRange : public Error {
public:
  using Error::Error;
};

class ZeroCost : public Error {
public:
  using Error::Error;
};

}  // namespace lyon
