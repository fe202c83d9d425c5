#pragma once

#include <stdexcept>
#include <string>

namespace pvo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid scenario file or noise/mixture specification. Messages carry the
/// offending field path (and line, for parse failures).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Sample sets or vectors with incompatible dimensions or counts.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The scenario program has no grid control satisfying every scenario pair.
class DesiredDistributionInfeasible : public Error {
 public:
  using Error::Error;
};

/// A hard-constrained planner (surrogate or deterministic) found no feasible
/// grid control.
class NoFeasibleControl : public Error {
 public:
  using Error::Error;
};

}  // namespace pvo
