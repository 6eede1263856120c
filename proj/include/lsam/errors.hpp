#pragma once

#include <stdexcept>
#include <string>

namespace lsam {

// Invalid or inconsistent configuration: bad constants, malformed config
// files, violated step-size caps.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Coordination protocol violation in the distributed runtime.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

// Partition-function quadrature exceeded the overflow guard, e.g. for an
// objective that is unbounded below.
class PartitionDivergedError : public std::runtime_error {
 public:
  explicit PartitionDivergedError(const std::string& what)
      : std::runtime_error(what) {}
};

// An MCMC chain left the confinement ball.
class ChainDivergenceError : public std::runtime_error {
 public:
  explicit ChainDivergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace lsam
