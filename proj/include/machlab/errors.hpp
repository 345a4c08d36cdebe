#pragma once

#include <stdexcept>
#include <string>

namespace machlab {

/// Bad user input: grid extents, config keys, preset parameters.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Neumann data incompatible with the right-hand side beyond tolerance.
class CompatibilityError : public std::runtime_error {
  public:
    CompatibilityError(const std::string& what, double defect)
        : std::runtime_error(what), defect_(defect) {}
    double defect() const { return defect_; }

  private:
    double defect_;
};

/// Generic numerical failure (singular factorization, non-finite values).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Total density 1 + eps*rho dropped below the non-vacuum floor somewhere.
class VacuumError : public NumericalError {
  public:
    VacuumError(const std::string& what, int node, double value)
        : NumericalError(what), node_(node), value_(value) {}
    int node() const { return node_; }
    double value() const { return value_; }

  private:
    int node_;
    double value_;
};

/// Solution norm exploded during time integration.
class BlowUpError : public NumericalError {
  public:
    BlowUpError(const std::string& what, double time) : NumericalError(what), time_(time) {}
    double time() const { return time_; }

  private:
    double time_;
};

}  // namespace machlab
