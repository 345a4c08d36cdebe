#pragma once

#include <cmath>

#include "machlab/errors.hpp"

namespace machlab {

/// Barotropic gamma-law p(rho_hat) = (rho_hat^gamma - 1)/gamma, normalized so
/// p(1) = 0 and p'(1) = 1.
class PressureLaw {
  public:
    explicit PressureLaw(double gamma = 1.4) : gamma_(gamma) {
        if (!(gamma > 0.0)) throw ConfigError("PressureLaw: gamma must be positive");
    }

    double gamma() const { return gamma_; }
    double p(double rho_hat) const { return (std::pow(rho_hat, gamma_) - 1.0) / gamma_; }
    double dp(double rho_hat) const { return std::pow(rho_hat, gamma_ - 1.0); }
    double ddp(double rho_hat) const { return (gamma_ - 1.0) * std::pow(rho_hat, gamma_ - 2.0); }
    /// inverse of p: rho_hat with p(rho_hat) = y
    double p_inverse(double y) const { return std::pow(1.0 + gamma_ * y, 1.0 / gamma_); }

  private:
    double gamma_;
};

}  // namespace machlab
