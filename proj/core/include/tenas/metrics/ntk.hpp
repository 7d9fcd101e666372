#pragma once

#include <limits>
#include <span>
#include <vector>

#include "tenas/matrix.hpp"
#include "tenas/nn/network.hpp"

namespace tenas::metrics {

/// Value of a divergent condition number (all-zero kernel). Compares above
/// every finite kappa.
inline constexpr double kDivergent = std::numeric_limits<double>::infinity();

/// Relative floor on the smallest eigenvalue: lambda_m is clamped to
/// kEigenFloor * lambda_0 before dividing.
inline constexpr double kEigenFloor = 1e-12;

/// Empirical NTK Theta = J J^T from the per-sample parameter Jacobian.
Matrix compute_ntk(const nn::Network& net, const nn::Tensor& batch,
                   nn::JacobianMode mode = nn::JacobianMode::SumLogits);

/// lambda_0 / max(lambda_m, kEigenFloor * lambda_0) for a descending
/// spectrum; kDivergent when lambda_0 <= 0.
double condition_number(std::span<const double> descending);

struct NtkReport {
  std::vector<std::vector<double>> eigenvalues;  // per repeat, descending
  std::vector<double> per_repeat;                // kappa per repeat
  double kappa_mean = 0.0;

  [[nodiscard]] bool divergent() const noexcept { return kappa_mean == kDivergent; }
};

/// Mean of per-repeat kappas; divergent if any repeat is.
double mean_kappa(std::span<const double> kappas);

}  // namespace tenas::metrics
