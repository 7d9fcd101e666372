#include "tenas/metrics/ntk.hpp"

#include <algorithm>

#include "tenas/common.hpp"

namespace tenas::metrics {

Matrix compute_ntk(const nn::Network& net, const nn::Tensor& batch, nn::JacobianMode mode) {
  return net.per_sample_jacobian(batch, mode).gram();
}

double condition_number(std::span<const double> descending) {
  if (descending.empty()) throw InvalidArgument("condition number of an empty spectrum");
  const double top = descending.front();
  if (!(top > 0.0)) return kDivergent;
  const double bottom = std::max(descending.back(), kEigenFloor * top);
  return top / bottom;
}

double mean_kappa(std::span<const double> kappas) {
  if (kappas.empty()) throw InvalidArgument("mean of zero kappas");
  double sum = 0.0;
  for (double k : kappas) {
    if (k == kDivergent) return kDivergent;
    sum += k;
  }
  return sum / static_cast<double>(kappas.size());
}

}  // namespace tenas::metrics
