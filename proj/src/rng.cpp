#include "adabelief/rng.hpp"

#include <cmath>
#include <numbers>

namespace adabelief {

double RngStream::next_gaussian() {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec gaussian_noise(RngStream& rng, Eigen::Index d, double sigma) {
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");
  }
  if (d < 1) {
    throw Error(ErrorCode::DimensionMismatch, "noise length must be >= 1");
  }
  Vec out = Vec::Zero(d);
  if (sigma == 0) return out;
  for (Eigen::Index i = 0; i < d; ++i) out[i] = sigma * rng.next_gaussian();
  return out;
}

}  // namespace adabelief
