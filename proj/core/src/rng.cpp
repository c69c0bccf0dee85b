#include "glosskit/rng.hpp"

#include <cmath>

namespace glosskit {

double SplitMix64::next_gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u in (0,1] so log() stays finite.
  double u = 1.0 - next_double();
  double v = next_double();
  double r = std::sqrt(-2.0 * std::log(u));
  double theta = 2.0 * M_PI * v;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace glosskit
