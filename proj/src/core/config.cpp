#include "tsr/core/config.hpp"

#include <stdexcept>
#include <string>

namespace tsr {

void Config::validate() const {
  if (r < 1) throw std::invalid_argument("r must be >= 1");
  if (f < 1 || f > (r - 1) / 2) {
    throw std::invalid_argument("f=" + std::to_string(f) + " outside [1, floor((r-1)/2)] for r=" +
                                std::to_string(r));
  }
  if (partitions < 1) throw std::invalid_argument("partitions must be >= 1");
  if (promise_period <= 0) throw std::invalid_argument("promise_period must be positive");
  if (recovery_timeout < 0) throw std::invalid_argument("recovery_timeout must be non-negative");
}

}  // namespace tsr
