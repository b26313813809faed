#include "authsim/errors.hpp"

#include <fmt/format.h>

namespace authsim {

StabilityError::StabilityError(std::string station, double utilization)
    : Error(fmt::format("unstable {}: utilization {:.4g} >= 1", station, utilization)),
      station_(std::move(station)),
      utilization_(utilization) {}

}  // namespace authsim
