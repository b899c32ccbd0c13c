// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <vector>

#include "topcco/model.hpp"

namespace topcco::cco::detail {

// Bottleneck feasibility for a fixed leader set: can every non-leader be
// assigned so that each committee has >= 3f followers, and at least
// (2+sigma_i) f of them within rtt `threshold` of their leader? Sigma is
// searched over all patterns consistent with the leaders' own TEE state.
// Returns leader_of on success.
std::optional<std::vector<NodeId>> assign_within(
    const Instance& instance, const std::vector<NodeId>& leaders,
    Micros threshold);

}  // namespace topcco::cco::detail
