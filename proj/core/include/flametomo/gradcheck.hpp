#pragma once

#include <cstdint>
#include <vector>

#include "flametomo/network.hpp"

namespace flametomo {

struct GradcheckConfig {
    std::uint64_t seed = 0;
    int directions = 100;
    double step = 1e-6;  // initial finite-difference step along a unit direction
    // Width-reduced copy of the default architecture (same topology).
    NetworkShape shape{33, 16, 6, 4, {8, 4}};
    int image_size = 4;  // pixels per side, two cameras
};

struct DirectionCheck {
    double backprop = 0.0;  // g . d
    double finite_difference = 0.0;
    double relative_error = 0.0;
    double step = 0.0;  // step actually used
};

struct GradcheckReport {
    std::vector<DirectionCheck> checks;
    std::size_t parameter_count = 0;
    std::size_t rays = 0;
    double loss = 0.0;
    double max_relative_error = 0.0;
    double mean_relative_error = 0.0;
    int reduced_steps = 0;  // directions whose step had to shrink
};

// Compares the backpropagated gradient of the reprojection loss against
// central differences along random unit directions in parameter space, all
// in 64-bit arithmetic. The step is halved for a direction until no rectifier
// changes state between theta - h d and theta + h d, so the difference
// quotient never straddles a kink.
GradcheckReport gradient_check(const GradcheckConfig& cfg = {});

}  // namespace flametomo
