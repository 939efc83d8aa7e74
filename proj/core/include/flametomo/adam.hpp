#pragma once

#include <cstdint>

#include "flametomo/network.hpp"

namespace flametomo {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

struct OptimizerState {
    GradientSet first_moment;
    GradientSet second_moment;
    std::uint64_t step = 0;
    double lr = 1e-3;
};

OptimizerState make_optimizer_state(const NetworkParams& params, double lr);

// Bias-corrected Adam update at state.lr:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
// A non-finite gradient raises DivergenceError and leaves state and params
// untouched.
void adam_step(OptimizerState& state, NetworkParams& params, const GradientSet& grads,
               const AdamConfig& cfg = {});

}  // namespace flametomo
