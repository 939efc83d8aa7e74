#include "flametomo/adam.hpp"

#include <cmath>

#include "flametomo/error.hpp"

namespace flametomo {

void AdamConfig::validate() const {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ValidationError("adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ValidationError("adam epsilon must be positive");
}

OptimizerState make_optimizer_state(const NetworkParams& params, double lr) {
    OptimizerState s;
    s.first_moment = GradientSet::zeros(params.shape);
    s.second_moment = GradientSet::zeros(params.shape);
    s.lr = lr;
    return s;
}

namespace {

template <typename Param, typename Grad, typename Moment>
void update_block(Param& theta, const Grad& g, Moment& m, Moment& v, const AdamConfig& cfg,
                  double lr, double bias1, double bias2) {
    m.array() = cfg.beta1 * m.array() + (1.0 - cfg.beta1) * g.array();
    v.array() = cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square();
    theta.array() -=
        lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + cfg.epsilon);
}

}  // namespace

void adam_step(OptimizerState& state, NetworkParams& params, const GradientSet& grads,
               const AdamConfig& cfg) {
    const std::size_t n = params.layers.size();
    if (grads.layers.size() != n || state.first_moment.layers.size() != n ||
        state.second_moment.layers.size() != n) {
        throw ValidationError("adam: parameter, gradient and moment shapes differ");
    }
    for (std::size_t l = 0; l < n; ++l) {
        if (grads.layers[l].weight.rows() != params.layers[l].weight.rows() ||
            grads.layers[l].weight.cols() != params.layers[l].weight.cols() ||
            grads.layers[l].bias.size() != params.layers[l].bias.size()) {
            throw ValidationError("adam: gradient layer " + std::to_string(l) + " has wrong shape");
        }
    }
    if (!grads.all_finite()) {
        throw DivergenceError("adam: non-finite gradient at step " + std::to_string(state.step + 1),
                              static_cast<std::size_t>(state.step + 1));
    }

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(cfg.beta1, t);
    const double bias2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t l = 0; l < n; ++l) {
        update_block(params.layers[l].weight, grads.layers[l].weight,
                     state.first_moment.layers[l].weight, state.second_moment.layers[l].weight, cfg,
                     state.lr, bias1, bias2);
        update_block(params.layers[l].bias, grads.layers[l].bias, state.first_moment.layers[l].bias,
                     state.second_moment.layers[l].bias, cfg, state.lr, bias1, bias2);
    }
}

}  // namespace flametomo
