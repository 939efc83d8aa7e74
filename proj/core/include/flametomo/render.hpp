#pragma once

#include <random>
#include <span>
#include <vector>

#include "flametomo/camera.hpp"
#include "flametomo/network.hpp"
#include "flametomo/projection.hpp"

namespace flametomo {

// A training ray and the measured projection of the pixel that cast it.
struct RaySample {
    Ray ray;
    double target = 0.0;
};

// Reprojection of the network field along one ray: sum_i f(s_i) * step, with
// the same sample positions and quadrature as forward_project.
double render_ray(const NetworkParams& params, const Ray& ray, const SamplingConfig& cfg);

// Renders every pixel of `camera`; the network analogue of forward_project.
ProjectionImage render_image(const NetworkParams& params, const CameraModel& camera,
                             const SamplingConfig& cfg);

struct LossAndGradient {
    double loss = 0.0;
    GradientSet grads;
};

// Mean squared reprojection error over the batch and its exact gradient.
// Stratified jitter is drawn from `rng` ray by ray in batch order.
LossAndGradient batch_loss(const NetworkParams& params, std::span<const RaySample> batch,
                           const SamplingConfig& cfg, std::mt19937_64& rng);
// Same, with an RNG seeded from cfg.seed.
LossAndGradient batch_loss(const NetworkParams& params, std::span<const RaySample> batch,
                           const SamplingConfig& cfg);

// Batched loss evaluation used by the trainer. Rays are cut into fixed chunks
// of `chunk_rays`; chunks may run on `workers` threads and their gradients are
// reduced in chunk order, so the result does not depend on the worker count.
// `distances` holds cfg.count sample distances per ray, ray-major.
template <typename Scalar>
LossAndGradient evaluate_batch(const NetworkParamsT<Scalar>& params,
                               std::span<const RaySample> batch,
                               std::span<const double> distances, int samples_per_ray,
                               double step, int workers = 1, int chunk_rays = 64);

}  // namespace flametomo
