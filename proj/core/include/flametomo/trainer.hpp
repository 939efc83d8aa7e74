#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "flametomo/adam.hpp"
#include "flametomo/dataset_io.hpp"
#include "flametomo/network.hpp"
#include "flametomo/render.hpp"

namespace flametomo {

// Arithmetic used for the network's forward and backward passes during
// training. Parameters, moments and the update are always 64-bit.
enum class ComputePrecision { Float32, Float64 };

const char* to_string(ComputePrecision p);
ComputePrecision precision_from_string(const std::string& name);

struct TrainConfig {
    double initial_lr = 1e-3;  // 1e-4 barely moves in 20 epochs at the default scale
    double decay = 0.95;  // lr multiplier applied at every epoch boundary
    int batch_size = 1024;
    int epochs = 20;
    SamplingMode sampling_mode = SamplingMode::StratifiedRandom;
    std::uint64_t seed = 0;       // shuffling and stratified jitter
    std::uint64_t init_seed = 0;  // network initialisation
    AdamConfig adam;
    ComputePrecision precision = ComputePrecision::Float32;
    int workers = 1;
    int chunk_rays = 64;

    void validate() const;
};

struct LossHistory {
    std::vector<double> epoch_mean_loss;
    std::vector<double> step_loss;
};

struct EpochReport {
    int epoch = 0;  // 1-based
    double mean_loss = 0.0;
    double lr_used = 0.0;
    double next_lr = 0.0;
    std::uint64_t steps = 0;
    double seconds = 0.0;
};

using EpochObserver = std::function<void(const EpochReport&, const NetworkParams&)>;

struct TrainResult {
    NetworkParams params;
    LossHistory history;
    OptimizerState optimizer;
};

// One ray per pixel per camera, camera-major then row-major.
std::vector<RaySample> build_ray_set(const Dataset& dataset);

// Learning rate in effect after `epochs_done` completed epochs.
double scheduled_lr(const TrainConfig& cfg, int epochs_done);

// Fits a network to the dataset's projections. Throws DivergenceError with the
// failing step when the loss or a gradient becomes non-finite.
TrainResult train(const Dataset& dataset, const NetworkShape& shape,
                  const EncodingConfig& encoding, const TrainConfig& cfg,
                  const EpochObserver& observer = {});

// Continues from given parameters (e.g. a checkpoint).
TrainResult train_from(const Dataset& dataset, NetworkParams initial, const TrainConfig& cfg,
                       const EpochObserver& observer = {});

std::string loss_history_csv(const LossHistory& history);

}  // namespace flametomo
