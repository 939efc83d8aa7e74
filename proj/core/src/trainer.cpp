#include "flametomo/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "flametomo/error.hpp"

namespace flametomo {

const char* to_string(ComputePrecision p) {
    return p == ComputePrecision::Float32 ? "float32" : "float64";
}

ComputePrecision precision_from_string(const std::string& name) {
    if (name == "float32") return ComputePrecision::Float32;
    if (name == "float64") return ComputePrecision::Float64;
    throw ValidationError("unknown precision '" + name + "'");
}

void TrainConfig::validate() const {
    if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) {
        throw ValidationError("initial_lr must be positive");
    }
    if (!(decay > 0.0 && decay <= 1.0)) throw ValidationError("decay must lie in (0, 1]");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (workers < 1) throw ValidationError("workers must be >= 1");
    if (chunk_rays < 1) throw ValidationError("chunk_rays must be >= 1");
    adam.validate();
}

std::vector<RaySample> build_ray_set(const Dataset& dataset) {
    dataset.validate();
    SamplingConfig q{dataset.sample_count, dataset.near, dataset.far,
                     SamplingMode::DeterministicMidpoint, 0};
    std::vector<RaySample> rays;
    for (std::size_t c = 0; c < dataset.cameras.size(); ++c) {
        const CameraModel& cam = dataset.cameras[c];
        const ProjectionImage& img = dataset.images[c];
        for (int v = 0; v < cam.height; ++v) {
            for (int u = 0; u < cam.width; ++u) {
                rays.push_back({generate_ray(cam, u, v, q), img.at(u, v)});
            }
        }
    }
    return rays;
}

double scheduled_lr(const TrainConfig& cfg, int epochs_done) {
    return cfg.initial_lr * std::pow(cfg.decay, epochs_done);
}

TrainResult train(const Dataset& dataset, const NetworkShape& shape,
                  const EncodingConfig& encoding, const TrainConfig& cfg,
                  const EpochObserver& observer) {
    cfg.validate();
    return train_from(dataset, init_params(cfg.init_seed, shape, encoding), cfg, observer);
}

TrainResult train_from(const Dataset& dataset, NetworkParams initial, const TrainConfig& cfg,
                       const EpochObserver& observer) {
    cfg.validate();
    const std::vector<RaySample> rays = build_ray_set(dataset);
    if (rays.empty()) throw ValidationError("dataset has no rays");

    SamplingConfig sampling{dataset.sample_count, dataset.near, dataset.far, cfg.sampling_mode,
                            cfg.seed};
    sampling.validate();
    const int n = sampling.count;
    const double step = sampling.step();

    TrainResult result;
    result.params = std::move(initial);
    result.optimizer = make_optimizer_state(result.params, scheduled_lr(cfg, 0));

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(rays.size());
    std::vector<RaySample> batch;
    std::vector<double> distances;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);

        double weighted_loss = 0.0;
        const double lr_used = result.optimizer.lr;
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t count =
                std::min(static_cast<std::size_t>(cfg.batch_size), order.size() - begin);
            batch.clear();
            distances.clear();
            for (std::size_t k = 0; k < count; ++k) {
                batch.push_back(rays[order[begin + k]]);
                const auto s = sample_distances(sampling, rng);
                distances.insert(distances.end(), s.begin(), s.end());
            }

            LossAndGradient lg;
            if (cfg.precision == ComputePrecision::Float32) {
                lg = evaluate_batch(result.params.cast<float>(), std::span<const RaySample>(batch),
                                    distances, n, step, cfg.workers, cfg.chunk_rays);
            } else {
                lg = evaluate_batch(result.params, std::span<const RaySample>(batch), distances, n,
                                    step, cfg.workers, cfg.chunk_rays);
            }
            const std::size_t step_index = result.optimizer.step + 1;
            if (!std::isfinite(lg.loss)) {
                throw DivergenceError("training diverged: non-finite loss at step " +
                                          std::to_string(step_index) + " (epoch " +
                                          std::to_string(epoch + 1) + ")",
                                      step_index);
            }
            adam_step(result.optimizer, result.params, lg.grads, cfg.adam);
            result.history.step_loss.push_back(lg.loss);
            weighted_loss += lg.loss * static_cast<double>(count);
        }

        const double mean = weighted_loss / static_cast<double>(order.size());
        result.history.epoch_mean_loss.push_back(mean);
        result.optimizer.lr = scheduled_lr(cfg, epoch + 1);

        if (observer) {
            EpochReport report;
            report.epoch = epoch + 1;
            report.mean_loss = mean;
            report.lr_used = lr_used;
            report.next_lr = result.optimizer.lr;
            report.steps = result.optimizer.step;
            report.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            observer(report, result.params);
        }
    }
    return result;
}

std::string loss_history_csv(const LossHistory& history) {
    std::ostringstream os;
    os.precision(17);
    os << "epoch,mean_loss\n";
    for (std::size_t i = 0; i < history.epoch_mean_loss.size(); ++i) {
        os << (i + 1) << ',' << history.epoch_mean_loss[i] << '\n';
    }
    return os.str();
}

}  // namespace flametomo
