#include "flametomo/render.hpp"

#include <cmath>
#include <thread>

#include "flametomo/error.hpp"

namespace flametomo {

double render_ray(const NetworkParams& params, const Ray& ray, const SamplingConfig& cfg) {
    const std::vector<Vec3> points = sample_ray(ray, cfg);
    const std::vector<double> values = evaluate_points(params, points);
    return ray_quadrature(values, cfg.step());
}

ProjectionImage render_image(const NetworkParams& params, const CameraModel& camera,
                             const SamplingConfig& cfg) {
    cfg.validate();
    ProjectionImage img;
    img.camera_id = camera.id;
    img.width = camera.width;
    img.height = camera.height;
    img.values.resize(static_cast<std::size_t>(camera.width) * camera.height);

    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(camera.id)));
    const auto n = static_cast<std::size_t>(cfg.count);
    for (int v = 0; v < camera.height; ++v) {
        std::vector<Vec3> points;
        points.reserve(n * static_cast<std::size_t>(camera.width));
        for (int u = 0; u < camera.width; ++u) {
            const Ray ray = generate_ray(camera, u, v, cfg);
            for (double s : sample_distances(cfg, rng)) points.push_back(ray.at(s));
        }
        const std::vector<double> values = evaluate_points(params, points);
        for (int u = 0; u < camera.width; ++u) {
            img.at(u, v) = ray_quadrature(
                std::span<const double>(values).subspan(static_cast<std::size_t>(u) * n, n),
                cfg.step());
        }
    }
    return img;
}

namespace {

template <typename Scalar>
struct ChunkResult {
    double loss_sum = 0.0;  // sum of squared residuals
    GradientSetT<Scalar> grads;
};

template <typename Scalar>
void evaluate_chunk(const NetworkParamsT<Scalar>& params, std::span<const RaySample> rays,
                    std::span<const double> distances, int samples_per_ray, double step,
                    double inv_batch, ChunkResult<Scalar>& out) {
    const auto n = static_cast<std::size_t>(samples_per_ray);
    std::vector<Vec3> points;
    points.reserve(rays.size() * n);
    for (std::size_t r = 0; r < rays.size(); ++r) {
        for (std::size_t i = 0; i < n; ++i) points.push_back(rays[r].ray.at(distances[r * n + i]));
    }
    MatrixX<Scalar> encoded;
    encode_batch(std::span<const Vec3>(points), params.encoding, encoded);
    ForwardCache<Scalar> cache;
    forward(params, encoded, cache);
    const auto outputs = cache.output();

    RowVectorX<Scalar> cotangent(static_cast<Eigen::Index>(points.size()));
    std::vector<double> values(n);
    for (std::size_t r = 0; r < rays.size(); ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = static_cast<double>(outputs(static_cast<Eigen::Index>(r * n + i)));
        }
        const double residual = ray_quadrature(values, step) - rays[r].target;
        out.loss_sum += residual * residual;
        const auto g = static_cast<Scalar>(2.0 * residual * inv_batch * step);
        cotangent.segment(static_cast<Eigen::Index>(r * n), static_cast<Eigen::Index>(n))
            .setConstant(g);
    }
    out.grads = GradientSetT<Scalar>::zeros(params.shape);
    backward_accumulate(params, cache, cotangent, out.grads);
}

}  // namespace

template <typename Scalar>
LossAndGradient evaluate_batch(const NetworkParamsT<Scalar>& params,
                               std::span<const RaySample> batch,
                               std::span<const double> distances, int samples_per_ray,
                               double step, int workers, int chunk_rays) {
    if (batch.empty()) throw ValidationError("batch must not be empty");
    if (samples_per_ray < 1 || chunk_rays < 1) throw ValidationError("invalid chunking");
    const auto n = static_cast<std::size_t>(samples_per_ray);
    if (distances.size() != batch.size() * n) {
        throw ValidationError("sample distances do not match the batch");
    }
    for (const RaySample& rs : batch) {
        if (!std::isfinite(rs.target)) throw ValidationError("non-finite projection target");
    }

    const auto chunk = static_cast<std::size_t>(chunk_rays);
    const std::size_t n_chunks = (batch.size() + chunk - 1) / chunk;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    std::vector<ChunkResult<Scalar>> results(n_chunks);

    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * chunk;
        const std::size_t count = std::min(chunk, batch.size() - begin);
        evaluate_chunk(params, batch.subspan(begin, count), distances.subspan(begin * n, count * n),
                       samples_per_ray, step, inv_batch, results[c]);
    };

    const std::size_t n_workers =
        std::min<std::size_t>(n_chunks, static_cast<std::size_t>(std::max(workers, 1)));
    if (n_workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t c = w; c < n_chunks; c += n_workers) run_chunk(c);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    LossAndGradient total;
    total.grads = GradientSet::zeros(params.shape);
    double loss_sum = 0.0;
    for (auto& r : results) {
        loss_sum += r.loss_sum;
        if constexpr (std::is_same_v<Scalar, double>) {
            total.grads += r.grads;
        } else {
            for (std::size_t l = 0; l < total.grads.layers.size(); ++l) {
                total.grads.layers[l].weight += r.grads.layers[l].weight.template cast<double>();
                total.grads.layers[l].bias += r.grads.layers[l].bias.template cast<double>();
            }
        }
    }
    total.loss = loss_sum * inv_batch;
    return total;
}

template LossAndGradient evaluate_batch<double>(const NetworkParamsT<double>&,
                                                std::span<const RaySample>,
                                                std::span<const double>, int, double, int, int);
template LossAndGradient evaluate_batch<float>(const NetworkParamsT<float>&,
                                               std::span<const RaySample>,
                                               std::span<const double>, int, double, int, int);

LossAndGradient batch_loss(const NetworkParams& params, std::span<const RaySample> batch,
                           const SamplingConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    std::vector<double> distances;
    distances.reserve(batch.size() * static_cast<std::size_t>(cfg.count));
    for (std::size_t r = 0; r < batch.size(); ++r) {
        const auto s = sample_distances(cfg, rng);
        distances.insert(distances.end(), s.begin(), s.end());
    }
    return evaluate_batch(params, batch, distances, cfg.count, cfg.step());
}

LossAndGradient batch_loss(const NetworkParams& params, std::span<const RaySample> batch,
                           const SamplingConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    return batch_loss(params, batch, cfg, rng);
}

}  // namespace flametomo
