#include "flametomo/gradcheck.hpp"

#include <cmath>
#include <random>

#include "flametomo/camera.hpp"
#include "flametomo/error.hpp"
#include "flametomo/render.hpp"

namespace flametomo {

namespace {

std::vector<bool> activation_pattern(const NetworkParams& params, const MatrixX<double>& encoded) {
    ForwardCache<double> cache;
    forward(params, encoded, cache);
    std::vector<bool> out;
    const auto skip = static_cast<std::size_t>(params.shape.skip_layer);
    for (std::size_t l = 1; l < cache.inputs.size(); ++l) {
        const MatrixX<double>& in = cache.inputs[l];
        const Eigen::Index skip_rows = l == skip ? params.shape.input_dim : 0;
        for (Eigen::Index c = 0; c < cache.batch; ++c) {
            for (Eigen::Index r = skip_rows; r < in.rows(); ++r) out.push_back(in(r, c) > 0.0);
        }
    }
    for (Eigen::Index c = 0; c < cache.batch; ++c) out.push_back(cache.padded_output(c) > 0.0);
    return out;
}

NetworkParams displaced(const NetworkParams& base, const GradientSet& dir, double h) {
    NetworkParams p = base;
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        p.layers[l].weight += h * dir.layers[l].weight;
        p.layers[l].bias += h * dir.layers[l].bias;
    }
    return p;
}

double dot(const GradientSet& a, const GradientSet& b) {
    double s = 0.0;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        s += a.layers[l].weight.cwiseProduct(b.layers[l].weight).sum();
        s += a.layers[l].bias.dot(b.layers[l].bias);
    }
    return s;
}

}  // namespace

GradcheckReport gradient_check(const GradcheckConfig& cfg) {
    if (cfg.directions < 1) throw ValidationError("gradcheck: directions must be >= 1");
    if (!(cfg.step > 0.0)) throw ValidationError("gradcheck: step must be positive");
    if (cfg.image_size < 1) throw ValidationError("gradcheck: image_size must be >= 1");

    EncodingConfig encoding;
    NetworkShape shape = cfg.shape;
    shape.input_dim = encoding.output_dim();
    NetworkParams params = init_params(cfg.seed, shape, encoding);
    std::mt19937_64 rng(cfg.seed ^ 0x5DEECE66DULL);
    // Positive biases keep most units, and the head, away from the flat side.
    std::uniform_real_distribution<double> bias(0.05, 0.2);
    for (auto& layer : params.layers) {
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = bias(rng);
    }

    RigConfig rig;
    rig.camera_count = 2;
    rig.angular_spacing_deg = 90.0;
    rig.width = rig.image_height = cfg.image_size;
    rig.fx = rig.fy = cfg.image_size * 4.0;
    rig.cx = rig.cy = cfg.image_size / 2.0;
    SamplingConfig sampling = default_sampling_for(rig);
    sampling.mode = SamplingMode::DeterministicMidpoint;

    std::vector<RaySample> batch;
    std::vector<Vec3> points;
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    const std::vector<double> distances = sample_distances(sampling);
    for (const CameraModel& cam : build_rig(rig)) {
        for (int v = 0; v < cam.height; ++v) {
            for (int u = 0; u < cam.width; ++u) {
                const Ray ray = generate_ray(cam, u, v, sampling);
                batch.push_back({ray, render_ray(params, ray, sampling) * scale(rng)});
                for (double s : distances) points.push_back(ray.at(s));
            }
        }
    }
    MatrixX<double> encoded;
    encode_batch<double>(points, encoding, encoded);

    const LossAndGradient base = batch_loss(params, batch, sampling);
    GradcheckReport report;
    report.parameter_count = params.parameter_count();
    report.rays = batch.size();
    report.loss = base.loss;

    const std::vector<bool> pattern = activation_pattern(params, encoded);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double sum = 0.0;
    for (int d = 0; d < cfg.directions; ++d) {
        GradientSet dir = GradientSet::zeros(shape);
        double norm2 = 0.0;
        for (auto& l : dir.layers) {
            for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
                for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = gauss(rng);
            }
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = gauss(rng);
            norm2 += l.weight.squaredNorm() + l.bias.squaredNorm();
        }
        dir *= 1.0 / std::sqrt(norm2);

        double h = cfg.step;
        NetworkParams plus = displaced(params, dir, h);
        NetworkParams minus = displaced(params, dir, -h);
        int halvings = 0;
        while (halvings < 30 && (activation_pattern(plus, encoded) != pattern ||
                                 activation_pattern(minus, encoded) != pattern)) {
            h *= 0.5;
            ++halvings;
            plus = displaced(params, dir, h);
            minus = displaced(params, dir, -h);
        }
        if (halvings > 0) ++report.reduced_steps;

        DirectionCheck check;
        check.step = h;
        check.backprop = dot(base.grads, dir);
        check.finite_difference =
            (batch_loss(plus, batch, sampling).loss - batch_loss(minus, batch, sampling).loss) /
            (2.0 * h);
        const double denom = std::max({std::abs(check.backprop), std::abs(check.finite_difference),
                                       1e-300});
        check.relative_error = std::abs(check.backprop - check.finite_difference) / denom;
        report.max_relative_error = std::max(report.max_relative_error, check.relative_error);
        sum += check.relative_error;
        report.checks.push_back(check);
    }
    report.mean_relative_error = sum / cfg.directions;
    return report;
}

}  // namespace flametomo
