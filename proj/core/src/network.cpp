#include "flametomo/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "flametomo/error.hpp"

namespace flametomo {

std::vector<LayerShape> NetworkShape::layers() const {
    std::vector<LayerShape> out;
    int prev = input_dim;
    for (int i = 0; i < hidden_layers; ++i) {
        const int in = (i == skip_layer) ? prev + input_dim : prev;
        out.push_back({in, hidden_width});
        prev = hidden_width;
    }
    for (int w : reduce_widths) {
        out.push_back({prev, w});
        prev = w;
    }
    out.push_back({prev, 1});
    return out;
}

void NetworkShape::validate() const {
    if (input_dim < 1 || hidden_width < 1 || hidden_layers < 1) {
        throw ValidationError("network dimensions must be positive");
    }
    if (skip_layer < 1 || skip_layer >= hidden_layers) {
        throw ValidationError("network skip_layer must lie in [1, hidden_layers)");
    }
    for (int w : reduce_widths) {
        if (w < 1) throw ValidationError("network reduce widths must be positive");
    }
}

template <typename Scalar>
std::size_t NetworkParamsT<Scalar>::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

template <typename Scalar>
bool NetworkParamsT<Scalar>::all_finite() const {
    return std::all_of(layers.begin(), layers.end(), [](const DenseLayer<Scalar>& l) {
        return l.weight.allFinite() && l.bias.allFinite();
    });
}

template <typename Scalar>
GradientSetT<Scalar> GradientSetT<Scalar>::zeros(const NetworkShape& shape) {
    GradientSetT g;
    for (const LayerShape& s : shape.layers()) {
        g.layers.push_back({MatrixX<Scalar>::Zero(s.out, s.in), VectorX<Scalar>::Zero(s.out)});
    }
    return g;
}

template <typename Scalar>
void GradientSetT<Scalar>::set_zero() {
    for (auto& l : layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
}

template <typename Scalar>
bool GradientSetT<Scalar>::all_finite() const {
    return std::all_of(layers.begin(), layers.end(), [](const DenseLayer<Scalar>& l) {
        return l.weight.allFinite() && l.bias.allFinite();
    });
}

template <typename Scalar>
double GradientSetT<Scalar>::max_abs() const {
    double m = 0.0;
    for (const auto& l : layers) {
        if (l.weight.size() > 0) m = std::max(m, static_cast<double>(l.weight.cwiseAbs().maxCoeff()));
        if (l.bias.size() > 0) m = std::max(m, static_cast<double>(l.bias.cwiseAbs().maxCoeff()));
    }
    return m;
}

template <typename Scalar>
GradientSetT<Scalar>& GradientSetT<Scalar>::operator+=(const GradientSetT& other) {
    if (other.layers.size() != layers.size()) throw ValidationError("gradient shape mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].weight += other.layers[i].weight;
        layers[i].bias += other.layers[i].bias;
    }
    return *this;
}

template <typename Scalar>
GradientSetT<Scalar>& GradientSetT<Scalar>::operator*=(Scalar s) {
    for (auto& l : layers) {
        l.weight *= s;
        l.bias *= s;
    }
    return *this;
}

template struct NetworkParamsT<double>;
template struct NetworkParamsT<float>;
template struct GradientSetT<double>;
template struct GradientSetT<float>;

NetworkParams zero_params(const NetworkShape& shape, const EncodingConfig& encoding) {
    shape.validate();
    encoding.validate();
    if (shape.input_dim != encoding.output_dim()) {
        throw ValidationError("network input_dim " + std::to_string(shape.input_dim) +
                              " does not match encoding width " +
                              std::to_string(encoding.output_dim()));
    }
    NetworkParams p;
    p.encoding = encoding;
    p.shape = shape;
    for (const LayerShape& s : shape.layers()) {
        p.layers.push_back({MatrixX<double>::Zero(s.out, s.in), VectorX<double>::Zero(s.out)});
    }
    return p;
}

NetworkParams init_params(std::uint64_t seed, const NetworkShape& shape,
                          const EncodingConfig& encoding) {
    NetworkParams p = zero_params(shape, encoding);
    std::mt19937_64 rng(seed);
    for (auto& layer : p.layers) {
        const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        // Fill row by row so the draw order does not depend on storage order.
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
        }
    }
    return p;
}

namespace {

template <typename Scalar>
void check_shapes(const NetworkParamsT<Scalar>& params) {
    const auto shapes = params.shape.layers();
    if (shapes.size() != params.layers.size()) {
        throw ValidationError("network layer count does not match its shape");
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto& l = params.layers[i];
        if (l.weight.rows() != shapes[i].out || l.weight.cols() != shapes[i].in ||
            l.bias.size() != shapes[i].out) {
            throw ValidationError("network layer " + std::to_string(i) + " has wrong shape");
        }
    }
}

}  // namespace

template <typename Scalar>
void forward(const NetworkParamsT<Scalar>& params, const MatrixX<Scalar>& encoded,
             ForwardCache<Scalar>& cache) {
    check_shapes(params);
    if (encoded.rows() != params.shape.input_dim) {
        throw ValidationError("encoded batch has " + std::to_string(encoded.rows()) +
                              " rows, network expects " + std::to_string(params.shape.input_dim));
    }
    if (!encoded.allFinite()) throw ValidationError("encoded batch contains non-finite values");

    const std::size_t n_layers = params.layers.size();
    const auto skip = static_cast<std::size_t>(params.shape.skip_layer);
    const Eigen::Index batch = encoded.cols();
    const Eigen::Index padded = (batch + kColumnBlock - 1) / kColumnBlock * kColumnBlock;
    cache.batch = batch;
    cache.inputs.resize(n_layers);
    MatrixX<Scalar>& input = cache.inputs[0];
    input.resize(encoded.rows(), padded);
    input.leftCols(batch) = encoded;
    input.rightCols(padded - batch).setZero();
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto& layer = params.layers[l];
        MatrixX<Scalar> z = layer.weight * cache.inputs[l];
        z.colwise() += layer.bias;
        z = z.cwiseMax(Scalar(0));
        if (l + 1 == n_layers) {
            cache.padded_output = z.row(0);
        } else if (l + 1 == skip) {
            MatrixX<Scalar>& next = cache.inputs[l + 1];
            next.resize(input.rows() + z.rows(), z.cols());
            next.topRows(input.rows()) = input;
            next.bottomRows(z.rows()) = z;
        } else {
            cache.inputs[l + 1] = std::move(z);
        }
    }
}

template <typename Scalar>
RowVectorX<Scalar> forward(const NetworkParamsT<Scalar>& params, const MatrixX<Scalar>& encoded) {
    ForwardCache<Scalar> cache;
    forward(params, encoded, cache);
    return cache.output();
}

template <typename Scalar>
void backward_accumulate(const NetworkParamsT<Scalar>& params, const ForwardCache<Scalar>& cache,
                         const RowVectorX<Scalar>& cotangent, GradientSetT<Scalar>& grads,
                         MatrixX<Scalar>* input_grad) {
    const std::size_t n_layers = params.layers.size();
    if (cache.inputs.size() != n_layers || grads.layers.size() != n_layers) {
        throw ValidationError("backward: cache or gradient set does not match the network");
    }
    const Eigen::Index batch = cache.batch;
    const Eigen::Index padded = cache.inputs[0].cols();
    if (cotangent.size() != batch || cache.padded_output.size() != padded) {
        throw ValidationError("backward: cotangent length does not match the batch");
    }
    const auto skip = static_cast<std::size_t>(params.shape.skip_layer);
    const Eigen::Index input_dim = params.shape.input_dim;

    MatrixX<Scalar> d_input;
    if (input_grad) d_input.setZero(input_dim, padded);

    // d holds the gradient with respect to the current layer's output.
    MatrixX<Scalar> d = MatrixX<Scalar>::Zero(1, padded);
    d.leftCols(batch) = cotangent;
    for (std::size_t l = n_layers; l-- > 0;) {
        const auto& layer = params.layers[l];
        if (l + 1 == n_layers) {
            d.array() *= (cache.padded_output.array() > Scalar(0)).template cast<Scalar>();
        } else if (l + 1 == skip) {
            d.array() *=
                (cache.inputs[l + 1].bottomRows(d.rows()).array() > Scalar(0)).template cast<Scalar>();
        } else {
            d.array() *= (cache.inputs[l + 1].array() > Scalar(0)).template cast<Scalar>();
        }
        grads.layers[l].weight.noalias() += d * cache.inputs[l].transpose();
        grads.layers[l].bias += d.rowwise().sum();
        if (l == 0 && !input_grad) break;

        MatrixX<Scalar> d_in = layer.weight.transpose() * d;
        if (l == 0) {
            d_input += d_in;
        } else if (l == skip) {
            if (input_grad) d_input += d_in.topRows(input_dim);
            d = d_in.bottomRows(d_in.rows() - input_dim);
        } else {
            d = std::move(d_in);
        }
    }
    if (input_grad) *input_grad = d_input.leftCols(batch);
}

template <typename Scalar>
GradientSetT<Scalar> backward(const NetworkParamsT<Scalar>& params,
                              const ForwardCache<Scalar>& cache,
                              const RowVectorX<Scalar>& cotangent, MatrixX<Scalar>* input_grad) {
    auto grads = GradientSetT<Scalar>::zeros(params.shape);
    backward_accumulate(params, cache, cotangent, grads, input_grad);
    return grads;
}

#define FLAMETOMO_INSTANTIATE(S)                                                              \
    template void forward<S>(const NetworkParamsT<S>&, const MatrixX<S>&, ForwardCache<S>&); \
    template RowVectorX<S> forward<S>(const NetworkParamsT<S>&, const MatrixX<S>&);          \
    template void backward_accumulate<S>(const NetworkParamsT<S>&, const ForwardCache<S>&,   \
                                         const RowVectorX<S>&, GradientSetT<S>&,            \
                                         MatrixX<S>*);                                       \
    template GradientSetT<S> backward<S>(const NetworkParamsT<S>&, const ForwardCache<S>&,   \
                                         const RowVectorX<S>&, MatrixX<S>*);

FLAMETOMO_INSTANTIATE(double)
FLAMETOMO_INSTANTIATE(float)
#undef FLAMETOMO_INSTANTIATE

std::vector<double> evaluate_points(const NetworkParams& params, std::span<const Vec3> points,
                                    std::size_t chunk) {
    std::vector<double> out(points.size());
    MatrixX<double> enc;
    ForwardCache<double> cache;
    for (std::size_t start = 0; start < points.size(); start += chunk) {
        const std::size_t n = std::min(chunk, points.size() - start);
        encode_batch(points.subspan(start, n), params.encoding, enc);
        forward(params, enc, cache);
        const auto values = cache.output();
        for (std::size_t i = 0; i < n; ++i) out[start + i] = values(static_cast<Eigen::Index>(i));
    }
    return out;
}

double evaluate_point(const NetworkParams& params, const Vec3& point) {
    return evaluate_points(params, std::span<const Vec3>(&point, 1)).front();
}

}  // namespace flametomo
