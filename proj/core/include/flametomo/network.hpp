#pragma once

#include <cstdint>
#include <vector>

#include "flametomo/encoding.hpp"
#include "flametomo/types.hpp"

namespace flametomo {

struct LayerShape {
    int in = 0;
    int out = 0;
    bool operator==(const LayerShape&) const = default;
};

// Fully connected temperature network. `hidden_layers` rectified layers of
// `hidden_width`; hidden layer `skip_layer` (0-based) receives the encoded
// input concatenated with the previous layer's activations, [input; h].
// Then rectified reduction layers and a rectified scalar head.
struct NetworkShape {
    int input_dim = 33;
    int hidden_width = 256;
    int hidden_layers = 6;
    int skip_layer = 4;
    std::vector<int> reduce_widths{128, 64};

    std::vector<LayerShape> layers() const;
    void validate() const;

    bool operator==(const NetworkShape&) const = default;
};

template <typename Scalar>
struct DenseLayer {
    MatrixX<Scalar> weight;  // out x in
    VectorX<Scalar> bias;    // out
};

template <typename Scalar>
struct NetworkParamsT {
    EncodingConfig encoding;
    NetworkShape shape;
    std::vector<DenseLayer<Scalar>> layers;

    std::size_t parameter_count() const;
    bool all_finite() const;

    template <typename To>
    NetworkParamsT<To> cast() const {
        NetworkParamsT<To> out;
        out.encoding = encoding;
        out.shape = shape;
        out.layers.reserve(layers.size());
        for (const auto& l : layers) {
            out.layers.push_back({l.weight.template cast<To>(), l.bias.template cast<To>()});
        }
        return out;
    }
};

// One gradient block per parameter block, same shapes.
template <typename Scalar>
struct GradientSetT {
    std::vector<DenseLayer<Scalar>> layers;

    static GradientSetT zeros(const NetworkShape& shape);
    void set_zero();
    bool all_finite() const;
    double max_abs() const;
    GradientSetT& operator+=(const GradientSetT& other);
    GradientSetT& operator*=(Scalar s);
};

using NetworkParams = NetworkParamsT<double>;
using GradientSet = GradientSetT<double>;

// Per-layer inputs kept from a forward pass for the backward pass. Batches
// are zero-padded to a multiple of kColumnBlock columns so that every point
// goes through the same matrix-product kernel whatever the batch size; this
// keeps batched and single-point evaluation bit-identical. The block must be
// wide enough that Eigen never switches a product to its coefficient-based
// path (taken when rows + cols + depth < 20), which sums in another order.
inline constexpr Eigen::Index kColumnBlock = 32;

template <typename Scalar>
struct ForwardCache {
    std::vector<MatrixX<Scalar>> inputs;  // inputs[l] feeds layer l (padded)
    RowVectorX<Scalar> padded_output;     // rectified head incl. padding
    Eigen::Index batch = 0;

    auto output() const { return padded_output.head(batch); }
};

// Deterministic fan-in scaled uniform weights U(-sqrt(6/fan_in), +sqrt(6/fan_in)),
// zero biases.
NetworkParams init_params(std::uint64_t seed, const NetworkShape& shape = {},
                          const EncodingConfig& encoding = {});

// All-zero parameters of the given shape.
NetworkParams zero_params(const NetworkShape& shape = {}, const EncodingConfig& encoding = {});

// Evaluates the network on `encoded` (input_dim x B, one point per column).
// Throws ValidationError on shape mismatch or non-finite input.
template <typename Scalar>
void forward(const NetworkParamsT<Scalar>& params, const MatrixX<Scalar>& encoded,
             ForwardCache<Scalar>& cache);

template <typename Scalar>
RowVectorX<Scalar> forward(const NetworkParamsT<Scalar>& params, const MatrixX<Scalar>& encoded);

// Adds the gradient of sum_b cotangent_b * output_b to `grads`. The rectifier
// derivative at zero is taken as zero. When `input_grad` is non-null it
// receives d/d(encoded) (input_dim x B).
template <typename Scalar>
void backward_accumulate(const NetworkParamsT<Scalar>& params, const ForwardCache<Scalar>& cache,
                         const RowVectorX<Scalar>& cotangent, GradientSetT<Scalar>& grads,
                         MatrixX<Scalar>* input_grad = nullptr);

template <typename Scalar>
GradientSetT<Scalar> backward(const NetworkParamsT<Scalar>& params,
                              const ForwardCache<Scalar>& cache,
                              const RowVectorX<Scalar>& cotangent,
                              MatrixX<Scalar>* input_grad = nullptr);

// Convenience: encode the points and evaluate in chunks.
std::vector<double> evaluate_points(const NetworkParams& params, std::span<const Vec3> points,
                                    std::size_t chunk = 4096);
double evaluate_point(const NetworkParams& params, const Vec3& point);

}  // namespace flametomo
