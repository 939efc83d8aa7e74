#include <random>

#include <benchmark/benchmark.h>

#include "flametomo/phantom.hpp"
#include "flametomo/render.hpp"
#include "flametomo/trainer.hpp"

using namespace flametomo;

namespace {

std::vector<Vec3> points(std::size_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-22.5, 22.5);
    std::vector<Vec3> out(n);
    for (auto& p : out) p = Vec3(d(rng), d(rng), d(rng));
    return out;
}

template <typename Scalar>
void BM_Forward(benchmark::State& state) {
    const auto params = init_params(1).cast<Scalar>();
    MatrixX<Scalar> enc;
    encode_batch<Scalar>(points(static_cast<std::size_t>(state.range(0))), EncodingConfig{}, enc);
    ForwardCache<Scalar> cache;
    for (auto _ : state) {
        forward(params, enc, cache);
        benchmark::DoNotOptimize(cache.padded_output.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <typename Scalar>
void BM_ForwardBackward(benchmark::State& state) {
    const auto params = init_params(1).cast<Scalar>();
    MatrixX<Scalar> enc;
    encode_batch<Scalar>(points(static_cast<std::size_t>(state.range(0))), EncodingConfig{}, enc);
    ForwardCache<Scalar> cache;
    auto grads = GradientSetT<Scalar>::zeros(params.shape);
    const RowVectorX<Scalar> cot = RowVectorX<Scalar>::Ones(state.range(0));
    for (auto _ : state) {
        forward(params, enc, cache);
        backward_accumulate(params, cache, cot, grads);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Encode(benchmark::State& state) {
    const auto pts = points(static_cast<std::size_t>(state.range(0)));
    MatrixX<float> enc;
    for (auto _ : state) {
        encode_batch<float>(pts, EncodingConfig{}, enc);
        benchmark::DoNotOptimize(enc.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

// One optimizer batch of rays through the default rig, as in training.
template <typename Scalar>
void BM_TrainingBatch(benchmark::State& state) {
    Dataset ds;
    ds.cameras = build_rig(RigConfig{});
    SamplingConfig q = default_sampling_for(RigConfig{});
    q.mode = SamplingMode::DeterministicMidpoint;
    for (const auto& cam : ds.cameras) ds.images.push_back(forward_project(preset_phantom("single"), cam, q));
    auto rays = build_ray_set(ds);
    rays.resize(static_cast<std::size_t>(state.range(0)));
    std::vector<double> distances;
    const auto s = sample_distances(q);
    for (std::size_t i = 0; i < rays.size(); ++i) distances.insert(distances.end(), s.begin(), s.end());
    const auto params = init_params(1).cast<Scalar>();
    for (auto _ : state) {
        auto lg = evaluate_batch(params, std::span<const RaySample>(rays), distances, q.count, q.step());
        benchmark::DoNotOptimize(lg.loss);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ForwardProject(benchmark::State& state) {
    const CameraModel cam = build_rig(RigConfig{})[0];
    SamplingConfig q = default_sampling_for(RigConfig{});
    q.mode = SamplingMode::DeterministicMidpoint;
    const PhantomSpec spec = preset_phantom("triple");
    for (auto _ : state) benchmark::DoNotOptimize(forward_project(spec, cam, q).values.data());
}

}  // namespace

BENCHMARK(BM_Encode)->Arg(4096);
BENCHMARK_TEMPLATE(BM_Forward, float)->Arg(1)->Arg(64)->Arg(2880);
BENCHMARK_TEMPLATE(BM_Forward, double)->Arg(2880);
BENCHMARK_TEMPLATE(BM_ForwardBackward, float)->Arg(2880);
BENCHMARK_TEMPLATE(BM_ForwardBackward, double)->Arg(2880);
BENCHMARK_TEMPLATE(BM_TrainingBatch, float)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardProject)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
