#include <benchmark/benchmark.h>

#include <vector>

#include "gainprint/kernels.hpp"
#include "gainprint/model.hpp"
#include "gainprint/rng.hpp"

using namespace gainprint;

namespace {

std::vector<double> random_vec(std::size_t size, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(size);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

// Second convolution of the default network: 32 -> 64 channels, width 3.
kernels::ConvShape conv2_shape(std::size_t batch) { return {batch, 32, 5, 64, 3}; }

template <kernels::Backend B>
void BM_ConvForward(benchmark::State& state) {
    const auto s = conv2_shape(static_cast<std::size_t>(state.range(0)));
    const auto x = random_vec(s.input_size(), 1), w = random_vec(s.weight_size(), 2), b = random_vec(64, 3);
    std::vector<double> y(s.output_size());
    const kernels::Kernels k{B};
    for (auto _ : state) {
        k.conv1d_forward(s, x, w, b, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.batch));
}

template <kernels::Backend B>
void BM_ConvBackward(benchmark::State& state) {
    const auto s = conv2_shape(static_cast<std::size_t>(state.range(0)));
    const auto x = random_vec(s.input_size(), 1), w = random_vec(s.weight_size(), 2);
    const auto dy = random_vec(s.output_size(), 3);
    std::vector<double> dx(x.size()), dw(w.size()), db(64);
    const kernels::Kernels k{B};
    for (auto _ : state) {
        k.conv1d_backward(s, x, w, dy, dx, dw, db);
        benchmark::DoNotOptimize(dw.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.batch));
}

template <kernels::Backend B>
void BM_DenseForward(benchmark::State& state) {
    const kernels::DenseShape s{static_cast<std::size_t>(state.range(0)), 192, 128};
    const auto x = random_vec(s.batch * s.in, 1), w = random_vec(s.in * s.out, 2), b = random_vec(s.out, 3);
    std::vector<double> y(s.batch * s.out);
    const kernels::Kernels k{B};
    for (auto _ : state) {
        k.dense_forward(s, x, w, b, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.batch));
}

template <kernels::Backend B>
void BM_DenseBackward(benchmark::State& state) {
    const kernels::DenseShape s{static_cast<std::size_t>(state.range(0)), 192, 128};
    const auto x = random_vec(s.batch * s.in, 1), w = random_vec(s.in * s.out, 2);
    const auto dy = random_vec(s.batch * s.out, 3);
    std::vector<double> dx(x.size()), dw(w.size()), db(s.out);
    const kernels::Kernels k{B};
    for (auto _ : state) {
        k.dense_backward(s, x, w, dy, dx, dw, db);
        benchmark::DoNotOptimize(dw.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.batch));
}

template <kernels::Backend B>
void BM_TrainStep(benchmark::State& state) {
    const auto batch = static_cast<std::size_t>(state.range(0));
    model::Model m;
    Rng rng(4);
    model::init_uniform(m, rng);
    const auto input = random_vec(batch * 3 * m.spec.n, 5);
    std::vector<int> labels(batch);
    for (auto& l : labels) l = static_cast<int>(rng.below(6));
    std::vector<double> grads(m.params.size());
    const kernels::Kernels k{B};
    for (auto _ : state) {
        benchmark::DoNotOptimize(model::backward(m, input, labels, batch, grads, k));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}

constexpr auto kSerial = kernels::Backend::Serial;
constexpr auto kParallel = kernels::Backend::Parallel;

}  // namespace

BENCHMARK(BM_ConvForward<kSerial>)->Arg(50)->Arg(500);
BENCHMARK(BM_ConvForward<kParallel>)->Arg(50)->Arg(500);
BENCHMARK(BM_ConvBackward<kSerial>)->Arg(50)->Arg(500);
BENCHMARK(BM_ConvBackward<kParallel>)->Arg(50)->Arg(500);
BENCHMARK(BM_DenseForward<kSerial>)->Arg(50)->Arg(500);
BENCHMARK(BM_DenseForward<kParallel>)->Arg(50)->Arg(500);
BENCHMARK(BM_DenseBackward<kSerial>)->Arg(50)->Arg(500);
BENCHMARK(BM_DenseBackward<kParallel>)->Arg(50)->Arg(500);
BENCHMARK(BM_TrainStep<kSerial>)->Arg(50)->Arg(500);
BENCHMARK(BM_TrainStep<kParallel>)->Arg(50)->Arg(500);

BENCHMARK_MAIN();
