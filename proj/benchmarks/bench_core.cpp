#include <benchmark/benchmark.h>

#include "qrocket/lander.hpp"
#include "qrocket/mlp.hpp"
#include "qrocket/rng.hpp"
#include "qrocket/statevector.hpp"
#include "qrocket/vqc.hpp"

using namespace qrocket;

static void BM_GateApply(benchmark::State& state) {
  const int qubits = static_cast<int>(state.range(0));
  auto sv = quantum::new_zero_state(qubits);
  const auto rx = quantum::Gate::rx(qubits / 2, 0.37);
  const auto cz = quantum::Gate::cz(0, qubits - 1);
  for (auto _ : state) {
    sv.apply(rx);
    sv.apply(cz);
    benchmark::DoNotOptimize(sv.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_GateApply)->Arg(4)->Arg(8)->Arg(12);

static void BM_VqcForward(benchmark::State& state) {
  Rng rng(1);
  const auto params = vqc::PolicyParams::random_init(static_cast<int>(state.range(0)), rng);
  const auto feats = vqc::encode({0.3, 4.0, -0.2, -1.1, 0.05, 0.0, 0.0, 1.0});
  for (auto _ : state) {
    auto q = vqc::forward(params, feats);
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_VqcForward)->Arg(1)->Arg(5)->Arg(10);

static void BM_VqcParameterShiftGrad(benchmark::State& state) {
  Rng rng(2);
  const auto params = vqc::PolicyParams::random_init(static_cast<int>(state.range(0)), rng);
  const auto feats = vqc::encode({0.3, 4.0, -0.2, -1.1, 0.05, 0.0, 1.0, 0.0});
  const std::array<double, 4> dq{0.5, -0.25, 1.0, 0.1};
  for (auto _ : state) {
    auto g = vqc::parameter_shift_grad(params, feats, dq);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_VqcParameterShiftGrad)->Arg(1)->Arg(5)->Arg(10);

static void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng(3);
  auto net = nets::Mlp::xavier({8, 64, 64, 64, 4}, rng);
  const std::vector<double> input{0.1, -0.4, 2.0, 0.3, -0.1, 0.0, 1.0, 0.0};
  const std::vector<double> dloss{1.0, 0.0, -0.5, 0.25};
  for (auto _ : state) {
    nets::ForwardCache cache;
    auto out = nets::mlp_forward(net, input, &cache);
    benchmark::DoNotOptimize(out.data());
    auto grads = nets::mlp_backward(net, cache, dloss);
    benchmark::DoNotOptimize(grads.data());
  }
}
BENCHMARK(BM_MlpForwardBackward);

static void BM_EnvStep(benchmark::State& state) {
  env::LanderEnv env;
  env.reset(1);
  Rng actions(2);
  for (auto _ : state) {
    if (env.done()) env.reset(actions.next_u64());
    auto r = env.step(static_cast<env::Action>(actions.uniform_int(4)));
    benchmark::DoNotOptimize(r.reward);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep);

BENCHMARK_MAIN();
