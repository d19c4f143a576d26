#include <cfv/pipeline/pipeline.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace cfv;

void run_scenario(benchmark::State& state, const std::string& dir, unsigned width) {
  pipeline::RunConfig cfg;
  cfg.old_dir = dir + "/old";
  cfg.new_dir = dir + "/new";
  cfg.tests_dir = dir + "/tests";
  cfg.int_width = width;
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::run_pipeline(cfg));
}

void BM_RenameScenario(benchmark::State& state) {
  run_scenario(state, CFV_CORPUS_DIR "/scenarios/rename", 32);
}
BENCHMARK(BM_RenameScenario)->Unit(benchmark::kMillisecond);

void BM_Minivec(benchmark::State& state) {
  run_scenario(state, CFV_CORPUS_DIR "/minivec", static_cast<unsigned>(state.range(0)));
}
BENCHMARK(BM_Minivec)->Arg(8)->Arg(32)->Unit(benchmark::kSecond)->Iterations(1);

} // namespace
