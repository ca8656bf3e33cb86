#include <filesystem>

#include <benchmark/benchmark.h>

#include "pentestxx/engine/session.hpp"

using namespace pentestxx;

namespace {

// A whole simulated engagement, recon to report, with every gate auto-granted.
void BM_SimRun(benchmark::State& st, const char* fixture) {
  const auto ws = std::filesystem::path(PENTESTXX_BENCH_TMP) / fixture;
  for (auto _ : st) {
    st.PauseTiming();
    std::filesystem::remove_all(ws);
    st.ResumeTiming();
    engine::EngineConfig cfg;
    cfg.fixture = fixture;
    cfg.auto_approve = true;
    cfg.workspace = ws;
    auto s = engine::make_session(cfg);
    s->run();
    if (s->status() != engine::SessionStatus::completed) st.SkipWithError("session did not complete");
  }
}
BENCHMARK_CAPTURE(BM_SimRun, vm1, "vm1")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimRun, vm2, "vm2")->Unit(benchmark::kMillisecond);

}  // namespace
