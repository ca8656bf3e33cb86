#include <benchmark/benchmark.h>

#include "pentestxx/common/md5.hpp"

namespace {

void BM_Md5(benchmark::State& st) {
  std::string data(static_cast<std::size_t>(st.range(0)), 'x');
  for (auto _ : st) benchmark::DoNotOptimize(pentestxx::md5_hex(data));
  st.SetBytesProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Md5)->Arg(7)->Arg(1024)->Arg(1 << 20);

}  // namespace
