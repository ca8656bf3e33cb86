#include <benchmark/benchmark.h>

#include "pentestxx/netcalc/netcalc.hpp"

using namespace pentestxx;

namespace {

void BM_Enumerate(benchmark::State& st) {
  auto subnet = netcalc::parse_cidr("10.0.0.0/" + std::to_string(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(netcalc::enumerate_hosts(subnet));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(netcalc::host_count(subnet)));
}
BENCHMARK(BM_Enumerate)->Arg(24)->Arg(20)->Arg(16);

void BM_ParseCidr(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(netcalc::parse_cidr("192.168.1.77/24"));
}
BENCHMARK(BM_ParseCidr);

}  // namespace
