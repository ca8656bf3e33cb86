#include <fstream>
#include <sstream>

#include <benchmark/benchmark.h>

#include "pentestxx/toolio/parsers.hpp"

using namespace pentestxx::toolio;

namespace {

std::string golden(const char* name) {
  std::ifstream in(std::string(PENTESTXX_GOLDEN_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Repeats a golden file so the parser sees a few hundred KB.
ToolOutput scaled(const char* name, int copies) {
  auto one = golden(name);
  std::string text;
  for (int i = 0; i < copies; ++i) text += one;
  return {0, text, "", 0.0};
}

void BM_FullScan(benchmark::State& st) {
  auto out = scaled("full_scan_vm2.txt", static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(parse_full_scan(out));
  st.SetBytesProcessed(st.iterations() * static_cast<std::int64_t>(out.stdout_text.size()));
}
BENCHMARK(BM_FullScan)->Arg(1)->Arg(64)->Arg(512);

void BM_PingScan(benchmark::State& st) {
  auto out = scaled("ping_scan.txt", static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(parse_ping_scan(out));
  st.SetBytesProcessed(st.iterations() * static_cast<std::int64_t>(out.stdout_text.size()));
}
BENCHMARK(BM_PingScan)->Arg(1)->Arg(256);

void BM_DirScan(benchmark::State& st) {
  auto out = scaled("dir_scan.txt", static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(parse_dir_scan(out));
  st.SetBytesProcessed(st.iterations() * static_cast<std::int64_t>(out.stdout_text.size()));
}
BENCHMARK(BM_DirScan)->Arg(1)->Arg(256);

void BM_Passwd(benchmark::State& st) {
  auto page = golden("lfi_passwd.html");
  for (auto _ : st) benchmark::DoNotOptimize(parse_passwd(page));
}
BENCHMARK(BM_Passwd);

}  // namespace
