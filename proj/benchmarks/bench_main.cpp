#include <benchmark/benchmark.h>

#include "ffcubes/counting.hpp"
#include "ffcubes/delta.hpp"
#include "ffcubes/dualform.hpp"
#include "ffcubes/expsums.hpp"
#include "ffcubes/laurent.hpp"

using namespace ffc;

namespace {

std::vector<Poly> ones(const Field* f, int n) { return std::vector<Poly>(static_cast<size_t>(n), Poly::constant(f, 1)); }

void BM_CountM(benchmark::State& st) {
  auto f = Field::of_order(2);
  const int B = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(count_M(f.get(), B).value);
}
BENCHMARK(BM_CountM)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_CountN(benchmark::State& st) {
  auto f = Field::of_order(5);
  DiagonalForm F(f, ones(f.get(), 4));
  const auto m = static_cast<CountMethod>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(count_N(F, 2, m).value);
  st.SetLabel(to_string(m));
}
BENCHMARK(BM_CountN)->Arg(static_cast<int>(CountMethod::exhaustive))->Arg(static_cast<int>(CountMethod::mitm))
    ->Unit(benchmark::kMillisecond);

void BM_RamanujanClosedVsBrute(benchmark::State& st) {
  auto f = Field::of_order(5);
  const Poly w = parse_poly("t^2+2", f.get()), a = parse_poly("t+1", f.get());
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) ? ramanujan_sum_brute(a, w, 2) : ramanujan_sum(a, w, 2));
  st.SetLabel(st.range(0) ? "brute" : "closed");
}
BENCHMARK(BM_RamanujanClosedVsBrute)->Arg(0)->Arg(1);

void BM_SrBox(benchmark::State& st) {
  auto f = Field::of_order(5);
  DiagonalForm F(f, ones(f.get(), 4));
  const Poly r = parse_poly("t^2", f.get());
  std::vector<std::vector<Poly>> cands(4, polys_below(f.get(), 1));
  for (auto _ : st) benchmark::DoNotOptimize(S_r_box(F, r, cands));
}
BENCHMARK(BM_SrBox)->Unit(benchmark::kMillisecond);

void BM_DualSquare(benchmark::State& st) {
  auto f = Field::of_order(7);
  DiagonalForm F(f, {parse_poly("1", f.get()), parse_poly("t", f.get()), parse_poly("2", f.get()),
                     parse_poly("t+3", f.get())});
  std::vector<Poly> c{parse_poly("t+1", f.get()), parse_poly("2*t", f.get()), parse_poly("3", f.get()),
                      parse_poly("t+5", f.get())};
  for (auto _ : st) benchmark::DoNotOptimize(dual_square(F, c));
}
BENCHMARK(BM_DualSquare);

void BM_FareyDissect(benchmark::State& st) {
  auto f = Field::of_order(3, FieldOptions{true});
  const int Q = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(farey_dissect(f.get(), Q).size());
}
BENCHMARK(BM_FareyDissect)->DenseRange(2, 4);

void BM_DeltaVerify(benchmark::State& st) {
  auto f = Field::of_order(2);
  DiagonalForm F(f, ones(f.get(), 2));
  DeltaConfig cfg(F, parse_poly("t^2", f.get()));
  for (auto _ : st) benchmark::DoNotOptimize(delta_verify(cfg).equal);
}
BENCHMARK(BM_DeltaVerify)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
