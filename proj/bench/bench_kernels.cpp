// Serial reference kernels against their OpenMP counterparts, plus the two
// end-to-end paths that use them (k-means and offline augmentation).
//
//   ./build/bench/bench_kernels --benchmark_filter=group_mean
//   OMP_NUM_THREADS=4 ./build/bench/bench_kernels

#include <benchmark/benchmark.h>

#include "ada/augment.hpp"
#include "ada/kernels.hpp"
#include "ada/partition.hpp"

namespace {

using namespace ada;

Matrix random_matrix(Index r, Index c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = rng.normal();
  return m;
}

std::vector<std::size_t> random_labels(std::size_t n, std::size_t q, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> l(n);
  for (auto& v : l) v = rng.uniform_index(q);
  return l;
}

template <Matrix (*F)(std::span<const std::size_t>, std::size_t, const Matrix&)>
void BM_group_mean(benchmark::State& st) {
  const auto n = static_cast<Index>(st.range(0));
  const auto d = static_cast<Index>(st.range(1));
  const Matrix m = random_matrix(n, d, 1);
  const auto labels = random_labels(static_cast<std::size_t>(n), 16, 2);
  for (auto _ : st) benchmark::DoNotOptimize(F(labels, 16, m));
  st.SetItemsProcessed(st.iterations() * n * d);
}

template <void (*F)(const Matrix&, const Matrix&, std::vector<std::size_t>&, Vector&)>
void BM_assign_nearest(benchmark::State& st) {
  const auto n = static_cast<Index>(st.range(0));
  const auto q = static_cast<Index>(st.range(1));
  const Matrix x = random_matrix(n, 8, 3);
  const Matrix c = random_matrix(q, 8, 4);
  std::vector<std::size_t> labels(static_cast<std::size_t>(n));
  Vector d(n);
  for (auto _ : st) {
    F(x, c, labels, d);
    benchmark::DoNotOptimize(d.data());
  }
  st.SetItemsProcessed(st.iterations() * n * q);
}

template <Matrix (*F)(const Matrix&, const Matrix&)>
void BM_dense_apply(benchmark::State& st) {
  const auto n = static_cast<Index>(st.range(0));
  const Matrix pi = random_matrix(n, n, 5);
  const Matrix m = random_matrix(n, 8, 6);
  for (auto _ : st) benchmark::DoNotOptimize(F(pi, m));
  st.SetItemsProcessed(st.iterations() * n * n * 8);
}

void BM_kmeans(benchmark::State& st) {
  const Matrix x = random_matrix(st.range(0), 5, 7);
  for (auto _ : st) {
    benchmark::DoNotOptimize(kmeans(x, KMeansConfig{.q = 8, .seed = 1}).inertia);
  }
}

void BM_offline_augment(benchmark::State& st) {
  const auto n = static_cast<Index>(st.range(0));
  const Matrix x = random_matrix(n, 5, 8);
  const Vector y = random_matrix(n, 1, 9).col(0);
  const AnchorAssignment a(random_labels(static_cast<std::size_t>(n), 8, 10), 8);
  const auto grid = gamma_grid(2.0, 10);
  for (auto _ : st) benchmark::DoNotOptimize(augment_dataset_offline(x, y, a, grid).x.data());
}

}  // namespace

BENCHMARK(BM_group_mean<kernels::serial::group_mean>)
    ->Name("group_mean/serial")->Args({10000, 8})->Args({100000, 32});
BENCHMARK(BM_group_mean<kernels::omp::group_mean>)
    ->Name("group_mean/omp")->Args({10000, 8})->Args({100000, 32});
BENCHMARK(BM_assign_nearest<kernels::serial::assign_nearest>)
    ->Name("assign_nearest/serial")->Args({10000, 8})->Args({100000, 32});
BENCHMARK(BM_assign_nearest<kernels::omp::assign_nearest>)
    ->Name("assign_nearest/omp")->Args({10000, 8})->Args({100000, 32});
BENCHMARK(BM_dense_apply<kernels::serial::dense_apply>)
    ->Name("dense_apply/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_dense_apply<kernels::omp::dense_apply>)
    ->Name("dense_apply/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_kmeans)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_offline_augment)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
