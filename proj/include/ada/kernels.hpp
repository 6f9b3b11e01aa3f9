#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ada/types.hpp"

// Data-parallel inner loops. Every kernel has a plain serial version kept as
// the reference for tests and benchmarks, and an OpenMP version that produces
// bit-identical output: parallelism only splits independent rows or columns,
// never a reduction.
namespace ada::kernels {

namespace serial {

Matrix group_mean(std::span<const std::size_t> labels, std::size_t q,
                  const Matrix& m);

// Nearest centroid by squared Euclidean distance, lowest index on ties.
void assign_nearest(const Matrix& x, const Matrix& centroids,
                    std::vector<std::size_t>& labels, Vector& sq_dist);

Matrix dense_apply(const Matrix& pi, const Matrix& m);

}  // namespace serial

namespace omp {

Matrix group_mean(std::span<const std::size_t> labels, std::size_t q,
                  const Matrix& m);

void assign_nearest(const Matrix& x, const Matrix& centroids,
                    std::vector<std::size_t>& labels, Vector& sq_dist);

Matrix dense_apply(const Matrix& pi, const Matrix& m);

}  // namespace omp

int max_threads();
void set_threads(int n);

}  // namespace ada::kernels
