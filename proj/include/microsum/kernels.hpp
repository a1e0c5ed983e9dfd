#pragma once

#include <cstddef>

// Dense inner-loop kernels. Two implementations: a plain serial reference
// (kernels::serial) and an OpenMP one (kernels::omp) that parallelizes over
// independent output rows only, so both produce bit-identical results. The
// top-level functions dispatch on the active backend.
namespace microsum::kernels {

enum class Backend { serial, openmp };

Backend active();
void set_backend(Backend b);

// out[m x n] = a[m x k] * b[k x n]
void matmul_nn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
// out[m x n] = a[m x k] * b[n x k]^T
void matmul_nt(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
// out[m x n] = a[k x m]^T * b[k x n]
void matmul_tn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
// Row-wise max-subtracted softmax of x[rows x cols].
void softmax_rows(const double* x, double* out, std::size_t rows, std::size_t cols);

namespace serial {
void matmul_nn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
void matmul_nt(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
void matmul_tn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
void softmax_rows(const double* x, double* out, std::size_t rows, std::size_t cols);
}  // namespace serial

namespace omp {
void matmul_nn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
void matmul_nt(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
void matmul_tn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n);
void softmax_rows(const double* x, double* out, std::size_t rows, std::size_t cols);
}  // namespace omp

}  // namespace microsum::kernels
