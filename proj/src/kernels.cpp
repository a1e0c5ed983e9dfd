#include "microsum/kernels.hpp"

#include <atomic>
#include <cmath>

namespace microsum::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::openmp};

// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelFlops = 16384;

inline void row_softmax(const double* x, double* out, std::size_t cols) {
  double mx = x[0];
  for (std::size_t j = 1; j < cols; ++j) {
    if (x[j] > mx) mx = x[j];
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    out[j] = std::exp(x[j] - mx);
    sum += out[j];
  }
  const double inv = 1.0 / sum;
  for (std::size_t j = 0; j < cols; ++j) out[j] *= inv;
}
}  // namespace

Backend active() { return g_backend.load(std::memory_order_relaxed); }
void set_backend(Backend b) { g_backend.store(b, std::memory_order_relaxed); }

namespace serial {

void matmul_nn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      out[i * n + j] = acc;
    }
  }
}

void matmul_nt(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[j * k + p];
      out[i * n + j] = acc;
    }
  }
}

void matmul_tn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[p * m + i] * b[p * n + j];
      out[i * n + j] = acc;
    }
  }
}

void softmax_rows(const double* x, double* out, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) row_softmax(x + r * cols, out + r * cols, cols);
}

}  // namespace serial

namespace omp {

// Each output element is produced by exactly one thread with the same
// accumulation order as the serial kernel, so results are bit-identical.

void matmul_nn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  const long mi = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (m * k * n >= kParallelFlops)
  for (long i = 0; i < mi; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      out[i * n + j] = acc;
    }
  }
}

void matmul_nt(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  const long mi = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (m * k * n >= kParallelFlops)
  for (long i = 0; i < mi; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[j * k + p];
      out[i * n + j] = acc;
    }
  }
}

void matmul_tn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  const long mi = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (m * k * n >= kParallelFlops)
  for (long i = 0; i < mi; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[p * m + i] * b[p * n + j];
      out[i * n + j] = acc;
    }
  }
}

void softmax_rows(const double* x, double* out, std::size_t rows, std::size_t cols) {
  const long ri = static_cast<long>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= 4096)
  for (long r = 0; r < ri; ++r) row_softmax(x + r * cols, out + r * cols, cols);
}

}  // namespace omp

void matmul_nn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  if (active() == Backend::openmp) {
    omp::matmul_nn(a, b, out, m, k, n);
  } else {
    serial::matmul_nn(a, b, out, m, k, n);
  }
}

void matmul_nt(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  if (active() == Backend::openmp) {
    omp::matmul_nt(a, b, out, m, k, n);
  } else {
    serial::matmul_nt(a, b, out, m, k, n);
  }
}

void matmul_tn(const double* a, const double* b, double* out,
               std::size_t m, std::size_t k, std::size_t n) {
  if (active() == Backend::openmp) {
    omp::matmul_tn(a, b, out, m, k, n);
  } else {
    serial::matmul_tn(a, b, out, m, k, n);
  }
}

void softmax_rows(const double* x, double* out, std::size_t rows, std::size_t cols) {
  if (active() == Backend::openmp) {
    omp::softmax_rows(x, out, rows, cols);
  } else {
    serial::softmax_rows(x, out, rows, cols);
  }
}

}  // namespace microsum::kernels
