#pragma once

#include <cstdint>

namespace dwrl::kernels {

// Dense kernels used by the MLP engine. Each kernel has a serial reference
// implementation and an OpenMP variant that parallelizes only over output
// elements, keeping the per-element accumulation order identical. Both
// variants therefore produce bit-identical results for any thread count;
// tests hold them to that.

// Number of threads the dispatch wrappers use when `threads == 0`.
int default_threads();

// Work-size threshold below which the dispatchers stay serial.
inline constexpr std::int64_t kOmpMinWork = 1 << 13;

// y[b,n] = sum_m x[b,m] * w[m,n] + bias[n]   (bias may be nullptr)
void linear_forward_serial(const double* x, std::int64_t batch, std::int64_t in_dim,
                           const double* w, std::int64_t out_dim, const double* bias, double* y);
void linear_forward_omp(const double* x, std::int64_t batch, std::int64_t in_dim,
                        const double* w, std::int64_t out_dim, const double* bias, double* y,
                        int threads);
void linear_forward(const double* x, std::int64_t batch, std::int64_t in_dim,
                    const double* w, std::int64_t out_dim, const double* bias, double* y,
                    int threads);

// dw[m,n] = sum_b x[b,m] * dy[b,n]
void grad_weights_serial(const double* x, std::int64_t batch, std::int64_t in_dim,
                         const double* dy, std::int64_t out_dim, double* dw);
void grad_weights_omp(const double* x, std::int64_t batch, std::int64_t in_dim,
                      const double* dy, std::int64_t out_dim, double* dw, int threads);
void grad_weights(const double* x, std::int64_t batch, std::int64_t in_dim,
                  const double* dy, std::int64_t out_dim, double* dw, int threads);

// dx[b,m] = sum_n dy[b,n] * w[m,n]
void grad_input_serial(const double* dy, std::int64_t batch, std::int64_t out_dim,
                       const double* w, std::int64_t in_dim, double* dx);
void grad_input_omp(const double* dy, std::int64_t batch, std::int64_t out_dim,
                    const double* w, std::int64_t in_dim, double* dx, int threads);
void grad_input(const double* dy, std::int64_t batch, std::int64_t out_dim,
                const double* w, std::int64_t in_dim, double* dx, int threads);

// db[n] = sum_b dy[b,n]
void col_sum_serial(const double* dy, std::int64_t batch, std::int64_t out_dim, double* db);
void col_sum_omp(const double* dy, std::int64_t batch, std::int64_t out_dim, double* db,
                 int threads);
void col_sum(const double* dy, std::int64_t batch, std::int64_t out_dim, double* db, int threads);

// a[i] = tanh(z[i])
void tanh_forward_serial(const double* z, std::int64_t n, double* a);
void tanh_forward_omp(const double* z, std::int64_t n, double* a, int threads);
void tanh_forward(const double* z, std::int64_t n, double* a, int threads);

// dz[i] = da[i] * (1 - a[i]^2)   (a is the tanh output)
void tanh_backward_serial(const double* da, const double* a, std::int64_t n, double* dz);
void tanh_backward_omp(const double* da, const double* a, std::int64_t n, double* dz, int threads);
void tanh_backward(const double* da, const double* a, std::int64_t n, double* dz, int threads);

// Row-wise softmax with max subtraction: p[b,:] = exp(z[b,:] - max) / sum.
void softmax_rows_serial(const double* z, std::int64_t batch, std::int64_t n, double* p);
void softmax_rows_omp(const double* z, std::int64_t batch, std::int64_t n, double* p, int threads);
void softmax_rows(const double* z, std::int64_t batch, std::int64_t n, double* p, int threads);

// Row-wise log-softmax: lp[b,:] = z[b,:] - max - log(sum exp(z - max)).
void log_softmax_rows_serial(const double* z, std::int64_t batch, std::int64_t n, double* lp);
void log_softmax_rows_omp(const double* z, std::int64_t batch, std::int64_t n, double* lp,
                          int threads);
void log_softmax_rows(const double* z, std::int64_t batch, std::int64_t n, double* lp, int threads);

}  // namespace dwrl::kernels
