#include "dwrl/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace dwrl::kernels {

int default_threads() {
  static int cached = [] {
    if (const char* env = std::getenv("DWRL_THREADS")) {
      int n = std::atoi(env);
      if (n > 0) return n;
    }
    return omp_get_max_threads();
  }();
  return cached;
}

namespace {

inline int resolve(int threads, std::int64_t work) {
  int t = threads == 0 ? default_threads() : threads;
  if (t <= 1 || work < kOmpMinWork) return 1;
  return t;
}

}  // namespace

void linear_forward_serial(const double* x, std::int64_t batch, std::int64_t in_dim,
                           const double* w, std::int64_t out_dim, const double* bias, double* y) {
  for (std::int64_t b = 0; b < batch; ++b) {
    const double* xb = x + b * in_dim;
    double* yb = y + b * out_dim;
    for (std::int64_t n = 0; n < out_dim; ++n) {
      double acc = bias ? bias[n] : 0.0;
      for (std::int64_t m = 0; m < in_dim; ++m) acc += xb[m] * w[m * out_dim + n];
      yb[n] = acc;
    }
  }
}

void linear_forward_omp(const double* x, std::int64_t batch, std::int64_t in_dim,
                        const double* w, std::int64_t out_dim, const double* bias, double* y,
                        int threads) {
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t b = 0; b < batch; ++b) {
    const double* xb = x + b * in_dim;
    double* yb = y + b * out_dim;
    for (std::int64_t n = 0; n < out_dim; ++n) {
      double acc = bias ? bias[n] : 0.0;
      for (std::int64_t m = 0; m < in_dim; ++m) acc += xb[m] * w[m * out_dim + n];
      yb[n] = acc;
    }
  }
}

void linear_forward(const double* x, std::int64_t batch, std::int64_t in_dim,
                    const double* w, std::int64_t out_dim, const double* bias, double* y,
                    int threads) {
  int t = resolve(threads, batch * in_dim * out_dim);
  if (t <= 1) {
    linear_forward_serial(x, batch, in_dim, w, out_dim, bias, y);
  } else {
    linear_forward_omp(x, batch, in_dim, w, out_dim, bias, y, t);
  }
}

void grad_weights_serial(const double* x, std::int64_t batch, std::int64_t in_dim,
                         const double* dy, std::int64_t out_dim, double* dw) {
  for (std::int64_t m = 0; m < in_dim; ++m) {
    for (std::int64_t n = 0; n < out_dim; ++n) {
      double acc = 0.0;
      for (std::int64_t b = 0; b < batch; ++b) acc += x[b * in_dim + m] * dy[b * out_dim + n];
      dw[m * out_dim + n] = acc;
    }
  }
}

void grad_weights_omp(const double* x, std::int64_t batch, std::int64_t in_dim,
                      const double* dy, std::int64_t out_dim, double* dw, int threads) {
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t m = 0; m < in_dim; ++m) {
    for (std::int64_t n = 0; n < out_dim; ++n) {
      double acc = 0.0;
      for (std::int64_t b = 0; b < batch; ++b) acc += x[b * in_dim + m] * dy[b * out_dim + n];
      dw[m * out_dim + n] = acc;
    }
  }
}

void grad_weights(const double* x, std::int64_t batch, std::int64_t in_dim,
                  const double* dy, std::int64_t out_dim, double* dw, int threads) {
  int t = resolve(threads, batch * in_dim * out_dim);
  if (t <= 1) {
    grad_weights_serial(x, batch, in_dim, dy, out_dim, dw);
  } else {
    grad_weights_omp(x, batch, in_dim, dy, out_dim, dw, t);
  }
}

void grad_input_serial(const double* dy, std::int64_t batch, std::int64_t out_dim,
                       const double* w, std::int64_t in_dim, double* dx) {
  for (std::int64_t b = 0; b < batch; ++b) {
    const double* dyb = dy + b * out_dim;
    double* dxb = dx + b * in_dim;
    for (std::int64_t m = 0; m < in_dim; ++m) {
      double acc = 0.0;
      for (std::int64_t n = 0; n < out_dim; ++n) acc += dyb[n] * w[m * out_dim + n];
      dxb[m] = acc;
    }
  }
}

void grad_input_omp(const double* dy, std::int64_t batch, std::int64_t out_dim,
                    const double* w, std::int64_t in_dim, double* dx, int threads) {
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t b = 0; b < batch; ++b) {
    const double* dyb = dy + b * out_dim;
    double* dxb = dx + b * in_dim;
    for (std::int64_t m = 0; m < in_dim; ++m) {
      double acc = 0.0;
      for (std::int64_t n = 0; n < out_dim; ++n) acc += dyb[n] * w[m * out_dim + n];
      dxb[m] = acc;
    }
  }
}

void grad_input(const double* dy, std::int64_t batch, std::int64_t out_dim,
                const double* w, std::int64_t in_dim, double* dx, int threads) {
  int t = resolve(threads, batch * in_dim * out_dim);
  if (t <= 1) {
    grad_input_serial(dy, batch, out_dim, w, in_dim, dx);
  } else {
    grad_input_omp(dy, batch, out_dim, w, in_dim, dx, t);
  }
}

void col_sum_serial(const double* dy, std::int64_t batch, std::int64_t out_dim, double* db) {
  for (std::int64_t n = 0; n < out_dim; ++n) {
    double acc = 0.0;
    for (std::int64_t b = 0; b < batch; ++b) acc += dy[b * out_dim + n];
    db[n] = acc;
  }
}

void col_sum_omp(const double* dy, std::int64_t batch, std::int64_t out_dim, double* db,
                 int threads) {
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t n = 0; n < out_dim; ++n) {
    double acc = 0.0;
    for (std::int64_t b = 0; b < batch; ++b) acc += dy[b * out_dim + n];
    db[n] = acc;
  }
}

void col_sum(const double* dy, std::int64_t batch, std::int64_t out_dim, double* db, int threads) {
  int t = resolve(threads, batch * out_dim);
  if (t <= 1) {
    col_sum_serial(dy, batch, out_dim, db);
  } else {
    col_sum_omp(dy, batch, out_dim, db, t);
  }
}

void tanh_forward_serial(const double* z, std::int64_t n, double* a) {
  for (std::int64_t i = 0; i < n; ++i) a[i] = std::tanh(z[i]);
}

void tanh_forward_omp(const double* z, std::int64_t n, double* a, int threads) {
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) a[i] = std::tanh(z[i]);
}

void tanh_forward(const double* z, std::int64_t n, double* a, int threads) {
  int t = resolve(threads, n);
  if (t <= 1) {
    tanh_forward_serial(z, n, a);
  } else {
    tanh_forward_omp(z, n, a, t);
  }
}

void tanh_backward_serial(const double* da, const double* a, std::int64_t n, double* dz) {
  for (std::int64_t i = 0; i < n; ++i) dz[i] = da[i] * (1.0 - a[i] * a[i]);
}

void tanh_backward_omp(const double* da, const double* a, std::int64_t n, double* dz,
                       int threads) {
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) dz[i] = da[i] * (1.0 - a[i] * a[i]);
}

void tanh_backward(const double* da, const double* a, std::int64_t n, double* dz, int threads) {
  int t = resolve(threads, n);
  if (t <= 1) {
    tanh_backward_serial(da, a, n, dz);
  } else {
    tanh_backward_omp(da, a, n, dz, t);
  }
}

namespace {

inline void softmax_row(const double* z, std::int64_t n, double* p) {
  double zmax = z[0];
  for (std::int64_t j = 1; j < n; ++j) zmax = std::max(zmax, z[j]);
  double sum = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    p[j] = std::exp(z[j] - zmax);
    sum += p[j];
  }
  double inv = 1.0 / sum;
  for (std::int64_t j = 0; j < n; ++j) p[j] *= inv;
}

inline void log_softmax_row(const double* z, std::int64_t n, double* lp) {
  double zmax = z[0];
  for (std::int64_t j = 1; j < n; ++j) zmax = std::max(zmax, z[j]);
  double sum = 0.0;
  for (std::int64_t j = 0; j < n; ++j) sum += std::exp(z[j] - zmax);
  double lse = std::log(sum);
  for (std::int64_t j = 0; j < n; ++j) lp[j] = z[j] - zmax - lse;
}

}  // namespace

void softmax_rows_serial(const double* z, std::int64_t batch, std::int64_t n, double* p) {
  for (std::int64_t b = 0; b < batch; ++b) softmax_row(z + b * n, n, p + b * n);
}

void softmax_rows_omp(const double* z, std::int64_t batch, std::int64_t n, double* p,
                      int threads) {
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t b = 0; b < batch; ++b) softmax_row(z + b * n, n, p + b * n);
}

void softmax_rows(const double* z, std::int64_t batch, std::int64_t n, double* p, int threads) {
  int t = resolve(threads, batch * n);
  if (t <= 1) {
    softmax_rows_serial(z, batch, n, p);
  } else {
    softmax_rows_omp(z, batch, n, p, t);
  }
}

void log_softmax_rows_serial(const double* z, std::int64_t batch, std::int64_t n, double* lp) {
  for (std::int64_t b = 0; b < batch; ++b) log_softmax_row(z + b * n, n, lp + b * n);
}

void log_softmax_rows_omp(const double* z, std::int64_t batch, std::int64_t n, double* lp,
                          int threads) {
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t b = 0; b < batch; ++b) log_softmax_row(z + b * n, n, lp + b * n);
}

void log_softmax_rows(const double* z, std::int64_t batch, std::int64_t n, double* lp,
                      int threads) {
  int t = resolve(threads, batch * n);
  if (t <= 1) {
    log_softmax_rows_serial(z, batch, n, lp);
  } else {
    log_softmax_rows_omp(z, batch, n, lp, t);
  }
}

}  // namespace dwrl::kernels
