#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "doctest.h"
#include "dwrl/mlp.hpp"

namespace dwrl::testing {

// Central-difference check of analytic gradients against a scalar loss.
// Every parameter entry is compared; relative error is used when either side
// is meaningfully nonzero, absolute error otherwise.
inline void check_gradients(dwrl::MlpParams& params, const dwrl::Gradients& analytic,
                            const std::function<double(const dwrl::MlpParams&)>& loss,
                            double h = 1e-5, double rel_tol = 1e-4, double abs_tol = 1e-8) {
  auto names = params.named_tensors();
  auto grads = const_cast<dwrl::Gradients&>(analytic).named_tensors();
  REQUIRE(names.size() == grads.size());
  for (std::size_t t = 0; t < names.size(); ++t) {
    dwrl::Tensor* p = names[t].second;
    const dwrl::Tensor* g = grads[t].second;
    REQUIRE(p->shape == g->shape);
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = (*p)[i];
      (*p)[i] = saved + h;
      const double up = loss(params);
      (*p)[i] = saved - h;
      const double down = loss(params);
      (*p)[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic_v = (*g)[i];
      const double scale = std::max(std::fabs(numeric), std::fabs(analytic_v));
      INFO("tensor ", names[t].first, " entry ", i, " analytic=", analytic_v,
           " numeric=", numeric);
      if (scale > 1e-6) {
        CHECK(std::fabs(analytic_v - numeric) / scale < rel_tol);
      } else {
        CHECK(std::fabs(analytic_v - numeric) < abs_tol);
      }
    }
  }
}

}  // namespace dwrl::testing
