#pragma once

#include <algorithm>
#include <functional>

#include "gnast/optimizer.hpp"

namespace gnast {

// Compares analytic gradients against central finite differences over every
// parameter element and returns the worst relative error. The loss callback
// must evaluate the loss at the parameters' current values; any noise inside
// it has to be held fixed across calls.
template <typename T>
T grad_check(ModelParameters<T>& params, const std::vector<Tensor<T>>& analytic,
             const std::function<T()>& loss, T h = T(1e-4)) {
  if (analytic.size() != params.size())
    throw std::invalid_argument("grad_check: gradient buffer size mismatch");
  T worst = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& t = params.value(i);
    for (std::size_t j = 0; j < t.numel(); ++j) {
      const T saved = t.data[j];
      t.data[j] = saved + h;
      const T up = loss();
      t.data[j] = saved - h;
      const T down = loss();
      t.data[j] = saved;
      const T numeric = (up - down) / (T(2) * h);
      const T a = analytic[i].data[j];
      const T denom = std::max(std::abs(a), std::abs(numeric));
      const T err = denom < T(1e-6) ? std::abs(a - numeric) : std::abs(a - numeric) / denom;
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace gnast
