#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cylcauchy/error.hpp"

namespace cylcauchy {

/// Composite Simpson rule on uniformly spaced samples (step h). With an odd
/// number of panels the last three are integrated with Simpson's 3/8 rule,
/// so any sample count >= 3 keeps fourth-order accuracy.
inline double simpson_samples(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "simpson needs at least 3 samples");
  std::size_t panels = n - 1;
  double tail = 0.0;
  if (panels % 2 == 1) {
    if (panels == 1) throw Error(ErrorCode::InvalidArgument, "simpson needs at least 2 panels");
    const std::size_t j = n - 4;
    tail = 3.0 * h / 8.0 * (y[j] + 3.0 * y[j + 1] + 3.0 * y[j + 2] + y[j + 3]);
    panels -= 3;
  }
  double sum = 0.0;
  if (panels > 0) {
    sum = y[0] + y[panels];
    for (std::size_t i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
    sum *= h / 3.0;
  }
  return sum + tail;
}

template <typename F>
double simpson(F&& f, double a, double b, std::size_t panels) {
  if (panels < 2) throw Error(ErrorCode::InvalidArgument, "simpson needs at least 2 panels");
  const double h = (b - a) / static_cast<double>(panels);
  std::vector<double> y(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i) y[i] = f(a + h * static_cast<double>(i));
  return simpson_samples(y, h);
}

}  // namespace cylcauchy
