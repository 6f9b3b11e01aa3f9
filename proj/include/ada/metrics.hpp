#pragma once

#include <cstddef>

#include "ada/types.hpp"

namespace ada {

struct Metrics {
  double mse = 0.0;
  double rmse = 0.0;
  double mape = 0.0;  // percent, over nonzero truth entries
  std::size_t mape_excluded = 0;
};

Metrics metrics(const Vector& pred, const Vector& truth);

}  // namespace ada
