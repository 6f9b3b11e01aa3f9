#include "ada/metrics.hpp"

#include <cmath>
#include <string>

namespace ada {

Metrics metrics(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorKind::Dimension,
                "prediction length " + std::to_string(pred.size()) +
                    " != truth length " + std::to_string(truth.size()));
  }
  if (pred.size() == 0) throw Error(ErrorKind::Dimension, "empty prediction");
  Metrics m;
  double sq = 0.0;
  double ape = 0.0;
  std::size_t used = 0;
  for (Index i = 0; i < pred.size(); ++i) {
    const double e = pred(i) - truth(i);
    sq += e * e;
    if (truth(i) != 0.0) {
      ape += std::abs(e) / std::abs(truth(i));
      ++used;
    } else {
      ++m.mape_excluded;
    }
  }
  m.mse = sq / static_cast<double>(pred.size());
  m.rmse = std::sqrt(m.mse);
  m.mape = used > 0 ? 100.0 * ape / static_cast<double>(used) : 0.0;
  return m;
}

}  // namespace ada
