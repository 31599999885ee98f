#include "towe/loss.hpp"

#include <cmath>

namespace towe {

double cross_entropy_loss(const ForwardTrace& trace, const EncodedInput& enc) {
  double total = 0.0;
  std::size_t labeled = 0;
  for (std::size_t t = 0; t < enc.size(); ++t) {
    if (enc.loss_mask[t] == 0) continue;
    const auto col = trace.logits.col(static_cast<Eigen::Index>(t));
    const double shift = col.maxCoeff();
    const double log_sum = shift + std::log((col.array() - shift).exp().sum());
    total += log_sum - col(enc.label_ids[t]);
    ++labeled;
  }
  return labeled == 0 ? 0.0 : total / static_cast<double>(labeled);
}

}  // namespace towe
