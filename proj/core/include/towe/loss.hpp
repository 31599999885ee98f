#pragma once

#include "towe/encoding.hpp"
#include "towe/model.hpp"

namespace towe {

// Mean of -log p(true label) over loss-mask positions; 0 when none are
// labeled. Computed with log-sum-exp on the logits.
double cross_entropy_loss(const ForwardTrace& trace, const EncodedInput& enc);

}  // namespace towe
