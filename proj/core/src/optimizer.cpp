#include <cmath>
#include <stdexcept>

#include "towe/train.hpp"

namespace towe {
namespace {

std::vector<Matrix*> tensors(Parameters& p) {
  std::vector<Matrix*> out;
  p.for_each([&out](std::string_view, Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> tensors(const Parameters& p) {
  std::vector<const Matrix*> out;
  p.for_each([&out](std::string_view, const Matrix& m) { out.push_back(&m); });
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
  if (max_epochs < 1) throw std::invalid_argument("max epochs must be at least 1");
  if (patience < 1) throw std::invalid_argument("patience must be at least 1");
  if (eval_every < 1) throw std::invalid_argument("eval-every must be at least 1");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
}

AdamState AdamState::zeros_like(const Parameters& params) {
  return AdamState{params.zeros_like(), params.zeros_like()};
}

void adam_step(Parameters& params, const Parameters& grads, AdamState& state,
               const TrainConfig& config, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("Adam step index must be >= 1");
  std::string bad;
  grads.for_each([&bad](std::string_view name, const Matrix& g) {
    if (bad.empty() && !g.allFinite()) bad = name;
  });
  if (!bad.empty()) throw NumericError("non-finite gradient in " + bad);

  const auto p_list = tensors(params);
  const auto g_list = tensors(grads);
  const auto m_list = tensors(state.first_moment);
  const auto v_list = tensors(state.second_moment);

  const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  for (std::size_t k = 0; k < p_list.size(); ++k) {
    if (p_list[k]->rows() != g_list[k]->rows() || p_list[k]->cols() != g_list[k]->cols()) {
      throw std::invalid_argument("gradient shape does not match parameters");
    }
    auto m = m_list[k]->array();
    auto v = v_list[k]->array();
    const auto grad = g_list[k]->array();
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = config.beta2 * v + (1.0 - config.beta2) * grad.square();
    p_list[k]->array() -=
        config.learning_rate * (m / correction1) / ((v / correction2).sqrt() + config.epsilon);
  }
  if (!params.all_finite()) throw NumericError("parameters became non-finite");
}

}  // namespace towe
