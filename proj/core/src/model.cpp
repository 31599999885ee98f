#include "towe/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "towe/loss.hpp"
#include "towe/random.hpp"

namespace towe {
namespace {

Matrix sigmoid(const Matrix& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

void fill_uniform(Matrix& m, Rng& rng) {
  if (m.size() == 0) return;
  const double scale = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  }
}

LstmWeights make_lstm(int input_dim, int hidden_dim) {
  LstmWeights w;
  w.input = Matrix::Zero(4 * hidden_dim, input_dim);
  w.recurrent = Matrix::Zero(4 * hidden_dim, hidden_dim);
  w.bias = Matrix::Zero(4 * hidden_dim, 1);
  return w;
}

void check_ids(const EncodedInput& enc, const Parameters& params, const Hyperparameters& hp) {
  const auto n = enc.size();
  if (n == 0) throw ModelError("empty input");
  if (enc.segment_ids.size() != n || enc.position_ids.size() != n || enc.label_ids.size() != n ||
      enc.loss_mask.size() != n) {
    throw ModelError("per-position lists differ in length");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (hp.feature_mode == FeatureMode::kLearnedEmbeddings &&
        (enc.token_ids[t] < 0 || enc.token_ids[t] >= params.token_embedding.rows())) {
      throw ModelError("token id " + std::to_string(enc.token_ids[t]) + " outside the vocabulary");
    }
    if (hp.use_position && std::abs(enc.position_ids[t]) > hp.window) {
      throw ModelError("position id " + std::to_string(enc.position_ids[t]) + " outside the window");
    }
    if (hp.use_segment && (enc.segment_ids[t] < 0 || enc.segment_ids[t] > 1)) {
      throw ModelError("segment id must be 0 or 1");
    }
  }
}

Matrix build_inputs(const EncodedInput& enc, const Parameters& params, const Hyperparameters& hp,
                    const Matrix* features) {
  const auto n = static_cast<Eigen::Index>(enc.size());
  Matrix inputs(hp.embed_dim, n);
  if (hp.feature_mode == FeatureMode::kExternalFeatures) {
    if (features == nullptr) throw ModelError("external-feature mode needs a feature matrix");
    if (features->rows() != n || features->cols() != hp.embed_dim) {
      throw ModelError("feature matrix is " + std::to_string(features->rows()) + "x" +
                       std::to_string(features->cols()) + ", expected " + std::to_string(n) + "x" +
                       std::to_string(hp.embed_dim));
    }
    inputs = features->transpose();
  } else {
    for (Eigen::Index t = 0; t < n; ++t) {
      inputs.col(t) = params.token_embedding.row(enc.token_ids[static_cast<std::size_t>(t)]).transpose();
    }
  }
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (hp.use_position) {
      inputs.col(t) += params.position_embedding.row(enc.position_ids[i] + hp.window).transpose();
    }
    if (hp.use_segment) inputs.col(t) += params.segment_embedding.row(enc.segment_ids[i]).transpose();
  }
  return inputs;
}

DirectionTrace run_direction(const LstmWeights& w, const Matrix& inputs, bool reverse) {
  const Eigen::Index h = w.recurrent.cols();
  const Eigen::Index n = inputs.cols();
  const Matrix projected = (w.input * inputs).colwise() + w.bias.col(0);

  DirectionTrace trace{Matrix(4 * h, n), Matrix(h, n), Matrix(h, n)};
  Vector h_prev = Vector::Zero(h);
  Vector c_prev = Vector::Zero(h);
  for (Eigen::Index step = 0; step < n; ++step) {
    const Eigen::Index t = reverse ? n - 1 - step : step;
    const Vector z = projected.col(t) + w.recurrent * h_prev;
    const Vector i = sigmoid(z.segment(0, h));
    const Vector f = sigmoid(z.segment(h, h));
    const Vector g = z.segment(2 * h, h).array().tanh().matrix();
    const Vector o = sigmoid(z.segment(3 * h, h));
    const Vector c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
    const Vector hidden = o.cwiseProduct(c.array().tanh().matrix());

    trace.gates.col(t) << i, f, g, o;
    trace.cells.col(t) = c;
    trace.hidden.col(t) = hidden;
    h_prev = hidden;
    c_prev = c;
  }
  return trace;
}

// Backpropagation through time for one direction. Adds weight gradients to
// `grad` and input gradients to `d_inputs`.
void backprop_direction(const DirectionTrace& trace, const Matrix& d_hidden, const LstmWeights& w,
                        const Matrix& inputs, bool reverse, LstmWeights& grad, Matrix& d_inputs) {
  const Eigen::Index h = w.recurrent.cols();
  const Eigen::Index n = inputs.cols();
  Matrix d_gates(4 * h, n);
  Matrix h_prev_all = Matrix::Zero(h, n);
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);

  // Walk the processing order backwards.
  for (Eigen::Index step = n - 1; step >= 0; --step) {
    const Eigen::Index t = reverse ? n - 1 - step : step;
    const bool has_prev = step > 0;
    const Eigen::Index prev = reverse ? t + 1 : t - 1;

    const auto i = trace.gates.col(t).segment(0, h).array();
    const auto f = trace.gates.col(t).segment(h, h).array();
    const auto g = trace.gates.col(t).segment(2 * h, h).array();
    const auto o = trace.gates.col(t).segment(3 * h, h).array();
    const Eigen::ArrayXd tanh_c = trace.cells.col(t).array().tanh();
    const Eigen::ArrayXd c_prev =
        has_prev ? Eigen::ArrayXd(trace.cells.col(prev).array()) : Eigen::ArrayXd::Zero(h);
    if (has_prev) h_prev_all.col(t) = trace.hidden.col(prev);

    const Eigen::ArrayXd dh = d_hidden.col(t).array() + dh_next.array();
    const Eigen::ArrayXd dc = dh * o * (1.0 - tanh_c.square()) + dc_next.array();

    auto dz = d_gates.col(t);
    dz.segment(0, h) = (dc * g * i * (1.0 - i)).matrix();
    dz.segment(h, h) = (dc * c_prev * f * (1.0 - f)).matrix();
    dz.segment(2 * h, h) = (dc * i * (1.0 - g.square())).matrix();
    dz.segment(3 * h, h) = (dh * tanh_c * o * (1.0 - o)).matrix();

    dh_next = w.recurrent.transpose() * dz;
    dc_next = (dc * f).matrix();
  }

  grad.input += d_gates * inputs.transpose();
  grad.recurrent += d_gates * h_prev_all.transpose();
  grad.bias += d_gates.rowwise().sum();
  d_inputs += w.input.transpose() * d_gates;
}

}  // namespace

void Hyperparameters::validate() const {
  if (embed_dim <= 0 || hidden_dim <= 0) throw ModelError("dimensions must be positive");
  if (window <= 0) throw ModelError("position window must be positive");
  if (feature_mode == FeatureMode::kLearnedEmbeddings && vocab_size <= 0) {
    throw ModelError("vocabulary size must be positive");
  }
}

Parameters Parameters::zeros_like() const {
  Parameters out = *this;
  out.for_each([](std::string_view, Matrix& m) { m.setZero(); });
  return out;
}

std::size_t Parameters::num_scalars() const {
  std::size_t total = 0;
  for_each([&total](std::string_view, const Matrix& m) { total += static_cast<std::size_t>(m.size()); });
  return total;
}

bool Parameters::all_finite() const {
  bool finite = true;
  for_each([&finite](std::string_view, const Matrix& m) { finite = finite && m.allFinite(); });
  return finite;
}

bool Parameters::operator==(const Parameters& other) const {
  std::vector<const Matrix*> mine;
  std::vector<const Matrix*> theirs;
  for_each([&mine](std::string_view, const Matrix& m) { mine.push_back(&m); });
  other.for_each([&theirs](std::string_view, const Matrix& m) { theirs.push_back(&m); });
  for (std::size_t k = 0; k < mine.size(); ++k) {
    if (mine[k]->rows() != theirs[k]->rows() || mine[k]->cols() != theirs[k]->cols()) return false;
    if (*mine[k] != *theirs[k]) return false;
  }
  return true;
}

Parameters init_parameters(const Hyperparameters& hp) {
  hp.validate();
  const int d = hp.embed_dim;
  const int h = hp.hidden_dim;
  const bool learned = hp.feature_mode == FeatureMode::kLearnedEmbeddings;

  Parameters params;
  params.token_embedding = Matrix::Zero(learned ? hp.vocab_size : 0, d);
  params.position_embedding = Matrix::Zero(hp.use_position ? 2 * hp.window + 1 : 0, d);
  params.segment_embedding = Matrix::Zero(hp.use_segment ? 2 : 0, d);
  params.forward = make_lstm(d, h);
  params.backward = make_lstm(d, h);
  params.classifier_weight = Matrix::Zero(kNumTags, 2 * h);
  params.classifier_bias = Matrix::Zero(kNumTags, 1);

  Rng rng = make_rng(hp.seed, kInitStream);
  for (Matrix* m : {&params.token_embedding, &params.position_embedding, &params.segment_embedding,
                    &params.forward.input, &params.forward.recurrent, &params.backward.input,
                    &params.backward.recurrent, &params.classifier_weight}) {
    fill_uniform(*m, rng);
  }
  params.forward.bias.block(h, 0, h, 1).setOnes();
  params.backward.bias.block(h, 0, h, 1).setOnes();
  return params;
}

Hyperparameters infer_hyperparameters(const Parameters& params) {
  Hyperparameters hp;
  const auto h = params.forward.recurrent.cols();
  const auto d = params.forward.input.cols();
  const auto shape_error = [](const std::string& what) {
    throw ModelError("inconsistent parameter shapes: " + what);
  };
  if (h <= 0 || d <= 0) shape_error("empty LSTM");
  for (const LstmWeights* w : {&params.forward, &params.backward}) {
    if (w->input.rows() != 4 * h || w->input.cols() != d) shape_error("LSTM input weights");
    if (w->recurrent.rows() != 4 * h || w->recurrent.cols() != h) shape_error("LSTM recurrent weights");
    if (w->bias.rows() != 4 * h || w->bias.cols() != 1) shape_error("LSTM bias");
  }
  if (params.classifier_weight.rows() != kNumTags || params.classifier_weight.cols() != 2 * h) {
    shape_error("classifier weight");
  }
  if (params.classifier_bias.rows() != kNumTags || params.classifier_bias.cols() != 1) {
    shape_error("classifier bias");
  }
  if (params.token_embedding.cols() != d) shape_error("token embedding");
  if (params.position_embedding.cols() != d || (params.position_embedding.rows() > 0 &&
                                                params.position_embedding.rows() % 2 == 0)) {
    shape_error("position embedding");
  }
  if (params.segment_embedding.cols() != d ||
      (params.segment_embedding.rows() != 0 && params.segment_embedding.rows() != 2)) {
    shape_error("segment embedding");
  }

  hp.embed_dim = static_cast<int>(d);
  hp.hidden_dim = static_cast<int>(h);
  hp.vocab_size = static_cast<int>(params.token_embedding.rows());
  hp.feature_mode = hp.vocab_size > 0 ? FeatureMode::kLearnedEmbeddings : FeatureMode::kExternalFeatures;
  hp.use_position = params.position_embedding.rows() > 0;
  if (hp.use_position) hp.window = static_cast<int>((params.position_embedding.rows() - 1) / 2);
  hp.use_segment = params.segment_embedding.rows() > 0;
  return hp;
}

ForwardTrace forward(const EncodedInput& enc, const Parameters& params, const Hyperparameters& hp,
                     const Matrix* features) {
  check_ids(enc, params, hp);
  ForwardTrace trace;
  trace.inputs = build_inputs(enc, params, hp, features);
  trace.forward = run_direction(params.forward, trace.inputs, /*reverse=*/false);
  trace.backward = run_direction(params.backward, trace.inputs, /*reverse=*/true);

  const Eigen::Index h = params.forward.recurrent.cols();
  const Eigen::Index n = trace.inputs.cols();
  Matrix states(2 * h, n);
  states << trace.forward.hidden, trace.backward.hidden;
  trace.logits = (params.classifier_weight * states).colwise() + params.classifier_bias.col(0);

  trace.probabilities.resize(kNumTags, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double shift = trace.logits.col(t).maxCoeff();
    const Eigen::ArrayXd e = (trace.logits.col(t).array() - shift).exp();
    trace.probabilities.col(t) = (e / e.sum()).matrix();
  }
  return trace;
}

Parameters backward(const ForwardTrace& trace, const EncodedInput& enc, const Parameters& params,
                    const Hyperparameters& hp) {
  Parameters grad = params.zeros_like();
  const auto labeled = enc.num_labeled();
  if (labeled == 0) return grad;

  const Eigen::Index n = static_cast<Eigen::Index>(enc.size());
  const Eigen::Index h = params.forward.recurrent.cols();
  const double scale = 1.0 / static_cast<double>(labeled);

  Matrix d_logits = Matrix::Zero(kNumTags, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (enc.loss_mask[i] == 0) continue;
    d_logits.col(t) = trace.probabilities.col(t) * scale;
    d_logits(enc.label_ids[i], t) -= scale;
  }

  Matrix states(2 * h, n);
  states << trace.forward.hidden, trace.backward.hidden;
  grad.classifier_weight = d_logits * states.transpose();
  grad.classifier_bias = d_logits.rowwise().sum();

  const Matrix d_states = params.classifier_weight.transpose() * d_logits;
  Matrix d_inputs = Matrix::Zero(trace.inputs.rows(), n);
  backprop_direction(trace.forward, d_states.topRows(h), params.forward, trace.inputs, false,
                     grad.forward, d_inputs);
  backprop_direction(trace.backward, d_states.bottomRows(h), params.backward, trace.inputs, true,
                     grad.backward, d_inputs);

  for (Eigen::Index t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (hp.feature_mode == FeatureMode::kLearnedEmbeddings) {
      grad.token_embedding.row(enc.token_ids[i]) += d_inputs.col(t).transpose();
    }
    if (hp.use_position) {
      grad.position_embedding.row(enc.position_ids[i] + hp.window) += d_inputs.col(t).transpose();
    }
    if (hp.use_segment) grad.segment_embedding.row(enc.segment_ids[i]) += d_inputs.col(t).transpose();
  }
  return grad;
}

double finite_difference_check(const EncodedInput& enc, const Parameters& params,
                               const Hyperparameters& hp, double epsilon, const Matrix* features) {
  if (!(epsilon > 0.0)) throw ModelError("finite-difference step must be positive");
  if (enc.num_labeled() == 0) return 0.0;

  const Parameters analytic = backward(forward(enc, params, hp, features), enc, params, hp);
  Parameters probe = params;
  std::vector<Matrix*> probe_tensors;
  std::vector<const Matrix*> grad_tensors;
  probe.for_each([&probe_tensors](std::string_view, Matrix& m) { probe_tensors.push_back(&m); });
  analytic.for_each([&grad_tensors](std::string_view, const Matrix& m) { grad_tensors.push_back(&m); });

  const auto loss_at = [&]() { return cross_entropy_loss(forward(enc, probe, hp, features), enc); };

  double worst = 0.0;
  for (std::size_t k = 0; k < probe_tensors.size(); ++k) {
    Matrix& m = *probe_tensors[k];
    for (Eigen::Index idx = 0; idx < m.size(); ++idx) {
      const double saved = m(idx);
      m(idx) = saved + epsilon;
      const double plus = loss_at();
      m(idx) = saved - epsilon;
      const double minus = loss_at();
      m(idx) = saved;

      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double exact = (*grad_tensors[k])(idx);
      const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(exact - numeric) / denom);
    }
  }
  return worst;
}

std::vector<Tag> predict_position_tags(const ForwardTrace& trace) {
  std::vector<Tag> tags;
  tags.reserve(trace.length());
  for (Eigen::Index t = 0; t < trace.probabilities.cols(); ++t) {
    Eigen::Index best = 0;
    trace.logits.col(t).maxCoeff(&best);
    tags.push_back(static_cast<Tag>(best));
  }
  return tags;
}

}  // namespace towe
