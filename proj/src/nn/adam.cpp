#include "puorl/nn/adam.hpp"

#include <cmath>

namespace puorl::nn {

AdamState AdamState::init(const Mlp& params, float lr) {
  AdamState s;
  s.lr = lr;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    s.m_w.push_back(MatF::Zero(params.weights[l].rows(), params.weights[l].cols()));
    s.v_w.push_back(MatF::Zero(params.weights[l].rows(), params.weights[l].cols()));
    s.m_b.push_back(VecF::Zero(params.biases[l].size()));
    s.v_b.push_back(VecF::Zero(params.biases[l].size()));
  }
  return s;
}

namespace {

template <typename T>
void update_tensor(T& p, const T& g, T& m, T& v, const AdamState& s,
                   float corr1, float corr2) {
  m = s.beta1 * m + (1.0f - s.beta1) * g;
  v = s.beta2 * v + (1.0f - s.beta2) * g.cwiseProduct(g);
  p.array() -=
      s.lr * (m.array() / corr1) / ((v.array() / corr2).sqrt() + s.eps);
}

}  // namespace

void adam_step(Mlp& params, const Mlp::Grads& grads, AdamState& state) {
  const std::size_t L = params.weights.size();
  if (grads.w.size() != L || grads.b.size() != L || state.m_w.size() != L) {
    throw ShapeError("adam: gradient/state layer count mismatch");
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (grads.w[l].rows() != params.weights[l].rows() ||
        grads.w[l].cols() != params.weights[l].cols() ||
        grads.b[l].size() != params.biases[l].size()) {
      throw ShapeError("adam: gradient shape mismatch at layer " +
                       std::to_string(l));
    }
    if (!grads.w[l].allFinite()) {
      throw TrainingError("adam: non-finite gradient at layer " +
                          std::to_string(l) + " weights");
    }
    if (!grads.b[l].allFinite()) {
      throw TrainingError("adam: non-finite gradient at layer " +
                          std::to_string(l) + " biases");
    }
  }
  state.step += 1;
  const auto corr1 = static_cast<float>(
      1.0 - std::pow(static_cast<double>(state.beta1), state.step));
  const auto corr2 = static_cast<float>(
      1.0 - std::pow(static_cast<double>(state.beta2), state.step));
  for (std::size_t l = 0; l < L; ++l) {
    update_tensor(params.weights[l], grads.w[l], state.m_w[l], state.v_w[l],
                  state, corr1, corr2);
    update_tensor(params.biases[l], grads.b[l], state.m_b[l], state.v_b[l],
                  state, corr1, corr2);
  }
}

AdamVecState AdamVecState::init(const VecF& params, float lr) {
  AdamVecState s;
  s.lr = lr;
  s.m = VecF::Zero(params.size());
  s.v = VecF::Zero(params.size());
  return s;
}

void adam_step(VecF& params, const VecF& grad, AdamVecState& state,
               const std::string& name) {
  if (grad.size() != params.size()) {
    throw ShapeError("adam: gradient shape mismatch for " + name);
  }
  if (!grad.allFinite()) {
    throw TrainingError("adam: non-finite gradient at " + name);
  }
  state.step += 1;
  const auto corr1 = static_cast<float>(
      1.0 - std::pow(static_cast<double>(state.beta1), state.step));
  const auto corr2 = static_cast<float>(
      1.0 - std::pow(static_cast<double>(state.beta2), state.step));
  state.m = state.beta1 * state.m + (1.0f - state.beta1) * grad;
  state.v =
      state.beta2 * state.v + (1.0f - state.beta2) * grad.cwiseProduct(grad);
  params.array() -= state.lr * (state.m.array() / corr1) /
                    ((state.v.array() / corr2).sqrt() + state.eps);
}

}  // namespace puorl::nn
