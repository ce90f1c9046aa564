#pragma once

#include <string>
#include <vector>

#include "puorl/nn/mlp.hpp"

namespace puorl::nn {

// Adam with bias correction over one Mlp's parameter set. Moment buffers are
// congruent with the tracked parameters; `step` advances by one per update.
struct AdamState {
  long step = 0;
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  std::vector<MatF> m_w, v_w;
  std::vector<VecF> m_b, v_b;

  static AdamState init(const Mlp& params, float lr);
};

// Throws TrainingError naming the offending tensor if any gradient entry is
// non-finite; throws ShapeError if grads are not congruent with params.
void adam_step(Mlp& params, const Mlp::Grads& grads, AdamState& state);

// Same update rule for a single free parameter vector (e.g. a policy's
// state-independent log-std).
struct AdamVecState {
  long step = 0;
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  VecF m, v;

  static AdamVecState init(const VecF& params, float lr);
};

void adam_step(VecF& params, const VecF& grad, AdamVecState& state,
               const std::string& name);

}  // namespace puorl::nn
