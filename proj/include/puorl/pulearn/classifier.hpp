#pragma once

#include <filesystem>
#include <vector>

#include "puorl/data/problem.hpp"
#include "puorl/nn/adam.hpp"
#include "puorl/nn/mlp.hpp"

namespace puorl::pulearn {

// Input the domain classifier reads per transition: the full dynamics triple
// (s, a, s') or, where only rewards differ between domains, (s, a, r).
enum class InputMode { DynamicsTriple, RewardTriple };

InputMode parse_input_mode(const std::string& s);
std::string input_mode_name(InputMode m);

int input_dim(InputMode mode, int state_dim, int action_dim);

// Feature matrix (one row per transition) for the given mode.
nn::MatF build_inputs(const data::TransitionDataset& ds, InputMode mode);

struct PuConfig {
  InputMode mode = InputMode::DynamicsTriple;
  std::vector<int> hidden = {64, 64, 64};
  int epochs_warmup = 10;
  int epochs_main = 100;
  int batch_size = 256;
  float lr = 1e-3f;
  // Unlabeled-class prior used before any estimate exists.
  double warmup_alpha = 0.5;
  // Exceedance-ratio estimator constants.
  double bbe_c = 0.1;
  double bbe_delta = 0.1;
  double bbe_qp_floor = 0.1;
  double bbe_grid_step = 0.01;
  double holdout_fraction = 0.2;
};

// Frozen classifier: probability-of-positive network plus the mixture
// proportion it settled on.
struct ClassifierState {
  nn::Mlp net;
  InputMode input_mode = InputMode::DynamicsTriple;
  float alpha_hat = 0.0f;
  int epochs_warmup = 0;
  int epochs_main = 0;
  int batch_size = 0;
};

// Positive-unlabeled risk with the logistic surrogate on probabilities:
//   R = alpha * Rp+ + max(0, Ru- - alpha * Rp-)
// where Rp+ = mean(-log p) over positives, Rp-/Ru- = mean(-log(1-p)) over
// positives/unlabeled. Gradients flow through the max only while the inner
// term is positive. Throws DataError on an empty side.
template <typename S>
double nnpu_risk(const nn::VecT<S>& probs_p, const nn::VecT<S>& probs_u,
                 double alpha_p, nn::VecT<S>* grad_p = nullptr,
                 nn::VecT<S>* grad_u = nullptr) {
  if (probs_p.size() == 0 || probs_u.size() == 0) {
    throw DataError("nnpu_risk: empty positive or unlabeled batch");
  }
  if (!(alpha_p >= 0.0 && alpha_p <= 1.0)) {
    throw ConfigError("nnpu_risk: alpha_p must be in [0,1]");
  }
  constexpr double kEps = 1e-7;
  const auto n_p = static_cast<double>(probs_p.size());
  const auto n_u = static_cast<double>(probs_u.size());
  double rp_plus = 0.0, rp_minus = 0.0, ru_minus = 0.0;
  for (Eigen::Index i = 0; i < probs_p.size(); ++i) {
    const double p = std::min(1.0 - kEps,
                              std::max(kEps, static_cast<double>(probs_p[i])));
    rp_plus += -std::log(p);
    rp_minus += -std::log(1.0 - p);
  }
  for (Eigen::Index i = 0; i < probs_u.size(); ++i) {
    const double p = std::min(1.0 - kEps,
                              std::max(kEps, static_cast<double>(probs_u[i])));
    ru_minus += -std::log(1.0 - p);
  }
  rp_plus /= n_p;
  rp_minus /= n_p;
  ru_minus /= n_u;
  const double inner = ru_minus - alpha_p * rp_minus;
  const bool gate = inner > 0.0;
  const double value = alpha_p * rp_plus + (gate ? inner : 0.0);
  if (grad_p != nullptr) {
    grad_p->resize(probs_p.size());
    for (Eigen::Index i = 0; i < probs_p.size(); ++i) {
      const double p = std::min(
          1.0 - kEps, std::max(kEps, static_cast<double>(probs_p[i])));
      double g = alpha_p * (-1.0 / p) / n_p;
      if (gate) g += -alpha_p * (1.0 / (1.0 - p)) / n_p;
      (*grad_p)[i] = static_cast<S>(g);
    }
  }
  if (grad_u != nullptr) {
    grad_u->resize(probs_u.size());
    for (Eigen::Index i = 0; i < probs_u.size(); ++i) {
      const double p = std::min(
          1.0 - kEps, std::max(kEps, static_cast<double>(probs_u[i])));
      (*grad_u)[i] = static_cast<S>(gate ? (1.0 / (1.0 - p)) / n_u : 0.0);
    }
  }
  return value;
}

// Indices of the round(alpha_hat * n) highest-probability rows, ties broken
// toward the lowest row index. Throws TrainingError when nothing would
// remain.
std::vector<std::uint32_t> cvir_discard_set(const std::vector<float>& probs_u,
                                            double alpha_hat);

struct BbeConstants {
  double c = 0.1;
  double delta = 0.1;
  double qp_floor = 0.1;
  double grid_step = 0.01;
};

// Mixture-proportion estimate from holdout score exceedance ratios:
// min over thresholds z (with q_p(z) >= floor) of
//   (q_u(z) + c * sqrt(log(1/delta) / n_u)) / q_p(z), clamped to [0,1].
double bbe_from_probs(const std::vector<float>& probs_p_holdout,
                      const std::vector<float>& probs_u_holdout,
                      const BbeConstants& k);

// Training driver. Holds the train/holdout partition so warm-up epochs,
// proportion estimation and the discard-retrain epochs see consistent rows.
class PuTrainer {
 public:
  PuTrainer(const data::PuorlProblem& problem, const PuConfig& cfg, Rng rng);

  void warmup_epoch();
  double estimate_alpha();  // updates state().alpha_hat
  void cvir_epoch();

  ClassifierState& state() { return state_; }
  const ClassifierState& state() const { return state_; }

  std::vector<float> positive_holdout_probs() const;
  std::vector<float> unlabeled_holdout_probs() const;
  const std::vector<std::uint32_t>& unlabeled_holdout_indices() const {
    return u_holdout_idx_;
  }

 private:
  std::vector<float> probs_for(const nn::MatF& inputs) const;
  void train_batch_bce(const nn::MatF& inputs, const nn::VecF& labels);

  PuConfig cfg_;
  ClassifierState state_;
  nn::AdamState opt_;
  nn::MatF p_train_, p_holdout_, u_train_, u_holdout_;
  std::vector<std::uint32_t> u_holdout_idx_;
  Rng rng_;
  // scratch
  nn::Mlp::Workspace ws_;
  nn::Mlp::Grads grads_;
};

struct TrainedClassifier {
  ClassifierState state;
  // Holdout rows (indices into the problem's unlabeled set) reserved from
  // training; evaluation code scores accuracy on them.
  std::vector<std::uint32_t> unlabeled_holdout;
};

// Warm-up epochs under the PU risk with the agnostic prior, then the
// alternating {estimate -> discard-retrain} loop. Deterministic per rng.
TrainedClassifier train_classifier(const data::PuorlProblem& problem,
                                   const PuConfig& cfg, Rng rng);

// Checkpoint: network block, then u8 input mode, then f32 alpha_hat.
void save_classifier(const std::filesystem::path& path,
                     const ClassifierState& c);
ClassifierState load_classifier(const std::filesystem::path& path);

}  // namespace puorl::pulearn
