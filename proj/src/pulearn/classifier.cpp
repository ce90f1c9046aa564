#include "puorl/pulearn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "puorl/io_util.hpp"
#include "puorl/nn/checkpoint.hpp"
#include "puorl/nn/losses.hpp"

namespace puorl::pulearn {

InputMode parse_input_mode(const std::string& s) {
  if (s == "dynamics") return InputMode::DynamicsTriple;
  if (s == "reward") return InputMode::RewardTriple;
  throw ConfigError("unknown input mode '" + s + "' (expected dynamics or reward)");
}

std::string input_mode_name(InputMode m) {
  return m == InputMode::DynamicsTriple ? "dynamics" : "reward";
}

int input_dim(InputMode mode, int state_dim, int action_dim) {
  return mode == InputMode::DynamicsTriple ? 2 * state_dim + action_dim
                                           : state_dim + action_dim + 1;
}

nn::MatF build_inputs(const data::TransitionDataset& ds, InputMode mode) {
  const int sd = ds.state_dim();
  const int ad = ds.action_dim();
  const auto n = static_cast<Eigen::Index>(ds.count());
  nn::MatF x(n, input_dim(mode, sd, ad));
  const float* s = ds.states().data();
  const float* a = ds.actions().data();
  const float* s2 = ds.next_states().data();
  const float* r = ds.rewards().data();
  for (Eigen::Index i = 0; i < n; ++i) {
    float* row = x.data() + i * x.cols();
    std::memcpy(row, s + i * sd, sizeof(float) * sd);
    std::memcpy(row + sd, a + i * ad, sizeof(float) * ad);
    if (mode == InputMode::DynamicsTriple) {
      std::memcpy(row + sd + ad, s2 + i * sd, sizeof(float) * sd);
    } else {
      row[sd + ad] = r[i];
    }
  }
  return x;
}

std::vector<std::uint32_t> cvir_discard_set(const std::vector<float>& probs_u,
                                            double alpha_hat) {
  const auto n = probs_u.size();
  const auto k = static_cast<std::size_t>(
      std::llround(alpha_hat * static_cast<double>(n)));
  if (k >= n) {
    throw TrainingError(
        "cvir: alpha_hat " + std::to_string(alpha_hat) +
        " would discard every unlabeled row (degenerate training)");
  }
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  // stable sort by descending probability keeps ties in ascending row order
  std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    return probs_u[a] > probs_u[b];
  });
  idx.resize(k);
  return idx;
}

double bbe_from_probs(const std::vector<float>& probs_p_holdout,
                      const std::vector<float>& probs_u_holdout,
                      const BbeConstants& k) {
  if (probs_p_holdout.empty() || probs_u_holdout.empty()) {
    throw DataError("bbe: empty holdout");
  }
  const auto n_p = static_cast<double>(probs_p_holdout.size());
  const auto n_u = static_cast<double>(probs_u_holdout.size());
  const double penalty = k.c * std::sqrt(std::log(1.0 / k.delta) / n_u);
  const int grid_n = static_cast<int>(std::floor(0.99 / k.grid_step + 1e-9));
  double best = std::numeric_limits<double>::infinity();
  bool any_valid = false;
  for (int i = 1; i <= grid_n; ++i) {
    const double z = i * k.grid_step;
    std::size_t cp = 0, cu = 0;
    for (float p : probs_p_holdout) cp += (p >= z);
    for (float p : probs_u_holdout) cu += (p >= z);
    const double q_p = cp / n_p;
    if (q_p < k.qp_floor) continue;
    any_valid = true;
    const double q_u = cu / n_u;
    best = std::min(best, (q_u + penalty) / q_p);
  }
  if (!any_valid) {
    throw EstimationError(
        "bbe: no threshold kept enough positive holdout mass (classifier "
        "collapsed)");
  }
  return std::clamp(best, 0.0, 1.0);
}

PuTrainer::PuTrainer(const data::PuorlProblem& problem, const PuConfig& cfg,
                     Rng rng)
    : cfg_(cfg), rng_(rng.child(0)) {
  const nn::MatF p_all = build_inputs(problem.positive, cfg.mode);
  const nn::MatF u_all = build_inputs(problem.unlabeled, cfg.mode);

  Rng split_rng = rng.child(1);
  auto [p_train_idx, p_holdout_idx] = data::split_indices(
      problem.positive.count(), 1.0 - cfg.holdout_fraction, split_rng);
  Rng split_rng_u = rng.child(2);
  auto [u_train_idx, u_holdout_idx] = data::split_indices(
      problem.unlabeled.count(), 1.0 - cfg.holdout_fraction, split_rng_u);

  auto take = [](const nn::MatF& all, const std::vector<std::uint32_t>& idx) {
    nn::MatF out(static_cast<Eigen::Index>(idx.size()), all.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) = all.row(idx[i]);
    }
    return out;
  };
  p_train_ = take(p_all, p_train_idx);
  p_holdout_ = take(p_all, p_holdout_idx);
  u_train_ = take(u_all, u_train_idx);
  u_holdout_ = take(u_all, u_holdout_idx);
  u_holdout_idx_ = std::move(u_holdout_idx);

  std::vector<int> dims;
  dims.push_back(static_cast<int>(p_all.cols()));
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(1);
  Rng init_rng = rng.child(3);
  state_.net = nn::Mlp::init(dims, nn::Activation::ReLU,
                             nn::OutputActivation::Sigmoid, init_rng);
  state_.input_mode = cfg.mode;
  state_.alpha_hat = static_cast<float>(cfg.warmup_alpha);
  state_.epochs_warmup = cfg.epochs_warmup;
  state_.epochs_main = cfg.epochs_main;
  state_.batch_size = cfg.batch_size;
  opt_ = nn::AdamState::init(state_.net, cfg.lr);
  grads_ = state_.net.zero_grads();
}

std::vector<float> PuTrainer::probs_for(const nn::MatF& inputs) const {
  nn::Mlp::Workspace ws;
  std::vector<float> out(static_cast<std::size_t>(inputs.rows()));
  // chunked so holdout scoring stays cache-friendly
  const Eigen::Index chunk = 4096;
  for (Eigen::Index start = 0; start < inputs.rows(); start += chunk) {
    const Eigen::Index n = std::min(chunk, inputs.rows() - start);
    const nn::MatF block = inputs.middleRows(start, n);
    const nn::MatF& y = state_.net.forward(block, ws);
    for (Eigen::Index i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(start + i)] = y(i, 0);
    }
  }
  return out;
}

std::vector<float> PuTrainer::positive_holdout_probs() const {
  return probs_for(p_holdout_);
}

std::vector<float> PuTrainer::unlabeled_holdout_probs() const {
  return probs_for(u_holdout_);
}

void PuTrainer::warmup_epoch() {
  const auto n_u = static_cast<std::size_t>(u_train_.rows());
  const auto n_p = static_cast<std::size_t>(p_train_.rows());
  std::vector<std::uint32_t> u_order(n_u);
  std::iota(u_order.begin(), u_order.end(), 0u);
  rng_.shuffle(u_order.begin(), u_order.end());
  std::vector<std::uint32_t> p_order(n_p);
  std::iota(p_order.begin(), p_order.end(), 0u);
  rng_.shuffle(p_order.begin(), p_order.end());

  const auto batch = static_cast<std::size_t>(cfg_.batch_size);
  std::size_t p_cursor = 0;
  nn::Mlp::Workspace ws_p;
  for (std::size_t start = 0; start < n_u; start += batch) {
    const std::size_t bu = std::min(batch, n_u - start);
    const std::size_t bp = std::min(batch, n_p);
    nn::MatF xu(static_cast<Eigen::Index>(bu), u_train_.cols());
    for (std::size_t i = 0; i < bu; ++i) {
      xu.row(static_cast<Eigen::Index>(i)) = u_train_.row(u_order[start + i]);
    }
    nn::MatF xp(static_cast<Eigen::Index>(bp), p_train_.cols());
    for (std::size_t i = 0; i < bp; ++i) {
      xp.row(static_cast<Eigen::Index>(i)) =
          p_train_.row(p_order[p_cursor % n_p]);
      ++p_cursor;
    }
    const nn::MatF& yu = state_.net.forward(xu, ws_);
    const nn::VecF probs_u = yu.col(0);
    const nn::MatF& yp = state_.net.forward(xp, ws_p);
    const nn::VecF probs_p = yp.col(0);

    nn::VecF gp, gu;
    const double risk =
        nnpu_risk<float>(probs_p, probs_u, cfg_.warmup_alpha, &gp, &gu);
    if (!std::isfinite(risk)) {
      throw TrainingError("pu warm-up: non-finite risk");
    }
    auto grads_p = state_.net.zero_grads();
    state_.net.backward(xp, ws_p, nn::MatF(gp), grads_p);
    grads_ = state_.net.zero_grads();
    state_.net.backward(xu, ws_, nn::MatF(gu), grads_);
    grads_.add(grads_p);
    nn::adam_step(state_.net, grads_, opt_);
  }
}

double PuTrainer::estimate_alpha() {
  const BbeConstants k{cfg_.bbe_c, cfg_.bbe_delta, cfg_.bbe_qp_floor,
                       cfg_.bbe_grid_step};
  const double alpha =
      bbe_from_probs(positive_holdout_probs(), unlabeled_holdout_probs(), k);
  state_.alpha_hat = static_cast<float>(alpha);
  return alpha;
}

void PuTrainer::train_batch_bce(const nn::MatF& inputs, const nn::VecF& labels) {
  const nn::MatF& y = state_.net.forward(inputs, ws_);
  const nn::VecF probs = y.col(0);
  nn::VecF dprobs;
  const double loss = nn::bce_on_probs<float>(probs, labels, &dprobs);
  if (!std::isfinite(loss)) {
    throw TrainingError("cvir: non-finite loss");
  }
  state_.net.backward(inputs, ws_, nn::MatF(dprobs), grads_);
  nn::adam_step(state_.net, grads_, opt_);
}

void PuTrainer::cvir_epoch() {
  const auto n_u = static_cast<std::size_t>(u_train_.rows());
  const auto n_p = static_cast<std::size_t>(p_train_.rows());
  const auto discard =
      cvir_discard_set(probs_for(u_train_), state_.alpha_hat);
  std::vector<char> discarded(n_u, 0);
  for (auto i : discard) discarded[i] = 1;

  // row ids: [0, n_p) positive, [n_p, n_p + n_u) unlabeled survivors
  std::vector<std::uint32_t> order;
  order.reserve(n_p + n_u - discard.size());
  for (std::uint32_t i = 0; i < n_p; ++i) order.push_back(i);
  for (std::uint32_t i = 0; i < n_u; ++i) {
    if (!discarded[i]) order.push_back(static_cast<std::uint32_t>(n_p) + i);
  }
  rng_.shuffle(order.begin(), order.end());

  const auto batch = static_cast<std::size_t>(cfg_.batch_size);
  nn::MatF x;
  nn::VecF labels;
  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t b = std::min(batch, order.size() - start);
    x.resize(static_cast<Eigen::Index>(b), u_train_.cols());
    labels.resize(static_cast<Eigen::Index>(b));
    for (std::size_t i = 0; i < b; ++i) {
      const std::uint32_t id = order[start + i];
      if (id < n_p) {
        x.row(static_cast<Eigen::Index>(i)) = p_train_.row(id);
        labels[static_cast<Eigen::Index>(i)] = 1.0f;
      } else {
        x.row(static_cast<Eigen::Index>(i)) = u_train_.row(id - n_p);
        labels[static_cast<Eigen::Index>(i)] = -1.0f;
      }
    }
    train_batch_bce(x, labels);
  }
}

TrainedClassifier train_classifier(const data::PuorlProblem& problem,
                                   const PuConfig& cfg, Rng rng) {
  PuTrainer trainer(problem, cfg, rng);
  for (int e = 0; e < cfg.epochs_warmup; ++e) {
    trainer.warmup_epoch();
  }
  for (int e = 0; e < cfg.epochs_main; ++e) {
    trainer.estimate_alpha();
    trainer.cvir_epoch();
  }
  TrainedClassifier out;
  out.state = trainer.state();
  out.unlabeled_holdout = trainer.unlabeled_holdout_indices();
  return out;
}

void save_classifier(const std::filesystem::path& path,
                     const ClassifierState& c) {
  std::ostringstream os(std::ios::binary);
  nn::write_mlp(os, c.net);
  io::write_u8(os, c.input_mode == InputMode::DynamicsTriple ? 0 : 1);
  io::write_f32(os, c.alpha_hat);
  io::atomic_write_file(path, os.str());
}

ClassifierState load_classifier(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open classifier checkpoint: " +
                             path.string());
  ClassifierState c;
  c.net = nn::read_mlp(is, nn::Activation::ReLU, nn::OutputActivation::Sigmoid);
  const std::uint8_t mode = io::read_u8(is, "input mode");
  if (mode > 1) throw FormatError("classifier checkpoint: bad input mode tag");
  c.input_mode = (mode == 0) ? InputMode::DynamicsTriple : InputMode::RewardTriple;
  c.alpha_hat = io::read_f32(is, "alpha_hat");
  return c;
}

}  // namespace puorl::pulearn
