#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "puorl/errors.hpp"
#include "puorl/rng.hpp"

namespace puorl::data {

// One environment transition. true_domain is bookkeeping for scoring only
// (0 = positive domain, k >= 1 = k-th negative domain); learners must never
// read it. The dataset class keeps it behind the eval accessor below.
struct Transition {
  std::vector<float> s;
  std::vector<float> a;
  float r = 0.0f;
  std::vector<float> s_next;
  bool done = false;
  std::uint8_t true_domain = 0;
};

// Columnar transition container. Row-major per-field arrays so training code
// can map columns straight into matrices. Immutable once built, apart from
// the reward rewrite hook used by reward-augmentation baselines.
class TransitionDataset {
 public:
  TransitionDataset() = default;
  TransitionDataset(int state_dim, int action_dim);

  void reserve(std::size_t n);
  void push_back(const Transition& t);

  std::size_t count() const { return count_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }

  // Learner-facing columns. No domain labels here.
  std::span<const float> states() const { return s_; }
  std::span<const float> actions() const { return a_; }
  std::span<const float> rewards() const { return r_; }
  std::span<const float> next_states() const { return s2_; }
  std::span<const float> dones() const { return done_; }

  std::span<float> mutable_rewards() { return r_; }

  static TransitionDataset concat(const TransitionDataset& first,
                                  const TransitionDataset& second);
  TransitionDataset gather(std::span<const std::uint32_t> indices) const;

  void save(const std::filesystem::path& path) const;
  static TransitionDataset load(const std::filesystem::path& path);
  static TransitionDataset load(const std::filesystem::path& path,
                                int expect_state_dim, int expect_action_dim);

  bool bitwise_equal(const TransitionDataset& other) const;

 private:
  int state_dim_ = 0;
  int action_dim_ = 0;
  std::size_t count_ = 0;
  std::vector<float> s_, a_, r_, s2_, done_;
  std::vector<std::uint8_t> true_domain_;

  friend std::span<const std::uint8_t> eval_true_domains(
      const TransitionDataset& ds);
};

// Evaluation-only access to the hidden domain labels. Every call bumps a
// process-wide counter so tests can assert that learner code paths never
// touch labels.
std::span<const std::uint8_t> eval_true_domains(const TransitionDataset& ds);
std::uint64_t eval_label_read_count();
void eval_reset_label_read_count();

// Uniformly random, disjoint, exhaustive split; the first side receives
// round(fraction * count) rows. Throws DataError if either side is empty.
std::pair<TransitionDataset, TransitionDataset> split(
    const TransitionDataset& ds, double fraction, Rng& rng);

// Index-level variant used where callers need to remember row identities.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_indices(
    std::size_t count, double fraction, Rng& rng);

}  // namespace puorl::data
