#pragma once

#include <array>
#include <string>
#include <vector>

#include "puorl/data/dataset.hpp"
#include "puorl/errors.hpp"
#include "puorl/rng.hpp"

namespace puorl::envs {

// Puck: a 2-D point mass pushed around by bounded accelerations.
// State (px, py, vx, vy), action (ax, ay) in [-1,1]^2.
//
//   a'  = action_map(action) + noise
//   v'  = (1 - friction) * v + (a' / mass) * dt
//   p'  = p + v' * dt
//   r   = -||p' - goal||_2 + reward_offset
//
// Domains in one problem share the reward function, start distribution,
// horizon and dt; only mass, friction, action noise and the action map may
// differ. reward_offset exists solely for reward-shift problems, where the
// dynamics parameters must instead be identical across domains.
enum class EnvFamily { Puck };
enum class ActionMap { Identity, Rotate90, Negate };

inline constexpr int kStateDim = 4;
inline constexpr int kActionDim = 2;

using State = std::array<float, kStateDim>;
using Action = std::array<float, kActionDim>;

struct DomainSpec {
  EnvFamily family = EnvFamily::Puck;
  double mass = 1.0;
  double friction = 0.05;
  double action_noise_std = 0.0;
  ActionMap action_map = ActionMap::Identity;
  double dt = 0.1;
  int horizon = 100;
  std::array<double, 2> goal{1.0, 1.0};
  double reward_offset = 0.0;
};

struct MixtureSpec {
  std::vector<DomainSpec> negative_domains;
  std::vector<double> eta;

  void validate() const;
};

// Scripted data-collection policies. Expert and Medium are PD controllers
// toward the goal with exploration noise (Medium noisier and weaker);
// Random is uniform over the action box. Actions are always clipped to the
// box.
enum class PolicyQuality { Expert, Medium, Random };

struct BehaviorPolicy {
  PolicyQuality quality = PolicyQuality::Random;
  double kp = 0.0;
  double kd = 0.0;
  double noise_std = 0.0;

  static BehaviorPolicy expert();
  static BehaviorPolicy medium();
  static BehaviorPolicy random();

  Action act(const State& s, const DomainSpec& spec, Rng& rng) const;
};

// Dataset qualities mirror behavioral-mix grades: MediumExpert draws each
// episode's policy 50/50 from {Expert, Medium}.
enum class DatasetQuality { MediumExpert, Medium, Random };

DatasetQuality parse_quality(const std::string& s);
std::string quality_name(DatasetQuality q);

struct StepResult {
  State next;
  double reward = 0.0;
  bool done = false;
};

// Reward as a function of the realized next state (shared across domains up
// to reward_offset).
double reward_for(const DomainSpec& spec, const State& next);

// One simulation step; t is the 0-based index of this transition, so the
// episode ends when t+1 reaches the horizon. Noise draws consume the rng
// only when action_noise_std > 0.
StepResult step(const DomainSpec& spec, const State& s, const Action& a, int t,
                Rng& rng);

State initial_state(Rng& rng);

// One episode of exactly `horizon` transitions, tagged with domain_label.
std::vector<data::Transition> rollout(const DomainSpec& spec,
                                      const BehaviorPolicy& policy,
                                      std::uint8_t domain_label, Rng& rng);

double episode_return(const std::vector<data::Transition>& episode);

struct Anchors {
  double random_return = 0.0;
  double expert_return = 0.0;

  double normalized(double ret) const {
    return 100.0 * (ret - random_return) / (expert_return - random_return);
  }
};

// Monte-Carlo undiscounted mean returns of the Random and Expert policies,
// used as score-normalization anchors. Requires n_episodes >= 100 and a
// non-degenerate gap between the two.
Anchors reference_returns(const DomainSpec& spec, int n_episodes, Rng& rng);

// Default problem family: shifts change dynamics only.
DomainSpec default_positive_spec();
DomainSpec negative_body_mass_spec();   // mass 1.0 -> 3.0
DomainSpec negative_action_noise_spec();  // adds actuator noise 0.5
DomainSpec negative_rotate_spec();      // Rotate90 action map
MixtureSpec body_mass_mixture();
MixtureSpec mixture_shift_mixture();    // {mass shift, actuator noise} at 1:1
MixtureSpec entire_body_mixture();
// Same dynamics as the positive spec, reward shifted by a constant.
MixtureSpec reward_shift_mixture(double offset);

}  // namespace puorl::envs
