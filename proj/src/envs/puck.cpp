#include "puorl/envs/puck.hpp"

#include <algorithm>
#include <cmath>

namespace puorl::envs {

void MixtureSpec::validate() const {
  if (negative_domains.empty()) {
    throw ConfigError("mixture: no negative domains");
  }
  if (negative_domains.size() != eta.size()) {
    throw ConfigError("mixture: eta size " + std::to_string(eta.size()) +
                      " does not match domain count " +
                      std::to_string(negative_domains.size()));
  }
  double sum = 0.0;
  for (double w : eta) {
    if (w < 0.0) throw ConfigError("mixture: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("mixture: weights sum to " + std::to_string(sum) +
                      ", expected 1");
  }
}

BehaviorPolicy BehaviorPolicy::expert() {
  return {PolicyQuality::Expert, 4.0, 3.0, 0.02};
}

BehaviorPolicy BehaviorPolicy::medium() {
  return {PolicyQuality::Medium, 0.25, 0.15, 1.0};
}

BehaviorPolicy BehaviorPolicy::random() {
  return {PolicyQuality::Random, 0.0, 0.0, 0.0};
}

namespace {
inline float clip1(double x) {
  return static_cast<float>(std::clamp(x, -1.0, 1.0));
}
}  // namespace

Action BehaviorPolicy::act(const State& s, const DomainSpec& spec,
                           Rng& rng) const {
  if (quality == PolicyQuality::Random) {
    return {rng.uniform_in(-1.0f, 1.0f), rng.uniform_in(-1.0f, 1.0f)};
  }
  const double ex = spec.goal[0] - s[0];
  const double ey = spec.goal[1] - s[1];
  double ax = kp * ex - kd * s[2];
  double ay = kp * ey - kd * s[3];
  if (noise_std > 0.0) {
    ax += noise_std * rng.normal();
    ay += noise_std * rng.normal();
  }
  return {clip1(ax), clip1(ay)};
}

DatasetQuality parse_quality(const std::string& s) {
  if (s == "ME") return DatasetQuality::MediumExpert;
  if (s == "M") return DatasetQuality::Medium;
  if (s == "R") return DatasetQuality::Random;
  throw ConfigError("unknown dataset quality '" + s + "' (expected ME, M or R)");
}

std::string quality_name(DatasetQuality q) {
  switch (q) {
    case DatasetQuality::MediumExpert:
      return "ME";
    case DatasetQuality::Medium:
      return "M";
    case DatasetQuality::Random:
      return "R";
  }
  return "?";
}

double reward_for(const DomainSpec& spec, const State& next) {
  const double dx = static_cast<double>(next[0]) - spec.goal[0];
  const double dy = static_cast<double>(next[1]) - spec.goal[1];
  return -std::sqrt(dx * dx + dy * dy) + spec.reward_offset;
}

StepResult step(const DomainSpec& spec, const State& s, const Action& a, int t,
                Rng& rng) {
  for (float v : s) {
    if (!std::isfinite(v)) throw EnvError("step: non-finite state");
  }
  for (float v : a) {
    if (!std::isfinite(v) || std::abs(v) > 1.0f + 1e-6f) {
      throw EnvError("step: action outside [-1,1] box");
    }
  }
  double ax = a[0], ay = a[1];
  switch (spec.action_map) {
    case ActionMap::Identity:
      break;
    case ActionMap::Rotate90:
      std::swap(ax, ay);
      ax = -ax;
      break;
    case ActionMap::Negate:
      ax = -ax;
      ay = -ay;
      break;
  }
  if (spec.action_noise_std > 0.0) {
    ax += spec.action_noise_std * rng.normal();
    ay += spec.action_noise_std * rng.normal();
  }
  const double keep = 1.0 - spec.friction;
  const double vx = keep * s[2] + (ax / spec.mass) * spec.dt;
  const double vy = keep * s[3] + (ay / spec.mass) * spec.dt;
  const double px = s[0] + vx * spec.dt;
  const double py = s[1] + vy * spec.dt;

  StepResult out;
  out.next = {static_cast<float>(px), static_cast<float>(py),
              static_cast<float>(vx), static_cast<float>(vy)};
  out.reward = reward_for(spec, out.next);
  out.done = (t + 1 >= spec.horizon);
  return out;
}

State initial_state(Rng& rng) {
  return {rng.uniform_in(-0.5f, 0.5f), rng.uniform_in(-0.5f, 0.5f), 0.0f, 0.0f};
}

std::vector<data::Transition> rollout(const DomainSpec& spec,
                                      const BehaviorPolicy& policy,
                                      std::uint8_t domain_label, Rng& rng) {
  if (spec.horizon < 1) throw ConfigError("rollout: horizon must be >= 1");
  std::vector<data::Transition> episode;
  episode.reserve(static_cast<std::size_t>(spec.horizon));
  State s = initial_state(rng);
  for (int t = 0; t < spec.horizon; ++t) {
    const Action a = policy.act(s, spec, rng);
    const StepResult r = step(spec, s, a, t, rng);
    data::Transition tr;
    tr.s = {s.begin(), s.end()};
    tr.a = {a.begin(), a.end()};
    tr.r = static_cast<float>(r.reward);
    tr.s_next = {r.next.begin(), r.next.end()};
    tr.done = r.done;
    tr.true_domain = domain_label;
    episode.push_back(std::move(tr));
    s = r.next;
  }
  return episode;
}

double episode_return(const std::vector<data::Transition>& episode) {
  double sum = 0.0;
  for (const auto& t : episode) sum += static_cast<double>(t.r);
  return sum;
}

Anchors reference_returns(const DomainSpec& spec, int n_episodes, Rng& rng) {
  if (n_episodes < 100) {
    throw ConfigError("reference_returns: need n_episodes >= 100");
  }
  Rng random_rng = rng.child(0);
  Rng expert_rng = rng.child(1);
  const BehaviorPolicy rand_pi = BehaviorPolicy::random();
  const BehaviorPolicy expert_pi = BehaviorPolicy::expert();
  double rand_sum = 0.0, expert_sum = 0.0;
  for (int i = 0; i < n_episodes; ++i) {
    Rng er = random_rng.child(static_cast<std::uint64_t>(i));
    rand_sum += episode_return(rollout(spec, rand_pi, 0, er));
  }
  for (int i = 0; i < n_episodes; ++i) {
    Rng er = expert_rng.child(static_cast<std::uint64_t>(i));
    expert_sum += episode_return(rollout(spec, expert_pi, 0, er));
  }
  Anchors a;
  a.random_return = rand_sum / n_episodes;
  a.expert_return = expert_sum / n_episodes;
  if (a.expert_return <= a.random_return) {
    throw ConfigError(
        "reference_returns: expert anchor does not exceed random anchor "
        "(degenerate normalization)");
  }
  return a;
}

DomainSpec default_positive_spec() { return DomainSpec{}; }

DomainSpec negative_body_mass_spec() {
  DomainSpec d;
  d.mass = 3.0;
  return d;
}

DomainSpec negative_action_noise_spec() {
  DomainSpec d;
  d.action_noise_std = 0.5;
  return d;
}

DomainSpec negative_rotate_spec() {
  DomainSpec d;
  d.action_map = ActionMap::Rotate90;
  return d;
}

MixtureSpec body_mass_mixture() {
  return {{negative_body_mass_spec()}, {1.0}};
}

MixtureSpec mixture_shift_mixture() {
  return {{negative_body_mass_spec(), negative_action_noise_spec()}, {0.5, 0.5}};
}

MixtureSpec entire_body_mixture() {
  return {{negative_rotate_spec()}, {1.0}};
}

MixtureSpec reward_shift_mixture(double offset) {
  DomainSpec d;  // dynamics identical to the positive spec
  d.reward_offset = offset;
  return {{d}, {1.0}};
}

}  // namespace puorl::envs
