#include "puorl/data/problem.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "puorl/io_util.hpp"
#include "puorl/serialize.hpp"

namespace puorl::data {

namespace {

using envs::BehaviorPolicy;
using envs::DatasetQuality;

BehaviorPolicy episode_policy(DatasetQuality q, Rng& rng) {
  switch (q) {
    case DatasetQuality::MediumExpert:
      return (rng.below(2) == 0) ? BehaviorPolicy::expert()
                                 : BehaviorPolicy::medium();
    case DatasetQuality::Medium:
      return BehaviorPolicy::medium();
    case DatasetQuality::Random:
      return BehaviorPolicy::random();
  }
  throw ConfigError("unknown dataset quality");
}

// Rolls whole episodes until `target` transitions exist, truncating the last
// episode. `domain_of_episode` picks the spec and label per episode.
template <typename PickDomain>
void fill_pool(TransitionDataset& pool, std::size_t target,
               DatasetQuality quality, Rng episode_stream, Rng policy_stream,
               PickDomain&& domain_of_episode) {
  std::uint64_t episode = 0;
  while (pool.count() < target) {
    Rng ep_rng = episode_stream.child(episode);
    Rng pol_rng = policy_stream.child(episode);
    const auto [spec, label] = domain_of_episode(pol_rng);
    const BehaviorPolicy policy = episode_policy(quality, pol_rng);
    const auto transitions = envs::rollout(*spec, policy, label, ep_rng);
    for (const auto& t : transitions) {
      if (pool.count() == target) break;
      pool.push_back(t);
    }
    ++episode;
  }
}

}  // namespace

PuorlProblem build_problem(const envs::DomainSpec& positive_spec,
                           const envs::MixtureSpec& mixture,
                           envs::DatasetQuality positive_quality,
                           envs::DatasetQuality negative_quality,
                           std::size_t total_count, double alpha_p,
                           double labeled_ratio, Rng& rng) {
  mixture.validate();
  if (total_count < 1000) {
    throw ConfigError("build_problem: total_count must be >= 1000");
  }
  if (!(alpha_p > 0.0 && alpha_p <= 1.0)) {
    throw ConfigError("build_problem: alpha_p must be in (0,1]");
  }
  if (!(labeled_ratio > 0.0 && labeled_ratio < alpha_p)) {
    throw ConfigError("build_problem: labeled_ratio must satisfy 0 < ratio < alpha_p (" +
                      std::to_string(labeled_ratio) + " vs alpha_p " +
                      std::to_string(alpha_p) + ")");
  }
  for (const auto& neg : mixture.negative_domains) {
    if (neg.horizon != positive_spec.horizon || neg.dt != positive_spec.dt ||
        neg.goal != positive_spec.goal) {
      throw ConfigError(
          "build_problem: negative domains must share horizon, dt and goal "
          "with the positive domain");
    }
  }

  const auto pos_count = static_cast<std::size_t>(
      std::llround(alpha_p * static_cast<double>(total_count)));
  const std::size_t neg_count = total_count - pos_count;
  const auto n_p = static_cast<std::size_t>(
      std::llround(labeled_ratio * static_cast<double>(total_count)));

  TransitionDataset pos_pool(envs::kStateDim, envs::kActionDim);
  pos_pool.reserve(pos_count);
  fill_pool(pos_pool, pos_count, positive_quality, rng.child(0), rng.child(1),
            [&](Rng&) {
              return std::pair<const envs::DomainSpec*, std::uint8_t>{
                  &positive_spec, 0};
            });

  TransitionDataset neg_pool(envs::kStateDim, envs::kActionDim);
  neg_pool.reserve(neg_count);
  fill_pool(neg_pool, neg_count, negative_quality, rng.child(2), rng.child(3),
            [&](Rng& pol_rng) {
              const double u = pol_rng.uniform();
              double acc = 0.0;
              std::size_t k = mixture.negative_domains.size() - 1;
              for (std::size_t i = 0; i < mixture.eta.size(); ++i) {
                acc += mixture.eta[i];
                if (u < acc) {
                  k = i;
                  break;
                }
              }
              return std::pair<const envs::DomainSpec*, std::uint8_t>{
                  &mixture.negative_domains[k], static_cast<std::uint8_t>(k + 1)};
            });

  // Random subset of the positive pool becomes the labeled set.
  std::vector<std::uint32_t> pos_idx(pos_count);
  std::iota(pos_idx.begin(), pos_idx.end(), 0u);
  Rng shuffle_rng = rng.child(4);
  shuffle_rng.shuffle(pos_idx.begin(), pos_idx.end());
  const std::span<const std::uint32_t> labeled_idx(pos_idx.data(), n_p);
  const std::span<const std::uint32_t> rest_idx(pos_idx.data() + n_p,
                                                pos_count - n_p);

  PuorlProblem problem;
  problem.positive = pos_pool.gather(labeled_idx);
  TransitionDataset unlabeled =
      TransitionDataset::concat(pos_pool.gather(rest_idx), neg_pool);
  std::vector<std::uint32_t> u_idx(unlabeled.count());
  std::iota(u_idx.begin(), u_idx.end(), 0u);
  Rng u_shuffle = rng.child(5);
  u_shuffle.shuffle(u_idx.begin(), u_idx.end());
  problem.unlabeled = unlabeled.gather(u_idx);

  problem.labeled_ratio = labeled_ratio;
  problem.alpha_p_true = static_cast<double>(pos_count - n_p) /
                         static_cast<double>(total_count - n_p);
  problem.positive_spec = positive_spec;
  problem.mixture = mixture;
  problem.positive_quality = positive_quality;
  problem.negative_quality = negative_quality;
  return problem;
}

void save_problem(const std::filesystem::path& dir, const PuorlProblem& p) {
  std::filesystem::create_directories(dir);
  p.positive.save(dir / "positive.puorl");
  p.unlabeled.save(dir / "unlabeled.puorl");
  nlohmann::json meta{
      {"labeled_ratio", p.labeled_ratio},
      {"alpha_p_true", p.alpha_p_true},
      {"positive_spec", p.positive_spec},
      {"mixture", p.mixture},
      {"positive_quality", envs::quality_name(p.positive_quality)},
      {"negative_quality", envs::quality_name(p.negative_quality)},
  };
  io::atomic_write_file(dir / "meta.json", meta.dump(2) + "\n");
}

PuorlProblem load_problem(const std::filesystem::path& dir) {
  PuorlProblem p;
  p.positive = TransitionDataset::load(dir / "positive.puorl");
  p.unlabeled = TransitionDataset::load(dir / "unlabeled.puorl",
                                        p.positive.state_dim(),
                                        p.positive.action_dim());
  std::ifstream is(dir / "meta.json");
  if (!is) throw FormatError("cannot open problem meta: " + dir.string());
  nlohmann::json meta = nlohmann::json::parse(is);
  meta.at("labeled_ratio").get_to(p.labeled_ratio);
  meta.at("alpha_p_true").get_to(p.alpha_p_true);
  meta.at("positive_spec").get_to(p.positive_spec);
  meta.at("mixture").get_to(p.mixture);
  p.positive_quality =
      envs::parse_quality(meta.at("positive_quality").get<std::string>());
  p.negative_quality =
      envs::parse_quality(meta.at("negative_quality").get<std::string>());
  return p;
}

}  // namespace puorl::data
