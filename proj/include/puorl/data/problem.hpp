#pragma once

#include "puorl/data/dataset.hpp"
#include "puorl/envs/puck.hpp"

namespace puorl::data {

// A positive dataset plus a domain-unlabeled mixture dataset. alpha_p_true is
// the realized positive fraction inside `unlabeled`; it exists for scoring
// only and no learner may read it (estimators must infer their own).
struct PuorlProblem {
  TransitionDataset positive;
  TransitionDataset unlabeled;
  double labeled_ratio = 0.0;
  double alpha_p_true = 0.0;
  envs::DomainSpec positive_spec;
  envs::MixtureSpec mixture;
  envs::DatasetQuality positive_quality = envs::DatasetQuality::MediumExpert;
  envs::DatasetQuality negative_quality = envs::DatasetQuality::MediumExpert;
};

// Generates round(alpha_p * total_count) positive transitions and fills the
// rest from the negative mixture (domain drawn per episode from eta). The
// positive pool is shuffled; the first round(labeled_ratio * total_count)
// rows become the labeled positive set, everything else lands in the
// unlabeled set, which is shuffled again.
PuorlProblem build_problem(const envs::DomainSpec& positive_spec,
                           const envs::MixtureSpec& mixture,
                           envs::DatasetQuality positive_quality,
                           envs::DatasetQuality negative_quality,
                           std::size_t total_count, double alpha_p,
                           double labeled_ratio, Rng& rng);

// Directory layout: positive.puorl, unlabeled.puorl, meta.json.
void save_problem(const std::filesystem::path& dir, const PuorlProblem& p);
PuorlProblem load_problem(const std::filesystem::path& dir);

}  // namespace puorl::data
