#pragma once

#include <span>
#include <vector>

#include "puorl/data/problem.hpp"
#include "puorl/pulearn/classifier.hpp"

// Scoring helpers that read the hidden domain labels. Learner code must not
// include this header; every label read goes through the counted accessor in
// the dataset module.
namespace puorl::eval {

// Fraction of the given unlabeled-set rows whose thresholded classifier
// output matches their hidden label (positive = domain 0).
double classifier_accuracy(const pulearn::ClassifierState& c,
                           const data::PuorlProblem& problem,
                           std::span<const std::uint32_t> unlabeled_rows,
                           double threshold = 0.5);

// Fraction of rows with hidden label 0.
double positive_purity(const data::TransitionDataset& ds);

// Count of rows with hidden label 0.
std::size_t positive_count(const data::TransitionDataset& ds);

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 0.0;
};

// Kept-set quality against hidden labels. `kept` holds row indices into the
// unlabeled set. An empty kept set scores precision 1 (vacuous) / recall 0.
PrecisionRecall filter_precision_recall(const data::PuorlProblem& problem,
                                        std::span<const std::uint32_t> kept);

}  // namespace puorl::eval
