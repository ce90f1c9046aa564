#pragma once

#include <filesystem>
#include <vector>

#include "puorl/data/problem.hpp"
#include "puorl/pulearn/classifier.hpp"

namespace puorl::filtering {

struct FilterReport {
  std::size_t kept_count = 0;
  std::size_t dropped_count = 0;
  // Quality against hidden labels; NaN until an evaluation pass fills them.
  double precision = std::numeric_limits<double>::quiet_NaN();
  double recall = std::numeric_limits<double>::quiet_NaN();
  double decision_threshold = 0.5;
};

struct FilterOutcome {
  data::TransitionDataset kept;
  std::vector<std::uint32_t> kept_indices;  // rows of the unlabeled set
  FilterReport report;
};

// Rows of the unlabeled set whose score clears the threshold, in original
// order. Scores come from any source: the trained classifier in production,
// a hidden-label oracle in test doubles.
FilterOutcome filter_by_scores(const data::PuorlProblem& problem,
                               std::span<const float> scores,
                               double threshold);

// Classifier probabilities for every unlabeled row. Throws ModeError when the
// classifier input width does not match the dataset's dims under its mode.
std::vector<float> classifier_scores(const pulearn::ClassifierState& c,
                                     const data::TransitionDataset& ds);

// Applies the frozen classifier to the unlabeled set and keeps predicted
// positives. precision/recall in the report stay unset; evaluation code
// fills them via fill_filter_metrics.
FilterOutcome filter_unlabeled(const pulearn::ClassifierState& c,
                               const data::PuorlProblem& problem,
                               double threshold = 0.5);

// Evaluation-only: scores the kept set against hidden labels.
void fill_filter_metrics(FilterOutcome& outcome,
                         const data::PuorlProblem& problem);

// Labeled positives followed by the filtered rows; no deduplication.
data::TransitionDataset augment(const data::PuorlProblem& problem,
                                const data::TransitionDataset& filtered);

std::string report_to_json(const FilterReport& r);
void save_report(const std::filesystem::path& path, const FilterReport& r);

}  // namespace puorl::filtering
