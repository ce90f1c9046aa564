#include "puorl/filtering/filter.hpp"

#include <nlohmann/json.hpp>

#include "puorl/eval/metrics.hpp"
#include "puorl/io_util.hpp"

namespace puorl::filtering {

FilterOutcome filter_by_scores(const data::PuorlProblem& problem,
                               std::span<const float> scores,
                               double threshold) {
  if (scores.size() != problem.unlabeled.count()) {
    throw ShapeError("filter: got " + std::to_string(scores.size()) +
                     " scores for " + std::to_string(problem.unlabeled.count()) +
                     " unlabeled rows");
  }
  FilterOutcome out;
  out.report.decision_threshold = threshold;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= static_cast<float>(threshold)) {
      out.kept_indices.push_back(static_cast<std::uint32_t>(i));
    }
  }
  out.kept = problem.unlabeled.gather(out.kept_indices);
  out.report.kept_count = out.kept_indices.size();
  out.report.dropped_count = scores.size() - out.kept_indices.size();
  return out;
}

std::vector<float> classifier_scores(const pulearn::ClassifierState& c,
                                     const data::TransitionDataset& ds) {
  const int want = c.net.input_dim();
  const int have =
      pulearn::input_dim(c.input_mode, ds.state_dim(), ds.action_dim());
  if (want != have) {
    throw ModeError("classifier expects input dim " + std::to_string(want) +
                    " but dataset yields " + std::to_string(have) +
                    " in mode " + pulearn::input_mode_name(c.input_mode));
  }
  const nn::MatF x = pulearn::build_inputs(ds, c.input_mode);
  nn::Mlp::Workspace ws;
  std::vector<float> scores(ds.count());
  const Eigen::Index chunk = 4096;
  for (Eigen::Index start = 0; start < x.rows(); start += chunk) {
    const Eigen::Index n = std::min(chunk, x.rows() - start);
    const nn::MatF block = x.middleRows(start, n);
    const nn::MatF& y = c.net.forward(block, ws);
    for (Eigen::Index i = 0; i < n; ++i) {
      scores[static_cast<std::size_t>(start + i)] = y(i, 0);
    }
  }
  return scores;
}

FilterOutcome filter_unlabeled(const pulearn::ClassifierState& c,
                               const data::PuorlProblem& problem,
                               double threshold) {
  return filter_by_scores(problem, classifier_scores(c, problem.unlabeled),
                          threshold);
}

void fill_filter_metrics(FilterOutcome& outcome,
                         const data::PuorlProblem& problem) {
  const auto pr = eval::filter_precision_recall(problem, outcome.kept_indices);
  outcome.report.precision = pr.precision;
  outcome.report.recall = pr.recall;
}

data::TransitionDataset augment(const data::PuorlProblem& problem,
                                const data::TransitionDataset& filtered) {
  return data::TransitionDataset::concat(problem.positive, filtered);
}

std::string report_to_json(const FilterReport& r) {
  nlohmann::json j{{"kept_count", r.kept_count},
                   {"dropped_count", r.dropped_count},
                   {"decision_threshold", r.decision_threshold}};
  if (std::isfinite(r.precision)) j["precision"] = r.precision;
  if (std::isfinite(r.recall)) j["recall"] = r.recall;
  return j.dump(2) + "\n";
}

void save_report(const std::filesystem::path& path, const FilterReport& r) {
  io::atomic_write_file(path, report_to_json(r));
}

}  // namespace puorl::filtering
