#include "puorl/eval/metrics.hpp"

namespace puorl::eval {

double classifier_accuracy(const pulearn::ClassifierState& c,
                           const data::PuorlProblem& problem,
                           std::span<const std::uint32_t> unlabeled_rows,
                           double threshold) {
  if (unlabeled_rows.empty()) throw DataError("classifier_accuracy: no rows");
  const nn::MatF all = pulearn::build_inputs(problem.unlabeled, c.input_mode);
  const auto labels = data::eval_true_domains(problem.unlabeled);
  nn::Mlp::Workspace ws;
  std::size_t correct = 0;
  const Eigen::Index chunk = 4096;
  nn::MatF block;
  for (std::size_t start = 0; start < unlabeled_rows.size();
       start += static_cast<std::size_t>(chunk)) {
    const auto n = static_cast<Eigen::Index>(
        std::min(static_cast<std::size_t>(chunk), unlabeled_rows.size() - start));
    block.resize(n, all.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      block.row(i) = all.row(unlabeled_rows[start + static_cast<std::size_t>(i)]);
    }
    const nn::MatF& y = c.net.forward(block, ws);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool predicted_positive = y(i, 0) >= static_cast<float>(threshold);
      const bool truly_positive =
          labels[unlabeled_rows[start + static_cast<std::size_t>(i)]] == 0;
      correct += (predicted_positive == truly_positive);
    }
  }
  return static_cast<double>(correct) /
         static_cast<double>(unlabeled_rows.size());
}

double positive_purity(const data::TransitionDataset& ds) {
  if (ds.count() == 0) throw DataError("positive_purity: empty dataset");
  return static_cast<double>(positive_count(ds)) /
         static_cast<double>(ds.count());
}

std::size_t positive_count(const data::TransitionDataset& ds) {
  const auto labels = data::eval_true_domains(ds);
  std::size_t n = 0;
  for (auto d : labels) n += (d == 0);
  return n;
}

PrecisionRecall filter_precision_recall(const data::PuorlProblem& problem,
                                        std::span<const std::uint32_t> kept) {
  const auto labels = data::eval_true_domains(problem.unlabeled);
  std::size_t total_pos = 0;
  for (auto d : labels) total_pos += (d == 0);
  std::size_t kept_pos = 0;
  for (auto i : kept) kept_pos += (labels[i] == 0);
  PrecisionRecall pr;
  pr.precision = kept.empty()
                     ? 1.0
                     : static_cast<double>(kept_pos) /
                           static_cast<double>(kept.size());
  pr.recall = (total_pos == 0)
                  ? 1.0
                  : static_cast<double>(kept_pos) /
                        static_cast<double>(total_pos);
  return pr;
}

}  // namespace puorl::eval
