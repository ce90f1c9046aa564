#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "gradcheck.hpp"
#include "puorl/eval/metrics.hpp"
#include "puorl/pulearn/classifier.hpp"

using namespace puorl;
using namespace puorl::pulearn;
using nn::MatF;
using nn::VecF;

namespace {

data::PuorlProblem small_body_mass_problem(std::size_t total = 20000,
                                           std::uint64_t seed = 100) {
  Rng rng(seed);
  return data::build_problem(envs::default_positive_spec(),
                             envs::body_mass_mixture(),
                             envs::DatasetQuality::MediumExpert,
                             envs::DatasetQuality::MediumExpert, total, 0.3,
                             0.03, rng);
}

}  // namespace

TEST_CASE("input builders produce the documented widths and contents") {
  Rng rng(3);
  const auto problem = small_body_mass_problem(1000 / 0.03 < 20000 ? 20000 : 20000);
  const auto& ds = problem.positive;
  const MatF dyn = build_inputs(ds, InputMode::DynamicsTriple);
  CHECK(dyn.cols() == 10);
  CHECK(dyn.rows() == static_cast<Eigen::Index>(ds.count()));
  CHECK(dyn(0, 0) == ds.states()[0]);
  CHECK(dyn(0, 4) == ds.actions()[0]);
  CHECK(dyn(0, 6) == ds.next_states()[0]);

  const MatF rew = build_inputs(ds, InputMode::RewardTriple);
  CHECK(rew.cols() == 7);
  CHECK(rew(0, 6) == ds.rewards()[0]);
}

TEST_CASE("nnpu risk: alpha 0 treats the unlabeled batch as fully negative") {
  VecF probs_p(2), probs_u(3);
  probs_p << 0.7f, 0.4f;
  probs_u << 0.3f, 0.6f, 0.1f;
  const double expected =
      (-std::log(0.7) - std::log(0.4) - std::log(0.9)) / 3.0;
  CHECK(nnpu_risk<float>(probs_p, probs_u, 0.0) ==
        doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("nnpu risk: alpha 1 with a confident correct classifier -> ~0") {
  VecF probs_p(3), probs_u(3);
  probs_p << 0.999f, 0.999f, 0.999f;
  probs_u << 0.999f, 0.999f, 0.999f;  // unlabeled identical to positives
  CHECK(nnpu_risk<float>(probs_p, probs_u, 1.0) ==
        doctest::Approx(0.0).epsilon(1e-2));
}

TEST_CASE("nnpu risk matches a brute-force evaluation of the estimator") {
  VecF probs_p(2), probs_u(2);
  probs_p << 0.9f, 0.8f;
  probs_u << 0.6f, 0.1f;
  const double alpha = 0.5;
  // direct evaluation
  const double rp_plus = (-std::log(0.9) - std::log(0.8)) / 2.0;
  const double rp_minus = (-std::log(0.1) - std::log(0.2)) / 2.0;
  const double ru_minus = (-std::log(0.4) - std::log(0.9)) / 2.0;
  const double expected =
      alpha * rp_plus + std::max(0.0, ru_minus - alpha * rp_minus);
  CHECK(nnpu_risk<float>(probs_p, probs_u, alpha) ==
        doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("nnpu risk rejects empty batches and bad alpha") {
  VecF probs_p(1), probs_u(1), empty;
  probs_p << 0.4f;
  probs_u << 0.6f;
  CHECK_THROWS_AS(nnpu_risk<float>(empty, probs_u, 0.5), DataError);
  CHECK_THROWS_AS(nnpu_risk<float>(probs_p, empty, 0.5), DataError);
  CHECK_THROWS_AS(nnpu_risk<float>(probs_p, probs_u, 1.5), ConfigError);
}

TEST_CASE("nnpu risk is invariant to row permutations within each side") {
  Rng rng(8);
  VecF probs_p(16), probs_u(32);
  for (int i = 0; i < probs_p.size(); ++i)
    probs_p[i] = rng.uniform_in(0.05f, 0.95f);
  for (int i = 0; i < probs_u.size(); ++i)
    probs_u[i] = rng.uniform_in(0.05f, 0.95f);
  const double base = nnpu_risk<float>(probs_p, probs_u, 0.3);
  std::vector<int> perm(static_cast<std::size_t>(probs_u.size()));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm.begin(), perm.end());
  VecF shuffled(probs_u.size());
  for (int i = 0; i < probs_u.size(); ++i)
    shuffled[i] = probs_u[perm[static_cast<std::size_t>(i)]];
  CHECK(nnpu_risk<float>(probs_p, shuffled, 0.3) ==
        doctest::Approx(base).epsilon(1e-7));
}

TEST_CASE("nnpu gradient matches finite differences through a net") {
  Rng rng(2023);
  nn::Mlp net = nn::Mlp::init({4, 8, 8, 1}, nn::Activation::ReLU,
                              nn::OutputActivation::Sigmoid, rng);
  MatF xp(6, 4), xu(9, 4);
  for (int i = 0; i < xp.size(); ++i) xp.data()[i] = rng.normalf();
  for (int i = 0; i < xu.size(); ++i) xu.data()[i] = rng.normalf();

  const double alpha = 0.4;
  nn::Mlp::Workspace wsp, wsu;
  const VecF probs_p = net.forward(xp, wsp).col(0);
  const VecF probs_u = net.forward(xu, wsu).col(0);
  VecF gp, gu;
  nnpu_risk<float>(probs_p, probs_u, alpha, &gp, &gu);
  auto grads = net.zero_grads();
  net.backward(xp, wsp, MatF(gp), grads);
  auto grads_u = net.zero_grads();
  net.backward(xu, wsu, MatF(gu), grads_u);
  grads.add(grads_u);

  const auto xpd = xp.cast<double>().eval();
  const auto xud = xu.cast<double>().eval();
  auto loss = [&](const gradcheck::MlpD& nd) {
    const nn::VecT<double> pp = nd.forward(xpd).col(0);
    const nn::VecT<double> pu = nd.forward(xud).col(0);
    return nnpu_risk<double>(pp, pu, alpha);
  };
  Rng check_rng(5);
  const auto rep =
      gradcheck::check(net, gradcheck::flatten_grads(grads), loss, check_rng);
  INFO("worst rel err ", rep.worst_rel);
  CHECK(rep.failed == 0);
}

TEST_CASE("cvir discard set: top-k by probability against a sort oracle") {
  const std::vector<float> probs{0.1f, 0.95f, 0.3f, 0.8f, 0.2f,
                                 0.85f, 0.05f, 0.6f, 0.4f, 0.7f};
  const auto discard = cvir_discard_set(probs, 0.3);
  REQUIRE(discard.size() == 3);
  // oracle: sort (prob desc, index asc) and take the first three
  std::vector<std::uint32_t> oracle{1, 5, 3};
  CHECK(std::vector<std::uint32_t>(discard.begin(), discard.end()) == oracle);
}

TEST_CASE("cvir ties break toward the lowest row index") {
  const std::vector<float> probs{0.5f, 0.9f, 0.5f, 0.9f, 0.1f};
  const auto discard = cvir_discard_set(probs, 0.6);  // k = 3
  CHECK(discard == std::vector<std::uint32_t>{1, 3, 0});
}

TEST_CASE("cvir with alpha 0 discards nothing") {
  const std::vector<float> probs{0.5f, 0.9f, 0.1f};
  CHECK(cvir_discard_set(probs, 0.0).empty());
}

TEST_CASE("cvir refuses to discard every row") {
  const std::vector<float> probs{0.5f, 0.9f, 0.1f};
  CHECK_THROWS_AS(cvir_discard_set(probs, 1.0), TrainingError);
}

TEST_CASE("bbe on a perfectly separated synthetic holdout counts the mixture") {
  // positives all score 1, negatives all 0; unlabeled is 30% positive
  std::vector<float> probs_p(200, 1.0f);
  std::vector<float> probs_u(1000, 0.0f);
  for (int i = 0; i < 300; ++i) probs_u[static_cast<std::size_t>(i)] = 1.0f;
  const BbeConstants k;
  const double alpha = bbe_from_probs(probs_p, probs_u, k);
  const double penalty = k.c * std::sqrt(std::log(1.0 / k.delta) / 1000.0);
  CHECK(alpha >= 0.30);
  CHECK(alpha <= 0.30 + penalty + 1e-9);
  CHECK(alpha <= 0.32);
}

TEST_CASE("bbe with unlabeled identical to positive holdout clamps to 1") {
  std::vector<float> probs(500, 0.9f);
  CHECK(bbe_from_probs(probs, probs, BbeConstants{}) == 1.0);
}

TEST_CASE("bbe with zero unlabeled positives stays at the penalty level") {
  std::vector<float> probs_p(200, 1.0f);
  std::vector<float> probs_u(1000, 0.0f);
  const BbeConstants k;
  const double alpha = bbe_from_probs(probs_p, probs_u, k);
  const double penalty = k.c * std::sqrt(std::log(1.0 / k.delta) / 1000.0);
  CHECK(alpha <= penalty + 1e-9);
}

TEST_CASE("bbe raises when the classifier collapsed") {
  std::vector<float> probs_p(100, 0.0f);  // q_p(z) = 0 for every z
  std::vector<float> probs_u(100, 0.5f);
  CHECK_THROWS_AS(bbe_from_probs(probs_p, probs_u, BbeConstants{}),
                  EstimationError);
}

TEST_CASE("bbe is monotone in confidently-positive additions") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Rng t = rng.child(static_cast<std::uint64_t>(trial));
    std::vector<float> probs_p(400), probs_u(1200);
    for (auto& p : probs_p) p = t.uniform_in(0.5f, 1.0f);
    for (auto& p : probs_u) p = t.uniformf();
    const double before = bbe_from_probs(probs_p, probs_u, BbeConstants{});
    auto extended = probs_u;
    const int add = 1 + static_cast<int>(t.below(300));
    for (int i = 0; i < add; ++i) extended.push_back(1.0f);
    const double after = bbe_from_probs(probs_p, extended, BbeConstants{});
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("trained classifier separates the mass shift on a small problem") {
  const auto problem = small_body_mass_problem();
  PuConfig cfg;
  cfg.epochs_warmup = 5;
  cfg.epochs_main = 20;
  Rng rng(7);
  const auto trained = train_classifier(problem, cfg, rng);
  const double acc = eval::classifier_accuracy(trained.state, problem,
                                               trained.unlabeled_holdout);
  INFO("holdout accuracy ", acc);
  CHECK(acc >= 0.9);
  CHECK(std::abs(static_cast<double>(trained.state.alpha_hat) -
                 problem.alpha_p_true) < 0.1);
}

TEST_CASE("training is bit-deterministic per seed") {
  const auto problem = small_body_mass_problem(20000, 55);
  PuConfig cfg;
  cfg.epochs_warmup = 2;
  cfg.epochs_main = 3;
  const auto a = train_classifier(problem, cfg, Rng(11));
  const auto b = train_classifier(problem, cfg, Rng(11));
  CHECK(a.state.alpha_hat == b.state.alpha_hat);
  for (std::size_t l = 0; l < a.state.net.weights.size(); ++l) {
    CHECK(a.state.net.weights[l] == b.state.net.weights[l]);
    CHECK(a.state.net.biases[l] == b.state.net.biases[l]);
  }
}

TEST_CASE("classifier checkpoint round-trips") {
  Rng rng(20);
  ClassifierState c;
  c.net = nn::Mlp::init({10, 16, 1}, nn::Activation::ReLU,
                        nn::OutputActivation::Sigmoid, rng);
  c.input_mode = InputMode::RewardTriple;
  c.alpha_hat = 0.293f;
  const auto path =
      std::filesystem::temp_directory_path() / "puorl_classifier.ckpt";
  save_classifier(path, c);
  const auto back = load_classifier(path);
  CHECK(back.input_mode == InputMode::RewardTriple);
  CHECK(back.alpha_hat == 0.293f);
  for (std::size_t l = 0; l < c.net.weights.size(); ++l) {
    CHECK(back.net.weights[l] == c.net.weights[l]);
  }
}

TEST_CASE("cvir epochs never mask positive rows") {
  // Structural property: the discard set indexes the unlabeled side only,
  // and the epoch trains on all positives plus unlabeled survivors.
  const std::vector<float> probs{0.99f, 0.98f, 0.97f, 0.1f};
  const auto discard = cvir_discard_set(probs, 0.5);
  for (auto i : discard) CHECK(i < probs.size());
  CHECK(discard.size() == 2);
}
