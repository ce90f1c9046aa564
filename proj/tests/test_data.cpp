#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "puorl/data/dataset.hpp"
#include "puorl/data/problem.hpp"

using namespace puorl;
using namespace puorl::data;

namespace {

TransitionDataset tiny_dataset(int n, int sd = 2, int ad = 1,
                               std::uint64_t seed = 1) {
  TransitionDataset ds(sd, ad);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    Transition t;
    for (int k = 0; k < sd; ++k) t.s.push_back(rng.normalf());
    for (int k = 0; k < ad; ++k) t.a.push_back(rng.normalf());
    t.r = rng.normalf();
    for (int k = 0; k < sd; ++k) t.s_next.push_back(rng.normalf());
    t.done = (i % 7 == 0);
    t.true_domain = static_cast<std::uint8_t>(i % 3);
    ds.push_back(t);
  }
  return ds;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "puorl_test_data";
  std::filesystem::create_directories(dir);
  return dir;
}

// Order-insensitive fingerprint of a dataset's rows.
std::multiset<std::string> row_multiset(const TransitionDataset& ds) {
  std::multiset<std::string> out;
  const auto sd = static_cast<std::size_t>(ds.state_dim());
  const auto ad = static_cast<std::size_t>(ds.action_dim());
  for (std::size_t i = 0; i < ds.count(); ++i) {
    std::string key;
    auto add = [&key](const float* p, std::size_t n) {
      key.append(reinterpret_cast<const char*>(p), n * sizeof(float));
    };
    add(ds.states().data() + i * sd, sd);
    add(ds.actions().data() + i * ad, ad);
    add(ds.rewards().data() + i, 1);
    add(ds.next_states().data() + i * sd, sd);
    add(ds.dones().data() + i, 1);
    out.insert(std::move(key));
  }
  return out;
}

}  // namespace

TEST_CASE("save/load round-trips bit-exactly") {
  const auto ds = tiny_dataset(3);
  const auto path = temp_dir() / "roundtrip.puorl";
  ds.save(path);
  const auto back = TransitionDataset::load(path);
  CHECK(back.bitwise_equal(ds));
}

TEST_CASE("corrupted magic byte raises a format error") {
  const auto ds = tiny_dataset(3);
  const auto path = temp_dir() / "badmagic.puorl";
  ds.save(path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('Z');
  }
  CHECK_THROWS_AS(TransitionDataset::load(path), FormatError);
}

TEST_CASE("truncated file raises a format error") {
  const auto ds = tiny_dataset(10);
  const auto path = temp_dir() / "trunc.puorl";
  ds.save(path);
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size / 2);
  CHECK_THROWS_AS(TransitionDataset::load(path), FormatError);
}

TEST_CASE("dimension mismatch on load names expected and found") {
  const auto ds = tiny_dataset(4, 3, 2);
  const auto path = temp_dir() / "dims.puorl";
  ds.save(path);
  CHECK_NOTHROW(TransitionDataset::load(path, 3, 2));
  try {
    TransitionDataset::load(path, 5, 2);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("expected 5") != std::string::npos);
    CHECK(msg.find("found 3") != std::string::npos);
  }
}

TEST_CASE("split 0.8 of 1000 rows gives 800/200, disjoint and exhaustive") {
  const auto ds = tiny_dataset(1000);
  Rng rng(42);
  const auto [train, holdout] = split(ds, 0.8, rng);
  CHECK(train.count() == 800);
  CHECK(holdout.count() == 200);
  auto all = row_multiset(ds);
  auto combined = row_multiset(train);
  for (auto& k : row_multiset(holdout)) combined.insert(k);
  CHECK(combined == all);
}

TEST_CASE("split is deterministic per seed") {
  const auto ds = tiny_dataset(50);
  Rng r1(7), r2(7);
  const auto [a1, b1] = split(ds, 0.5, r1);
  const auto [a2, b2] = split(ds, 0.5, r2);
  CHECK(a1.bitwise_equal(a2));
  CHECK(b1.bitwise_equal(b2));
}

TEST_CASE("split rejects empty sides") {
  const auto ds = tiny_dataset(3);
  Rng rng(1);
  CHECK_THROWS_AS(split(ds, 0.05, rng), DataError);
  CHECK_THROWS_AS(split(ds, 0.99, rng), DataError);
  CHECK_THROWS_AS(split(ds, 1.5, rng), ConfigError);
}

TEST_CASE("hidden labels sit behind the counted eval accessor") {
  const auto ds = tiny_dataset(5);
  eval_reset_label_read_count();
  CHECK(eval_label_read_count() == 0);
  const auto labels = eval_true_domains(ds);
  CHECK(labels.size() == 5);
  CHECK(eval_label_read_count() == 1);
  eval_true_domains(ds);
  CHECK(eval_label_read_count() == 2);
  eval_reset_label_read_count();
}

TEST_CASE("concat rejects dim mismatch and adds counts") {
  const auto a = tiny_dataset(3, 2, 1);
  const auto b = tiny_dataset(4, 2, 1, 9);
  const auto c = TransitionDataset::concat(a, b);
  CHECK(c.count() == 7);
  const auto bad = tiny_dataset(2, 3, 1);
  CHECK_THROWS_AS(TransitionDataset::concat(a, bad), ShapeError);
}

TEST_CASE("build_problem: counts forced by ratio arithmetic") {
  Rng rng(12);
  const auto problem = build_problem(
      envs::default_positive_spec(), envs::body_mass_mixture(),
      envs::DatasetQuality::Medium, envs::DatasetQuality::Medium, 100000, 0.3,
      0.01, rng);
  CHECK(problem.positive.count() == 1000);
  CHECK(problem.unlabeled.count() == 99000);
  CHECK(problem.alpha_p_true == doctest::Approx(29000.0 / 99000.0).epsilon(1e-12));

  // every labeled row is truly positive
  const auto pos_labels = eval_true_domains(problem.positive);
  CHECK(std::all_of(pos_labels.begin(), pos_labels.end(),
                    [](std::uint8_t d) { return d == 0; }));

  // realized unlabeled composition matches alpha_p_true exactly by counting
  const auto u_labels = eval_true_domains(problem.unlabeled);
  const auto n_pos = static_cast<double>(
      std::count(u_labels.begin(), u_labels.end(), std::uint8_t{0}));
  CHECK(n_pos / static_cast<double>(u_labels.size()) ==
        doctest::Approx(problem.alpha_p_true).epsilon(1e-12));
  CHECK(std::abs(n_pos / static_cast<double>(u_labels.size()) -
                 problem.alpha_p_true) < 0.01);
}

TEST_CASE("build_problem conserves total count") {
  Rng rng(13);
  const auto problem = build_problem(
      envs::default_positive_spec(), envs::body_mass_mixture(),
      envs::DatasetQuality::MediumExpert, envs::DatasetQuality::Random, 10000,
      0.3, 0.03, rng);
  CHECK(problem.positive.count() + problem.unlabeled.count() == 10000);
}

TEST_CASE("labeled_ratio close to alpha_p drains unlabeled positives") {
  Rng rng(14);
  const auto problem = build_problem(
      envs::default_positive_spec(), envs::body_mass_mixture(),
      envs::DatasetQuality::Medium, envs::DatasetQuality::Medium, 10000, 0.3,
      0.299, rng);
  CHECK(problem.alpha_p_true < 0.002);
  const auto u_labels = eval_true_domains(problem.unlabeled);
  const auto n_pos =
      std::count(u_labels.begin(), u_labels.end(), std::uint8_t{0});
  CHECK(n_pos == 10);  // 3000 positives minus 2990 labeled
}

TEST_CASE("two-domain mixture counts stay within 3 sigma") {
  Rng rng(15);
  // 20000 total, alpha 0.5 -> 10000 negatives over two equal-weight domains.
  const auto problem = build_problem(
      envs::default_positive_spec(), envs::mixture_shift_mixture(),
      envs::DatasetQuality::Medium, envs::DatasetQuality::Medium, 20000, 0.5,
      0.01, rng);
  const auto labels = eval_true_domains(problem.unlabeled);
  const auto n1 = std::count(labels.begin(), labels.end(), std::uint8_t{1});
  const auto n2 = std::count(labels.begin(), labels.end(), std::uint8_t{2});
  CHECK(n1 + n2 == 10000);
  // Domains are assigned per 100-step episode: 100 episodes, sigma = 100 *
  // sqrt(100 * 0.25) = 500.
  CHECK(std::abs(static_cast<double>(n1) - 5000.0) <= 3.0 * 500.0);
}

TEST_CASE("build_problem validates its ratios") {
  Rng rng(16);
  const auto spec = envs::default_positive_spec();
  const auto mix = envs::body_mass_mixture();
  const auto q = envs::DatasetQuality::Medium;
  CHECK_THROWS_AS(build_problem(spec, mix, q, q, 10000, 0.3, 0.3, rng),
                  ConfigError);
  CHECK_THROWS_AS(build_problem(spec, mix, q, q, 10000, 0.3, 0.35, rng),
                  ConfigError);
  CHECK_THROWS_AS(build_problem(spec, mix, q, q, 500, 0.3, 0.01, rng),
                  ConfigError);
  CHECK_THROWS_AS(build_problem(spec, mix, q, q, 10000, 1.2, 0.01, rng),
                  ConfigError);
}

TEST_CASE("problem round-trips through its directory layout") {
  Rng rng(17);
  const auto problem = build_problem(
      envs::default_positive_spec(), envs::mixture_shift_mixture(),
      envs::DatasetQuality::MediumExpert, envs::DatasetQuality::Random, 2000,
      0.3, 0.01, rng);
  const auto dir = temp_dir() / "problem_roundtrip";
  save_problem(dir, problem);
  const auto back = load_problem(dir);
  CHECK(back.positive.bitwise_equal(problem.positive));
  CHECK(back.unlabeled.bitwise_equal(problem.unlabeled));
  CHECK(back.labeled_ratio == problem.labeled_ratio);
  CHECK(back.alpha_p_true == problem.alpha_p_true);
  CHECK(back.mixture.eta == problem.mixture.eta);
  CHECK(back.positive_quality == problem.positive_quality);
}

TEST_CASE("same seed rebuilds the identical problem") {
  Rng r1(18), r2(18);
  const auto q = envs::DatasetQuality::Medium;
  const auto p1 = build_problem(envs::default_positive_spec(),
                                envs::body_mass_mixture(), q, q, 2000, 0.3,
                                0.05, r1);
  const auto p2 = build_problem(envs::default_positive_spec(),
                                envs::body_mass_mixture(), q, q, 2000, 0.3,
                                0.05, r2);
  CHECK(p1.positive.bitwise_equal(p2.positive));
  CHECK(p1.unlabeled.bitwise_equal(p2.unlabeled));
}
