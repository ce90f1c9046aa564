#include "puorl/data/dataset.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "puorl/io_util.hpp"

namespace puorl::data {

namespace {
constexpr char kMagic[9] = "PUORLDS1";
constexpr std::uint32_t kVersion = 1;
std::atomic<std::uint64_t> g_label_reads{0};
}  // namespace

TransitionDataset::TransitionDataset(int state_dim, int action_dim)
    : state_dim_(state_dim), action_dim_(action_dim) {
  if (state_dim <= 0 || action_dim <= 0) {
    throw ShapeError("dataset: dims must be positive");
  }
}

void TransitionDataset::reserve(std::size_t n) {
  s_.reserve(n * state_dim_);
  a_.reserve(n * action_dim_);
  r_.reserve(n);
  s2_.reserve(n * state_dim_);
  done_.reserve(n);
  true_domain_.reserve(n);
}

void TransitionDataset::push_back(const Transition& t) {
  if (static_cast<int>(t.s.size()) != state_dim_ ||
      static_cast<int>(t.s_next.size()) != state_dim_) {
    throw ShapeError("dataset push_back: state dim " +
                     std::to_string(t.s.size()) + ", expected " +
                     std::to_string(state_dim_));
  }
  if (static_cast<int>(t.a.size()) != action_dim_) {
    throw ShapeError("dataset push_back: action dim " +
                     std::to_string(t.a.size()) + ", expected " +
                     std::to_string(action_dim_));
  }
  s_.insert(s_.end(), t.s.begin(), t.s.end());
  a_.insert(a_.end(), t.a.begin(), t.a.end());
  r_.push_back(t.r);
  s2_.insert(s2_.end(), t.s_next.begin(), t.s_next.end());
  done_.push_back(t.done ? 1.0f : 0.0f);
  true_domain_.push_back(t.true_domain);
  ++count_;
}

TransitionDataset TransitionDataset::concat(const TransitionDataset& first,
                                            const TransitionDataset& second) {
  if (first.state_dim_ != second.state_dim_ ||
      first.action_dim_ != second.action_dim_) {
    throw ShapeError("dataset concat: dim mismatch (" +
                     std::to_string(first.state_dim_) + "," +
                     std::to_string(first.action_dim_) + ") vs (" +
                     std::to_string(second.state_dim_) + "," +
                     std::to_string(second.action_dim_) + ")");
  }
  TransitionDataset out(first.state_dim_, first.action_dim_);
  out.reserve(first.count_ + second.count_);
  auto append = [&out](const TransitionDataset& d) {
    out.s_.insert(out.s_.end(), d.s_.begin(), d.s_.end());
    out.a_.insert(out.a_.end(), d.a_.begin(), d.a_.end());
    out.r_.insert(out.r_.end(), d.r_.begin(), d.r_.end());
    out.s2_.insert(out.s2_.end(), d.s2_.begin(), d.s2_.end());
    out.done_.insert(out.done_.end(), d.done_.begin(), d.done_.end());
    out.true_domain_.insert(out.true_domain_.end(), d.true_domain_.begin(),
                            d.true_domain_.end());
    out.count_ += d.count_;
  };
  append(first);
  append(second);
  return out;
}

TransitionDataset TransitionDataset::gather(
    std::span<const std::uint32_t> indices) const {
  TransitionDataset out(state_dim_, action_dim_);
  out.reserve(indices.size());
  const auto sd = static_cast<std::size_t>(state_dim_);
  const auto ad = static_cast<std::size_t>(action_dim_);
  for (std::uint32_t i : indices) {
    if (i >= count_) throw DataError("dataset gather: index out of range");
    out.s_.insert(out.s_.end(), s_.begin() + i * sd, s_.begin() + (i + 1) * sd);
    out.a_.insert(out.a_.end(), a_.begin() + i * ad, a_.begin() + (i + 1) * ad);
    out.r_.push_back(r_[i]);
    out.s2_.insert(out.s2_.end(), s2_.begin() + i * sd,
                   s2_.begin() + (i + 1) * sd);
    out.done_.push_back(done_[i]);
    out.true_domain_.push_back(true_domain_[i]);
  }
  out.count_ = indices.size();
  return out;
}

void TransitionDataset::save(const std::filesystem::path& path) const {
  std::ostringstream os(std::ios::binary);
  io::write_bytes(os, kMagic, 8);
  io::write_u32(os, kVersion);
  io::write_u32(os, static_cast<std::uint32_t>(count_));
  io::write_u32(os, static_cast<std::uint32_t>(state_dim_));
  io::write_u32(os, static_cast<std::uint32_t>(action_dim_));
  io::write_f32_array(os, s_);
  io::write_f32_array(os, a_);
  io::write_f32_array(os, r_);
  io::write_f32_array(os, s2_);
  io::write_f32_array(os, done_);
  io::write_bytes(os, true_domain_.data(), true_domain_.size());
  io::atomic_write_file(path, os.str());
}

TransitionDataset TransitionDataset::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open dataset: " + path.string());
  io::expect_magic(is, kMagic, "dataset");
  const std::uint32_t version = io::read_u32(is, "dataset version");
  if (version != kVersion) {
    throw FormatError("dataset: unsupported version " +
                      std::to_string(version));
  }
  const std::uint32_t count = io::read_u32(is, "dataset count");
  const auto sd = static_cast<int>(io::read_u32(is, "dataset state_dim"));
  const auto ad = static_cast<int>(io::read_u32(is, "dataset action_dim"));
  if (sd <= 0 || ad <= 0) {
    throw FormatError("dataset: non-positive dims in header");
  }
  TransitionDataset out(sd, ad);
  out.count_ = count;
  out.s_.resize(static_cast<std::size_t>(count) * sd);
  out.a_.resize(static_cast<std::size_t>(count) * ad);
  out.r_.resize(count);
  out.s2_.resize(static_cast<std::size_t>(count) * sd);
  out.done_.resize(count);
  out.true_domain_.resize(count);
  io::read_f32_array(is, out.s_, "states");
  io::read_f32_array(is, out.a_, "actions");
  io::read_f32_array(is, out.r_, "rewards");
  io::read_f32_array(is, out.s2_, "next states");
  io::read_f32_array(is, out.done_, "done flags");
  io::read_bytes(is, out.true_domain_.data(), out.true_domain_.size(),
                 "domain labels");
  return out;
}

TransitionDataset TransitionDataset::load(const std::filesystem::path& path,
                                          int expect_state_dim,
                                          int expect_action_dim) {
  TransitionDataset ds = load(path);
  if (ds.state_dim_ != expect_state_dim) {
    throw ShapeError("dataset " + path.string() + ": state_dim expected " +
                     std::to_string(expect_state_dim) + ", found " +
                     std::to_string(ds.state_dim_));
  }
  if (ds.action_dim_ != expect_action_dim) {
    throw ShapeError("dataset " + path.string() + ": action_dim expected " +
                     std::to_string(expect_action_dim) + ", found " +
                     std::to_string(ds.action_dim_));
  }
  return ds;
}

bool TransitionDataset::bitwise_equal(const TransitionDataset& other) const {
  auto eq_f = [](const std::vector<float>& x, const std::vector<float>& y) {
    return x.size() == y.size() &&
           (x.empty() || std::memcmp(x.data(), y.data(),
                                     x.size() * sizeof(float)) == 0);
  };
  return state_dim_ == other.state_dim_ && action_dim_ == other.action_dim_ &&
         count_ == other.count_ && eq_f(s_, other.s_) && eq_f(a_, other.a_) &&
         eq_f(r_, other.r_) && eq_f(s2_, other.s2_) &&
         eq_f(done_, other.done_) && true_domain_ == other.true_domain_;
}

std::span<const std::uint8_t> eval_true_domains(const TransitionDataset& ds) {
  g_label_reads.fetch_add(1, std::memory_order_relaxed);
  return ds.true_domain_;
}

std::uint64_t eval_label_read_count() {
  return g_label_reads.load(std::memory_order_relaxed);
}

void eval_reset_label_read_count() {
  g_label_reads.store(0, std::memory_order_relaxed);
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_indices(
    std::size_t count, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split: fraction must be in (0,1)");
  }
  const auto n_first =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(count)));
  if (n_first == 0 || n_first >= count) {
    throw DataError("split: fraction " + std::to_string(fraction) + " on " +
                    std::to_string(count) + " rows leaves an empty side");
  }
  std::vector<std::uint32_t> idx(count);
  std::iota(idx.begin(), idx.end(), 0u);
  rng.shuffle(idx.begin(), idx.end());
  std::vector<std::uint32_t> first(idx.begin(), idx.begin() + n_first);
  std::vector<std::uint32_t> second(idx.begin() + n_first, idx.end());
  return {std::move(first), std::move(second)};
}

std::pair<TransitionDataset, TransitionDataset> split(
    const TransitionDataset& ds, double fraction, Rng& rng) {
  auto [first_idx, second_idx] = split_indices(ds.count(), fraction, rng);
  return {ds.gather(first_idx), ds.gather(second_idx)};
}

}  // namespace puorl::data
