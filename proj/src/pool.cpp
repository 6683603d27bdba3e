#include "flipal/pool.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace flipal {

std::size_t Pool::pseudo_count() const {
  std::size_t n = 0;
  for (const auto& [id, pls] : pseudo) n += pls.size();
  return n;
}

void Pool::check_invariants() const {
  for (const auto& id : labeled) {
    if (unlabeled.contains(id)) throw std::logic_error("image '" + id + "' is in both L and U");
  }
  for (const auto& [id, pls] : pseudo) {
    if (!unlabeled.contains(id)) {
      throw std::logic_error("pseudo-labels attached to non-unlabeled image '" + id + "'");
    }
  }
  if (cycle < 0) throw std::logic_error("negative cycle index");
}

Pool init_pool(std::span<const ImageId> dataset_ids, std::size_t initial_budget,
               std::uint64_t seed) {
  if (initial_budget > dataset_ids.size()) {
    throw std::invalid_argument("initial budget " + std::to_string(initial_budget) +
                                " exceeds dataset size " + std::to_string(dataset_ids.size()));
  }
  std::vector<ImageId> ids(dataset_ids.begin(), dataset_ids.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("duplicate image ids in dataset");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  Pool pool;
  pool.labeled.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(initial_budget));
  pool.unlabeled.insert(ids.begin() + static_cast<std::ptrdiff_t>(initial_budget), ids.end());
  pool.check_invariants();
  return pool;
}

Pool commit_selection(const Pool& pool, std::span<const ImageId> selected) {
  Pool next = pool;
  for (const auto& id : selected) {
    if (next.unlabeled.erase(id) == 0) {
      throw std::invalid_argument("already labeled or unknown: '" + id + "'");
    }
    next.labeled.insert(id);
    next.pseudo.erase(id);
  }
  ++next.cycle;
  next.check_invariants();
  return next;
}

std::string_view to_string(BatchMode m) {
  switch (m) {
    case BatchMode::kBalancedHalf:
      return "balanced_half";
    case BatchMode::kBalancedQuarter:
      return "balanced_quarter";
    case BatchMode::kRandom:
      return "random";
  }
  return "unknown";
}

BatchMode parse_batch_mode(std::string_view name) {
  for (auto m : {BatchMode::kBalancedHalf, BatchMode::kBalancedQuarter, BatchMode::kRandom}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown batch mode '" + std::string(name) + "'");
}

namespace {

/// Endless shuffled walk over a fixed id list.
class EpochSampler {
 public:
  EpochSampler(std::vector<ImageId> ids, std::mt19937_64& rng) : ids_(std::move(ids)), rng_(rng) {
    reshuffle();
  }

  const ImageId& next() {
    if (pos_ == ids_.size()) reshuffle();
    return ids_[pos_++];
  }

 private:
  void reshuffle() {
    std::shuffle(ids_.begin(), ids_.end(), rng_);
    pos_ = 0;
  }

  std::vector<ImageId> ids_;
  std::mt19937_64& rng_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<MiniBatch> balanced_batches(const Pool& pool, std::size_t batch_size,
                                        BatchMode mode, std::size_t n_batches,
                                        std::uint64_t seed) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  std::mt19937_64 rng(seed);
  std::vector<MiniBatch> out;
  out.reserve(n_batches);

  if (mode == BatchMode::kRandom) {
    if (pool.size() == 0) throw std::invalid_argument("pool is empty");
    std::vector<ImageId> all(pool.labeled.begin(), pool.labeled.end());
    all.insert(all.end(), pool.unlabeled.begin(), pool.unlabeled.end());
    EpochSampler sampler(std::move(all), rng);
    for (std::size_t b = 0; b < n_batches; ++b) {
      MiniBatch mb;
      for (std::size_t k = 0; k < batch_size; ++k) {
        const auto& id = sampler.next();
        (pool.labeled.contains(id) ? mb.labeled : mb.unlabeled).push_back(id);
      }
      out.push_back(std::move(mb));
    }
    return out;
  }

  const std::size_t divisor = mode == BatchMode::kBalancedHalf ? 2 : 4;
  if (batch_size % divisor != 0) {
    throw std::invalid_argument("batch size " + std::to_string(batch_size) +
                                " not divisible by " + std::to_string(divisor) + " for " +
                                std::string(to_string(mode)));
  }
  if (pool.labeled.empty() || pool.unlabeled.empty()) {
    throw std::invalid_argument("balanced batches need non-empty labeled and unlabeled sets");
  }
  const std::size_t n_lab = batch_size / divisor;
  EpochSampler lab({pool.labeled.begin(), pool.labeled.end()}, rng);
  EpochSampler unl({pool.unlabeled.begin(), pool.unlabeled.end()}, rng);
  for (std::size_t b = 0; b < n_batches; ++b) {
    MiniBatch mb;
    for (std::size_t k = 0; k < n_lab; ++k) mb.labeled.push_back(lab.next());
    for (std::size_t k = n_lab; k < batch_size; ++k) mb.unlabeled.push_back(unl.next());
    out.push_back(std::move(mb));
  }
  return out;
}

}  // namespace flipal
