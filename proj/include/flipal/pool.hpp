#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "flipal/pseudo_label.hpp"

namespace flipal {

/// Labeled / unlabeled partition of the training images. Pseudo-labels are
/// attached to unlabeled images only.
struct Pool {
  std::set<ImageId> labeled;
  std::set<ImageId> unlabeled;
  std::map<ImageId, std::vector<PseudoLabel>> pseudo;
  int cycle = 0;

  std::size_t size() const { return labeled.size() + unlabeled.size(); }
  std::size_t pseudo_count() const;
  /// Throws std::logic_error naming the first broken invariant.
  void check_invariants() const;
};

/// Seeded uniform draw of `initial_budget` ids into the labeled set.
Pool init_pool(std::span<const ImageId> dataset_ids, std::size_t initial_budget,
               std::uint64_t seed);

/// Moves `selected` from unlabeled to labeled, drops their pseudo-labels and
/// advances the cycle counter.
Pool commit_selection(const Pool& pool, std::span<const ImageId> selected);

enum class BatchMode { kBalancedHalf, kBalancedQuarter, kRandom };

std::string_view to_string(BatchMode m);
BatchMode parse_batch_mode(std::string_view name);

struct MiniBatch {
  std::vector<ImageId> labeled;
  std::vector<ImageId> unlabeled;
};

/// Draws `n_batches` mini-batches. Balanced modes fix the labeled share
/// (half or quarter of `batch_size`) and walk each partition in a shuffled
/// order, reshuffling whenever a pass is exhausted. Random mode walks the
/// union of both partitions the same way.
std::vector<MiniBatch> balanced_batches(const Pool& pool, std::size_t batch_size,
                                        BatchMode mode, std::size_t n_batches,
                                        std::uint64_t seed);

}  // namespace flipal
