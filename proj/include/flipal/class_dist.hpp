#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flipal {

/// Softmax output over K+1 categories. Index 0 is background, 1..K are the
/// foreground classes. Construction validates range and normalization.
class ClassDist {
 public:
  static constexpr double kSumTolerance = 1e-6;

  ClassDist() = default;
  explicit ClassDist(std::vector<double> probs);

  /// Builds from unnormalized non-negative weights.
  static ClassDist normalized(std::vector<double> weights);
  static ClassDist one_hot(std::size_t size, std::size_t index);
  static ClassDist uniform(std::size_t size);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  std::size_t num_foreground() const { return probs_.empty() ? 0 : probs_.size() - 1; }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// Argmax over all categories, background included. Ties go to the lower index.
  std::size_t argmax() const;
  double max_prob() const { return probs_[argmax()]; }

  /// Argmax over foreground classes only (1..K).
  std::size_t foreground_argmax() const;
  double foreground_max() const { return probs_[foreground_argmax()]; }

  /// Foreground probabilities renormalized to sum to 1 (background dropped).
  ClassDist foreground_only() const;

  friend bool operator==(const ClassDist&, const ClassDist&) = default;

 private:
  std::vector<double> probs_;
};

}  // namespace flipal
