#include "flipal/class_dist.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace flipal {

ClassDist::ClassDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw std::invalid_argument("class distribution needs at least 2 categories");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument("class probability out of [0,1]: " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("class distribution sums to " + std::to_string(sum));
  }
}

ClassDist ClassDist::normalized(std::vector<double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw std::invalid_argument("cannot normalize non-positive weights");
  }
  for (double& w : weights) {
    if (w < 0.0) throw std::invalid_argument("negative weight");
    w /= sum;
  }
  return ClassDist(std::move(weights));
}

ClassDist ClassDist::one_hot(std::size_t size, std::size_t index) {
  std::vector<double> p(size, 0.0);
  p.at(index) = 1.0;
  return ClassDist(std::move(p));
}

ClassDist ClassDist::uniform(std::size_t size) {
  return ClassDist(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

std::size_t ClassDist::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

std::size_t ClassDist::foreground_argmax() const {
  std::size_t best = 1;
  for (std::size_t i = 2; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

ClassDist ClassDist::foreground_only() const {
  if (probs_.size() < 3) {
    throw std::invalid_argument("need at least two foreground classes to drop background");
  }
  std::vector<double> fg(probs_.begin() + 1, probs_.end());
  const double sum = std::accumulate(fg.begin(), fg.end(), 0.0);
  if (!(sum > 0.0)) return uniform(fg.size());
  for (double& p : fg) p /= sum;
  return ClassDist(std::move(fg));
}

}  // namespace flipal
