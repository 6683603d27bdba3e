#include "flipal/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace flipal {

namespace {

double clamped_log(double p) { return std::log(std::clamp(p, kLogEpsilon, 1.0)); }

double kl(std::span<const double> p, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) acc += p[i] * (clamped_log(p[i]) - clamped_log(q[i]));
  }
  return acc;
}

ClassDist view(const ClassDist& d, bool include_background) {
  return include_background ? d : d.foreground_only();
}

double score_field(const AcquisitionScore& s, Strategy strategy) {
  switch (strategy) {
    case Strategy::kEntropy:
      return s.entropy;
    case Strategy::kInconsistency:
      return s.inconsistency;
    case Strategy::kUnified:
      return s.unified;
    case Strategy::kRandom:
      break;
  }
  return 0.0;
}

}  // namespace

double sym_kl(const ClassDist& p, const ClassDist& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("sym_kl: distribution length mismatch (" +
                                std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                                ")");
  }
  const double v = 0.5 * (kl(p.probs(), q.probs()) + kl(q.probs(), p.probs()));
  return v > 0.0 ? v : 0.0;
}

double entropy(const ClassDist& p) {
  double acc = 0.0;
  for (double v : p.probs()) {
    if (v > 0.0) acc -= v * clamped_log(v);
  }
  return acc > 0.0 ? acc : 0.0;
}

double image_inconsistency(std::span<const MatchedPair> pairs, bool include_background) {
  double best = 0.0;
  for (const auto& pr : pairs) {
    best = std::max(best, sym_kl(view(pr.original.dist, include_background),
                                 view(pr.flipped.dist, include_background)));
  }
  return best;
}

double image_entropy(std::span<const Detection> dets, bool include_background) {
  double best = 0.0;
  for (const auto& d : dets) best = std::max(best, entropy(view(d.dist, include_background)));
  return best;
}

AcquisitionScore unified_score(const ImagePrediction& orig, const ImagePrediction& flipped,
                               const AcquisitionOptions& opts) {
  const auto kept = nms(orig, opts.nms);
  const auto kept_flipped = nms(hflip(flipped), opts.nms);
  const auto matched = match_predictions(kept, kept_flipped, opts.match);

  AcquisitionScore s;
  s.image_id = orig.image_id;
  if (kept.detections.empty()) return s;

  s.entropy = image_entropy(kept.detections, opts.include_background);
  s.inconsistency = image_inconsistency(matched.pairs, opts.include_background);
  if (opts.unmatched_penalty &&
      (!matched.unmatched_original.empty() || !matched.unmatched_flipped.empty())) {
    s.inconsistency = std::max(s.inconsistency, *opts.unmatched_penalty);
  }
  s.unified = s.entropy * s.inconsistency;
  return s;
}

std::vector<AcquisitionScore> score_images(std::span<const PredictionPair> images,
                                           const AcquisitionOptions& opts) {
  std::vector<AcquisitionScore> out(images.size());
  const auto n = static_cast<std::ptrdiff_t>(images.size());
  // Exceptions cannot cross the parallel region; capture the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = unified_score(images[i].original, images[i].flipped, opts);
    } catch (...) {
#pragma omp critical(flipal_score_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<AcquisitionScore> score_images_serial(std::span<const PredictionPair> images,
                                                  const AcquisitionOptions& opts) {
  std::vector<AcquisitionScore> out;
  out.reserve(images.size());
  for (const auto& im : images) out.push_back(unified_score(im.original, im.flipped, opts));
  return out;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kRandom:
      return "random";
    case Strategy::kEntropy:
      return "entropy";
    case Strategy::kInconsistency:
      return "inconsistency";
    case Strategy::kUnified:
      return "unified";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::kRandom, Strategy::kEntropy, Strategy::kInconsistency,
                 Strategy::kUnified}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

std::vector<ImageId> select_for_labeling(std::span<const AcquisitionScore> scores,
                                         std::size_t budget, Strategy strategy,
                                         std::uint64_t seed) {
  if (budget > scores.size()) throw std::invalid_argument("budget exceeds pool");

  std::vector<const AcquisitionScore*> rows;
  rows.reserve(scores.size());
  std::set<ImageId> seen;
  for (const auto& s : scores) {
    if (!seen.insert(s.image_id).second) {
      throw std::invalid_argument("duplicate image id in score table: " + s.image_id);
    }
    rows.push_back(&s);
  }

  if (strategy == Strategy::kRandom) {
    std::sort(rows.begin(), rows.end(),
              [](const auto* a, const auto* b) { return a->image_id < b->image_id; });
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
  } else {
    const auto by_score = [strategy](const AcquisitionScore* a, const AcquisitionScore* b) {
      const double fa = score_field(*a, strategy);
      const double fb = score_field(*b, strategy);
      if (fa != fb) return fa > fb;
      return a->image_id < b->image_id;
    };
    std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(budget),
                      rows.end(), by_score);
  }

  std::vector<ImageId> out;
  out.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) out.push_back(rows[i]->image_id);
  return out;
}

}  // namespace flipal
