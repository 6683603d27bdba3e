#include "flipal/cycles.hpp"

#include <exception>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "flipal/rng.hpp"

namespace flipal {

std::size_t CycleConfig::budget_per_cycle() const {
  if (per_cycle_budget) return *per_cycle_budget;
  if (cycles == 0) return 0;
  if (total_budget % cycles != 0) {
    throw std::invalid_argument("total budget " + std::to_string(total_budget) +
                                " is not divisible by " + std::to_string(cycles) + " cycles");
  }
  return total_budget / cycles;
}

std::vector<PredictionPair> predict_pairs(const Detector& detector, std::span<const ImageId> ids) {
  std::vector<PredictionPair> out(ids.size());
  const auto n = static_cast<std::ptrdiff_t>(ids.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = {detector.predict(ids[i], false), detector.predict(ids[i], true)};
    } catch (...) {
#pragma omp critical(flipal_predict_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

EvalResult evaluate_detector(const Detector& detector, const Dataset& test,
                             const NmsOptions& nms_opts, Interpolation interpolation) {
  std::vector<std::vector<Detection>> kept(test.images.size());
  const auto n = static_cast<std::ptrdiff_t>(test.images.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    kept[i] = nms(detector.predict(test.images[i].id, false).detections, nms_opts);
  }
  std::vector<ImageDetection> dets;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (auto& d : kept[i]) dets.push_back({test.images[i].id, std::move(d)});
  }
  return map50(dets, test.all_objects(), test.num_classes(), interpolation);
}

namespace {

std::size_t count_objects(const Dataset& train, const std::set<ImageId>& ids) {
  std::size_t n = 0;
  for (const auto& im : train.images) {
    if (ids.contains(im.id)) n += im.objects.size();
  }
  return n;
}

std::vector<PseudoLabel> regenerate_pseudo_labels(std::span<const PredictionPair> preds,
                                                  const Pool& pool, const CycleConfig& cfg) {
  std::vector<ImagePrediction> kept;
  for (const auto& p : preds) {
    if (pool.unlabeled.contains(p.original.image_id)) {
      kept.push_back(nms(p.original, cfg.acquisition.nms));
    }
  }
  if (cfg.topk_fraction) return extract_topk_per_class(kept, *cfg.topk_fraction);
  std::vector<PseudoLabel> out;
  for (const auto& k : kept) {
    auto pls = extract_pseudo_labels(k, cfg.tau);
    out.insert(out.end(), pls.begin(), pls.end());
  }
  return out;
}

}  // namespace

CycleRun run_cycles(const Dataset& train, const Dataset& test, const Pool& initial,
                    const Detector& detector, const CycleConfig& cfg) {
  const std::size_t per_cycle = cfg.budget_per_cycle();
  initial.check_invariants();

  std::unordered_map<ImageId, const ImageRecord*> by_id;
  for (const auto& im : train.images) by_id.emplace(im.id, &im);

  CycleRun run;
  Pool pool = initial;
  pool.pseudo.clear();
  std::unique_ptr<Detector> current = detector.update(pool);

  CycleReport zero;
  zero.cycle = 0;
  zero.selected.assign(pool.labeled.begin(), pool.labeled.end());
  zero.n_labeled = pool.labeled.size();
  zero.n_labeled_objects = count_objects(train, pool.labeled);
  zero.eval = evaluate_detector(*current, test, cfg.acquisition.nms, cfg.interpolation);
  zero.map50_before_pl = zero.eval.map50;
  run.reports.push_back(std::move(zero));

  for (std::size_t t = 1; t <= cfg.cycles; ++t) {
    CycleReport rep;
    rep.cycle = static_cast<int>(t);

    const std::vector<ImageId> u_ids(pool.unlabeled.begin(), pool.unlabeled.end());
    const auto preds = predict_pairs(*current, u_ids);
    rep.scores = score_images(preds, cfg.acquisition);
    for (const auto& s : rep.scores) {
      if (s.entropy == 0.0 && s.inconsistency == 0.0) ++rep.n_zero_score;
    }
    rep.selected = select_for_labeling(rep.scores, per_cycle, cfg.strategy,
                                       detail::mix(cfg.selection_seed, t));
    pool = commit_selection(pool, rep.selected);
    pool.pseudo.clear();

    Pool without_pl = pool;
    std::vector<PseudoLabel> pls;
    if (cfg.pl_enabled) {
      pls = regenerate_pseudo_labels(preds, pool, cfg);
      for (const auto& pl : pls) pool.pseudo[pl.image_id].push_back(pl);
    }
    pool.check_invariants();

    std::vector<GroundTruthObject> u_gt;
    for (const auto& id : pool.unlabeled) {
      const auto& objs = by_id.at(id)->objects;
      u_gt.insert(u_gt.end(), objs.begin(), objs.end());
    }
    rep.pl_audit = audit_pl_correctness(pls, u_gt);
    rep.n_pl = pls.size();
    rep.n_labeled = pool.labeled.size();
    rep.n_labeled_objects = count_objects(train, pool.labeled);
    const auto total_labels = rep.n_pl + rep.n_labeled_objects;
    rep.pl_ratio = total_labels == 0 ? 0.0
                                     : static_cast<double>(rep.n_pl) /
                                           static_cast<double>(total_labels);

    current = detector.update(pool);
    rep.eval = evaluate_detector(*current, test, cfg.acquisition.nms, cfg.interpolation);
    rep.map50_before_pl =
        cfg.pl_enabled
            ? evaluate_detector(*detector.update(without_pl), test, cfg.acquisition.nms,
                                cfg.interpolation)
                  .map50
            : rep.eval.map50;
    run.reports.push_back(std::move(rep));
  }
  run.final_pool = std::move(pool);
  return run;
}

}  // namespace flipal
