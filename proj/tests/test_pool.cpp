#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <set>

#include "flipal/cycles.hpp"
#include "flipal/dataset.hpp"
#include "flipal/pool.hpp"
#include "flipal/synthetic_detector.hpp"

using namespace flipal;

namespace {

std::vector<ImageId> make_ids(std::size_t n) {
  std::vector<ImageId> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("id" + std::to_string(1000000 + i));
  return ids;
}

struct Scenario {
  Dataset train;
  Dataset test;
  std::vector<ImageRecord> all;
};

Scenario scenario(std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
  SyntheticDatasetConfig c;
  c.n_images = n_train;
  c.seed = seed;
  c.id_prefix = "tr";
  Scenario s;
  s.train = make_synthetic_dataset(c);
  c.n_images = n_test;
  c.seed = seed + 1000;
  c.id_prefix = "te";
  s.test = make_synthetic_dataset(c);
  s.all = s.train.images;
  s.all.insert(s.all.end(), s.test.images.begin(), s.test.images.end());
  return s;
}

}  // namespace

TEST_CASE("init_pool") {
  const auto ids = make_ids(16551);
  const auto p = init_pool(ids, 2000, 7);
  CHECK(p.labeled.size() == 2000);
  CHECK(p.unlabeled.size() == 14551);
  CHECK(p.cycle == 0);
  p.check_invariants();
  CHECK(init_pool(ids, 2000, 7).labeled == p.labeled);
  CHECK(init_pool(ids, 2000, 8).labeled != p.labeled);

  const auto all = init_pool(make_ids(10), 10, 1);
  CHECK(all.unlabeled.empty());
  CHECK_THROWS(init_pool(make_ids(10), 11, 1));

  auto reversed = ids;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(init_pool(reversed, 2000, 7).labeled == p.labeled);
}

TEST_CASE("commit_selection") {
  const auto p = init_pool(make_ids(16551), 2000, 7);
  const std::vector<ImageId> pick(p.unlabeled.begin(), std::next(p.unlabeled.begin(), 1000));
  const auto q = commit_selection(p, pick);
  CHECK(q.unlabeled.size() == 13551);
  CHECK(q.labeled.size() == 3000);
  CHECK(q.cycle == 1);
  q.check_invariants();

  const auto same = commit_selection(p, std::vector<ImageId>{});
  CHECK(same.labeled == p.labeled);
  CHECK(same.cycle == 1);

  CHECK_THROWS_WITH(commit_selection(q, std::vector<ImageId>{pick[0]}),
                    doctest::Contains("already labeled or unknown"));
  CHECK_THROWS_WITH(commit_selection(q, std::vector<ImageId>{"nope"}),
                    doctest::Contains("already labeled or unknown"));

  Pool with_pl = p;
  with_pl.pseudo[pick[0]] = {PseudoLabel{pick[0], {0, 0, 1, 1}, 1, 0.995}};
  const ImageId other = *std::next(p.unlabeled.begin(), 1000);
  with_pl.pseudo[other] = {PseudoLabel{other, {0, 0, 1, 1}, 1, 0.995}};
  const auto r = commit_selection(with_pl, std::vector<ImageId>{pick[0]});
  CHECK_FALSE(r.pseudo.contains(pick[0]));
  CHECK(r.pseudo.contains(other));
}

TEST_CASE("balanced batches") {
  const auto p = init_pool(make_ids(16651), 2000, 3);
  for (const auto& b : balanced_batches(p, 32, BatchMode::kBalancedHalf, 50, 1)) {
    CHECK(b.labeled.size() == 16);
    CHECK(b.unlabeled.size() == 16);
    for (const auto& id : b.labeled) CHECK(p.labeled.contains(id));
    for (const auto& id : b.unlabeled) CHECK(p.unlabeled.contains(id));
  }
  for (const auto& b : balanced_batches(p, 32, BatchMode::kBalancedQuarter, 50, 1)) {
    CHECK(b.labeled.size() == 8);
    CHECK(b.unlabeled.size() == 24);
  }

  // Over one full pass every image shows up exactly once.
  const auto pass = balanced_batches(p, 32, BatchMode::kRandom, 16651, 5);
  std::size_t labeled = 0;
  for (const auto& b : pass) labeled += b.labeled.size();
  const double mean = static_cast<double>(labeled) / static_cast<double>(pass.size());
  CHECK(mean == doctest::Approx(32.0 * 2000.0 / 16651.0).epsilon(1e-12));
  CHECK(std::abs(mean - 3.86) < 0.05);

  const auto again = balanced_batches(p, 32, BatchMode::kRandom, 40, 5);
  CHECK(again.front().labeled == pass.front().labeled);

  CHECK_THROWS(balanced_batches(p, 30, BatchMode::kBalancedQuarter, 1, 1));
  CHECK_THROWS(balanced_batches(p, 31, BatchMode::kBalancedHalf, 1, 1));
  const auto full = init_pool(make_ids(10), 10, 1);
  CHECK_THROWS(balanced_batches(full, 4, BatchMode::kBalancedHalf, 1, 1));
  CHECK_NOTHROW(balanced_batches(full, 4, BatchMode::kRandom, 1, 1));
}

TEST_CASE("run_cycles protocol") {
  const auto s = scenario(600, 100, 11);
  const SyntheticDetector det(uniform_detector_config(5), s.all, 5);
  const auto pool = init_pool(s.train.ids(), 100, 2);

  CycleConfig cfg;
  cfg.cycles = 5;
  cfg.total_budget = 250;
  cfg.pl_enabled = false;
  const auto run = run_cycles(s.train, s.test, pool, det, cfg);
  REQUIRE(run.reports.size() == 6);
  std::set<ImageId> seen;
  for (std::size_t t = 0; t < run.reports.size(); ++t) {
    const auto& r = run.reports[t];
    CHECK(r.cycle == static_cast<int>(t));
    CHECK(r.n_labeled == 100 + t * 50);
    CHECK(r.n_pl == 0);
    CHECK(r.map50_before_pl == r.eval.map50);
    if (t > 0) {
      CHECK(r.selected.size() == 50);
      CHECK(r.scores.size() == 600 - 100 - (t - 1) * 50);
      for (const auto& sc : r.scores) CHECK(sc.unified == sc.entropy * sc.inconsistency);
    }
    for (const auto& id : r.selected) CHECK(seen.insert(id).second);
  }
  CHECK(run.final_pool.labeled.size() == 350);
  run.final_pool.check_invariants();

  cfg.total_budget = 251;
  CHECK_THROWS(run_cycles(s.train, s.test, pool, det, cfg));
  cfg.per_cycle_budget = 10;
  CHECK(cfg.budget_per_cycle() == 10);
}

TEST_CASE("run_cycles with pseudo-labels is reproducible") {
  const auto s = scenario(400, 80, 13);
  auto dcfg = uniform_detector_config(5, {0.9, 0.9, 0.1, std::nullopt});
  dcfg.pl_gain = 0.001;
  const SyntheticDetector det(dcfg, s.all, 5);
  const auto pool = init_pool(s.train.ids(), 80, 4);
  CycleConfig cfg;
  cfg.cycles = 2;
  cfg.total_budget = 40;
  cfg.pl_enabled = true;
  const auto a = run_cycles(s.train, s.test, pool, det, cfg);
  const auto b = run_cycles(s.train, s.test, pool, det, cfg);
  for (std::size_t t = 0; t < a.reports.size(); ++t) {
    CHECK(a.reports[t].selected == b.reports[t].selected);
    CHECK(a.reports[t].eval.map50 == b.reports[t].eval.map50);
    CHECK(a.reports[t].n_pl == b.reports[t].n_pl);
  }
  CHECK(a.reports.back().n_pl > 0);
  for (const auto& [id, pls] : a.final_pool.pseudo) {
    CHECK(a.final_pool.unlabeled.contains(id));
    for (const auto& pl : pls) CHECK(pl.confidence >= 0.99);
  }
  const auto& last = a.reports.back();
  CHECK(last.pl_ratio == doctest::Approx(static_cast<double>(last.n_pl) /
                                         static_cast<double>(last.n_pl + last.n_labeled_objects)));
}

TEST_CASE("unified selects more flip-fragile images than random") {
  std::size_t unified_hits = 0, random_hits = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = scenario(500, 50, 100 + seed);
    auto dcfg = uniform_detector_config(5, {0.9, 0.95, 0.5, std::nullopt});
    dcfg.classes[0] = {0.3, 0.2, 0.1, std::nullopt};
    dcfg.seed = seed;
    const SyntheticDetector det(dcfg, s.all, 5);
    const auto pool = init_pool(s.train.ids(), 50, seed);
    std::set<ImageId> fragile;
    for (const auto& im : s.train.images) {
      for (const auto& o : im.objects) {
        if (o.class_id == 1) fragile.insert(im.id);
      }
    }
    for (auto strat : {Strategy::kUnified, Strategy::kRandom}) {
      CycleConfig cfg;
      cfg.cycles = 2;
      cfg.total_budget = 100;
      cfg.strategy = strat;
      cfg.selection_seed = seed;
      for (const auto& r : run_cycles(s.train, s.test, pool, det, cfg).reports) {
        if (r.cycle == 0) continue;
        for (const auto& id : r.selected) {
          if (fragile.contains(id)) ++(strat == Strategy::kUnified ? unified_hits : random_hits);
        }
      }
    }
  }
  CHECK(unified_hits > random_hits);
}
