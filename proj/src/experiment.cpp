#include "flipal/experiment.hpp"

#include <sstream>
#include <stdexcept>

#include "flipal/io.hpp"
#include "flipal/synthetic_detector.hpp"
#include "json.hpp"

namespace flipal {

namespace fs = std::filesystem;

ExperimentData load_experiment_data(const ExperimentConfig& cfg) {
  ExperimentData data;
  data.train = cfg.dataset.empty() ? make_synthetic_dataset(cfg.synth_train)
                                   : io::read_dataset(cfg.dataset);
  if (!cfg.test_dataset.empty()) {
    data.test = io::read_dataset(cfg.test_dataset);
  } else {
    auto test_cfg = cfg.synth_test;
    test_cfg.n_classes = data.train.num_classes();
    data.test = make_synthetic_dataset(test_cfg);
  }
  if (data.test.num_classes() != data.train.num_classes()) {
    throw std::invalid_argument("train and test datasets have different class counts");
  }
  if (data.train.num_classes() != cfg.detector.classes.size()) {
    throw ConfigError({"num_classes: dataset has " + std::to_string(data.train.num_classes()) +
                       " classes but the detector is configured for " +
                       std::to_string(cfg.detector.classes.size())});
  }
  return data;
}

std::vector<NamedRun> run_experiment(const ExperimentConfig& cfg, const ExperimentData& data) {
  std::vector<ImageRecord> all = data.train.images;
  all.insert(all.end(), data.test.images.begin(), data.test.images.end());
  const SyntheticDetector detector(cfg.detector, all, data.train.num_classes());
  const auto ids = data.train.ids();
  const Pool pool = init_pool(ids, cfg.initial_budget, cfg.pool_seed);

  std::vector<NamedRun> plan;
  if (cfg.sweep) {
    for (auto s : {Strategy::kRandom, Strategy::kEntropy, Strategy::kInconsistency,
                   Strategy::kUnified}) {
      auto c = cfg.cycles;
      c.strategy = s;
      c.pl_enabled = false;
      plan.push_back({std::string(to_string(s)), c, {}});
    }
    auto c = cfg.cycles;
    c.strategy = Strategy::kUnified;
    c.pl_enabled = true;
    plan.push_back({"unified_pl", c, {}});
  } else {
    std::string name(to_string(cfg.cycles.strategy));
    if (cfg.cycles.pl_enabled) name += "_pl";
    plan.push_back({name, cfg.cycles, {}});
  }
  for (auto& r : plan) r.run = run_cycles(data.train, data.test, pool, detector, r.cycles);
  return plan;
}

void write_run(const fs::path& dir, const ExperimentConfig& cfg, const ExperimentData& data,
               const NamedRun& run) {
  fs::create_directories(dir);
  std::ostringstream report;
  io::write_cycle_report_csv(report, run.run.reports);
  io::write_file(dir / "cycle_report.csv", report.str());

  // Pool state as it stood after each cycle, for mini-batch composition.
  Pool pool;
  for (const auto& im : data.train.images) pool.unlabeled.insert(im.id);

  nlohmann::json details = nlohmann::json::array();
  for (const auto& r : run.run.reports) {
    std::string selected;
    for (const auto& id : r.selected) selected += id + "\n";
    io::write_file(dir / io::selected_file_name(r.cycle), selected);

    if (r.cycle > 0) {
      std::ostringstream scores;
      io::write_scores_csv(scores, r.scores);
      io::write_file(dir / ("scores_cycle" + std::to_string(r.cycle) + ".csv"), scores.str());
    }
    std::ostringstream ev;
    io::write_eval_csv(ev, r.eval);
    io::write_file(dir / ("eval_cycle" + std::to_string(r.cycle) + ".csv"), ev.str());

    pool = commit_selection(pool, r.selected);
    double labeled_per_batch = 0.0;
    if (!pool.unlabeled.empty() && !pool.labeled.empty() && cfg.batches_per_cycle > 0) {
      const auto batches = balanced_batches(pool, cfg.batch_size, cfg.batch_mode,
                                            cfg.batches_per_cycle,
                                            cfg.pool_seed + static_cast<std::uint64_t>(r.cycle));
      for (const auto& b : batches) labeled_per_batch += static_cast<double>(b.labeled.size());
      labeled_per_batch /= static_cast<double>(batches.size());
    }

    details.push_back({{"cycle", r.cycle},
                       {"n_labeled", r.n_labeled},
                       {"n_labeled_objects", r.n_labeled_objects},
                       {"n_pl", r.n_pl},
                       {"pl_correctness", r.pl_audit.correctness},
                       {"pl_audit_empty", r.pl_audit.empty},
                       {"map50", r.eval.map50},
                       {"map50_before_pl", r.map50_before_pl},
                       {"n_zero_score_images", r.n_zero_score},
                       {"batch_mode", to_string(cfg.batch_mode)},
                       {"mean_labeled_per_batch", labeled_per_batch}});
  }

  std::ostringstream pls;
  std::vector<PseudoLabel> flat;
  for (const auto& [id, v] : run.run.final_pool.pseudo) flat.insert(flat.end(), v.begin(), v.end());
  io::write_pseudo_labels(pls, flat);
  io::write_file(dir / "pseudo_labels_final.jsonl", pls.str());

  std::ostringstream pool_json;
  io::write_pool(pool_json, run.run.final_pool);
  io::write_file(dir / "pool_final.json", pool_json.str());

  nlohmann::json meta{{"run", run.name},
                      {"strategy", to_string(run.cycles.strategy)},
                      {"pseudo_labels", run.cycles.pl_enabled},
                      {"interpolation", to_string(run.cycles.interpolation)},
                      {"cycles", std::move(details)}};
  io::write_file(dir / "cycle_details.json", meta.dump(1) + "\n");
}

void simulate_to_directory(const ExperimentConfig& cfg, const KeyValues& resolved) {
  const auto data = load_experiment_data(cfg);
  const auto runs = run_experiment(cfg, data);
  fs::create_directories(cfg.output_dir);
  io::write_file(cfg.output_dir / "config.resolved.txt", render_key_values(resolved));

  if (!cfg.sweep) {
    write_run(cfg.output_dir, cfg, data, runs.front());
    return;
  }
  std::string summary = "run,final_map50\n";
  std::vector<EvalResult> finals;
  for (const auto& r : runs) {
    write_run(cfg.output_dir / r.name, cfg, data, r);
    summary += r.name + "," + io::fixed6(r.run.reports.back().eval.map50) + "\n";
    finals.push_back(r.run.reports.back().eval);
  }
  io::write_file(cfg.output_dir / "sweep_summary.csv", summary);

  std::string table = "method";
  for (const auto& r : runs) table += "," + r.name;
  table += "\n";
  for (std::size_t a = 0; a < runs.size(); ++a) {
    table += runs[a].name;
    for (std::size_t b = 0; b < runs.size(); ++b) {
      table += "," + io::fixed6(winrate_table(std::span(&finals[a], 1), std::span(&finals[b], 1)));
    }
    table += "\n";
  }
  io::write_file(cfg.output_dir / "winrate.csv", table);
}

}  // namespace flipal
