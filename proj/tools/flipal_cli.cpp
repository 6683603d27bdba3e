// Command-line front end: score, select, pseudolabel, simulate, eval,
// loss-check, winrate (plus init-pool to start a pool file).

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flipal/acquisition.hpp"
#include "flipal/config.hpp"
#include "flipal/eval.hpp"
#include "flipal/experiment.hpp"
#include "flipal/io.hpp"
#include "flipal/loss_check.hpp"
#include "flipal/pool.hpp"
#include "flipal/pseudo_label.hpp"

namespace {

using namespace flipal;

/// Experiment keys exposed as `--key value` flags on a subcommand.
struct KeyFlags {
  std::optional<std::string> config_path;
  std::map<std::string, std::string> values;
  std::vector<std::string> sets;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Key-value configuration file");
    app->add_option("--set", sets, "Override as key=value (repeatable)");
    for (const auto& [key, def] : ExperimentConfig::defaults()) {
      app->add_option("--" + key, values[key], "default: " + (def.empty() ? "<unset>" : def));
    }
  }

  KeyValues resolve(CLI::App* app) const {
    KeyValues overrides;
    for (const auto& [key, v] : values) {
      if (app->count("--" + key) > 0) overrides[key] = v;
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError({"--set expects key=value, got '" + s + "'"});
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    std::optional<std::filesystem::path> path;
    if (config_path) path = *config_path;
    return merge_config(path, overrides);
  }
};

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    io::write_file(out_path, content);
  }
}

std::optional<Dataset> maybe_dataset(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return io::read_dataset(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flip-consistency active learning for object detection"};
  app.require_subcommand(1);

  // score
  auto* score = app.add_subcommand("score", "Entropy / inconsistency / unified score per image");
  KeyFlags score_keys;
  std::string score_preds, score_pool, score_out;
  score->add_option("--predictions", score_preds, "Predictions JSONL")->required();
  score->add_option("--pool", score_pool, "Only score the unlabeled images of this pool");
  score->add_option("--out", score_out, "Scores CSV (default stdout)");
  score_keys.attach(score);

  // select
  auto* select = app.add_subcommand("select", "Pick the next images to label and commit them");
  std::string sel_scores, sel_pool, sel_out_pool, sel_out, sel_strategy = "unified";
  std::size_t sel_budget = 0;
  std::uint64_t sel_seed = 0;
  select->add_option("--scores", sel_scores, "Scores CSV")->required();
  select->add_option("--pool", sel_pool, "Pool state JSON")->required();
  select->add_option("--budget", sel_budget, "Images to label this cycle")->required();
  select->add_option("--strategy", sel_strategy, "random|entropy|inconsistency|unified");
  select->add_option("--seed", sel_seed, "Seed for the random strategy");
  select->add_option("--out-pool", sel_out_pool, "Updated pool JSON (default: overwrite --pool)");
  select->add_option("--out", sel_out, "Selected ids, one per line (default stdout)");

  // init-pool
  auto* init = app.add_subcommand("init-pool", "Random initial labeled set");
  std::string init_dataset, init_out;
  std::size_t init_budget = 0;
  std::uint64_t init_seed = 0;
  init->add_option("--dataset", init_dataset, "Dataset JSON")->required();
  init->add_option("--initial-budget", init_budget, "Images in the initial labeled set")->required();
  init->add_option("--seed", init_seed, "Sampling seed");
  init->add_option("--out", init_out, "Pool JSON (default stdout)");

  // pseudolabel
  auto* pseudo = app.add_subcommand("pseudolabel", "Confident detections as pseudo-labels");
  KeyFlags pl_keys;
  std::string pl_preds, pl_pool, pl_out_pool, pl_out, pl_gt;
  pseudo->add_option("--predictions", pl_preds, "Predictions JSONL")->required();
  pseudo->add_option("--pool", pl_pool, "Restrict to this pool's unlabeled images");
  pseudo->add_option("--out-pool", pl_out_pool, "Write the pool with regenerated pseudo-labels");
  pseudo->add_option("--gt", pl_gt, "Dataset JSON to audit pseudo-label correctness against");
  pseudo->add_option("--out", pl_out, "Pseudo-label JSONL (default stdout)");
  pl_keys.attach(pseudo);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run active-learning cycles with the synthetic detector");
  KeyFlags sim_keys;
  sim_keys.attach(sim);

  // eval
  auto* ev = app.add_subcommand("eval", "Per-class AP and mAP@0.5");
  std::string ev_gt, ev_preds, ev_out, ev_interp = "eleven_point";
  bool ev_nms = false;
  ev->add_option("--gt", ev_gt, "Dataset JSON with ground truth")->required();
  ev->add_option("--predictions", ev_preds, "Predictions JSONL (original records are used)")->required();
  ev->add_option("--interpolation", ev_interp, "eleven_point|all_point");
  ev->add_flag("--nms", ev_nms, "Apply default NMS before evaluation");
  ev->add_option("--out", ev_out, "Eval CSV (default stdout)");

  // loss-check
  auto* lc = app.add_subcommand("loss-check", "Print every loss term for a JSON fixture");
  std::string lc_fixture;
  lc->add_option("--fixture", lc_fixture, "Fixture JSON")->required();

  // winrate
  auto* wr = app.add_subcommand("winrate", "Fraction of classes where one method beats another");
  std::vector<std::string> wr_methods;
  std::string wr_out;
  wr->add_option("--method", wr_methods, "name=eval1.csv,eval2.csv,... (repeatable)")->required();
  wr->add_option("--out", wr_out, "Matrix CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (score->parsed()) {
      const auto kv = score_keys.resolve(score);
      const auto cfg = ExperimentConfig::from_key_values(kv);
      const auto sizes = maybe_dataset(cfg.dataset.string());
      const auto table = io::read_predictions(score_preds, sizes ? &*sizes : nullptr);
      auto pairs = io::paired_predictions(table);
      if (!score_pool.empty()) {
        const auto pool = io::read_pool(score_pool);
        std::erase_if(pairs, [&](const PredictionPair& p) {
          return !pool.unlabeled.contains(p.original.image_id);
        });
      }
      std::ostringstream out;
      io::write_scores_csv(out, score_images(pairs, cfg.cycles.acquisition));
      emit(score_out, out.str());
    } else if (select->parsed()) {
      std::ifstream in(sel_scores);
      if (!in) throw std::runtime_error("cannot open '" + sel_scores + "'");
      auto scores = io::read_scores_csv(in, sel_scores);
      const auto pool = io::read_pool(sel_pool);
      std::erase_if(scores, [&](const AcquisitionScore& s) { return !pool.unlabeled.contains(s.image_id); });
      const auto chosen = select_for_labeling(scores, sel_budget, parse_strategy(sel_strategy), sel_seed);
      const auto next = commit_selection(pool, chosen);
      std::ostringstream pj;
      io::write_pool(pj, next);
      io::write_file(sel_out_pool.empty() ? sel_pool : sel_out_pool, pj.str());
      std::string ids;
      for (const auto& id : chosen) ids += id + "\n";
      emit(sel_out, ids);
    } else if (init->parsed()) {
      const auto ds = io::read_dataset(init_dataset);
      const auto ids = ds.ids();
      std::ostringstream pj;
      io::write_pool(pj, init_pool(ids, init_budget, init_seed));
      emit(init_out, pj.str());
    } else if (pseudo->parsed()) {
      const auto kv = pl_keys.resolve(pseudo);
      const auto cfg = ExperimentConfig::from_key_values(kv);
      const auto sizes = maybe_dataset(cfg.dataset.string());
      const auto table = io::read_predictions(pl_preds, sizes ? &*sizes : nullptr);
      std::optional<Pool> pool;
      if (!pl_pool.empty()) pool = io::read_pool(pl_pool);

      std::vector<ImagePrediction> kept;
      for (const auto& [key, pred] : table.records()) {
        if (key.second) continue;
        if (pool && !pool->unlabeled.contains(key.first)) continue;
        kept.push_back(nms(pred, cfg.cycles.acquisition.nms));
      }
      std::vector<PseudoLabel> pls;
      if (cfg.cycles.topk_fraction) {
        pls = extract_topk_per_class(kept, *cfg.cycles.topk_fraction);
      } else {
        for (const auto& k : kept) {
          auto v = extract_pseudo_labels(k, cfg.cycles.tau);
          pls.insert(pls.end(), v.begin(), v.end());
        }
      }
      std::ostringstream out;
      io::write_pseudo_labels(out, pls);
      emit(pl_out, out.str());
      if (!pl_gt.empty()) {
        const auto gt = io::read_dataset(pl_gt).all_objects();
        const auto audit = audit_pl_correctness(pls, gt);
        std::cerr << "pseudo-labels: " << audit.n_pseudo << ", correct: " << audit.n_correct
                  << ", correctness: " << io::fixed6(audit.correctness)
                  << (audit.empty ? " (no pseudo-labels)" : "") << "\n";
      }
      if (pool && !pl_out_pool.empty()) {
        pool->pseudo.clear();
        for (const auto& pl : pls) pool->pseudo[pl.image_id].push_back(pl);
        pool->check_invariants();
        std::ostringstream pj;
        io::write_pool(pj, *pool);
        io::write_file(pl_out_pool, pj.str());
      }
    } else if (sim->parsed()) {
      const auto kv = sim_keys.resolve(sim);
      const auto cfg = ExperimentConfig::from_key_values(kv);
      KeyValues resolved;
      for (const auto& [k, v] : ExperimentConfig::defaults()) resolved[k] = v;
      for (const auto& [k, v] : kv) resolved[k] = v;
      simulate_to_directory(cfg, resolved);
      std::cerr << "wrote " << cfg.output_dir.string() << "\n";
    } else if (ev->parsed()) {
      const auto ds = io::read_dataset(ev_gt);
      const auto table = io::read_predictions(ev_preds, &ds);
      std::vector<ImageDetection> dets;
      for (const auto& [key, pred] : table.records()) {
        if (key.second) continue;
        const auto kept = ev_nms ? nms(pred.detections) : pred.detections;
        for (const auto& d : kept) dets.push_back({key.first, d});
      }
      const auto result = map50(dets, ds.all_objects(), ds.num_classes(), parse_interpolation(ev_interp));
      std::ostringstream out;
      io::write_eval_csv(out, result);
      emit(ev_out, out.str());
    } else if (lc->parsed()) {
      const auto fx = parse_loss_fixture(io::read_file(lc_fixture));
      std::cout << format_losses(compute_losses(fx));
    } else if (wr->parsed()) {
      std::vector<std::pair<std::string, std::vector<EvalResult>>> methods;
      for (const auto& method_arg : wr_methods) {
        const auto eq = method_arg.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--method expects name=files, got '" + method_arg + "'");
        std::vector<EvalResult> results;
        std::stringstream files(method_arg.substr(eq + 1));
        std::string f;
        while (std::getline(files, f, ',')) {
          std::ifstream in(f);
          if (!in) throw std::runtime_error("cannot open '" + f + "'");
          results.push_back(io::read_eval_csv(in, f));
        }
        methods.emplace_back(method_arg.substr(0, eq), std::move(results));
      }
      std::string table = "method";
      for (const auto& m : methods) table += "," + m.first;
      table += "\n";
      for (const auto& a : methods) {
        table += a.first;
        for (const auto& b : methods) table += "," + io::fixed6(winrate_table(a.second, b.second));
        table += "\n";
      }
      emit(wr_out, table);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
