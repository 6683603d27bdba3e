#include "flipal/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "flipal/io.hpp"

namespace flipal {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string join_violations(const std::vector<std::string>& v) {
  std::string msg = "invalid configuration (" + std::to_string(v.size()) + " problem" +
                    (v.size() == 1 ? "" : "s") + "):";
  for (const auto& s : v) msg += "\n  - " + s;
  return msg;
}

/// Typed lookups that record problems instead of throwing.
class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  const std::string* raw(const std::string& key) {
    used_.insert(key);
    const auto it = kv_.find(key);
    return it == kv_.end() || it->second.empty() ? nullptr : &it->second;
  }

  std::string str(const std::string& key, std::string fallback) {
    const auto* v = raw(key);
    return v ? *v : fallback;
  }

  double real(const std::string& key, double fallback) {
    const auto* v = raw(key);
    if (!v) return fallback;
    return to_real(key, *v).value_or(fallback);
  }

  std::optional<double> opt_real(const std::string& key) {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    return to_real(key, *v);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const auto* v = raw(key);
    if (!v) return fallback;
    return to_count(key, *v).value_or(fallback);
  }

  std::optional<std::size_t> opt_count(const std::string& key) {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    return to_count(key, *v);
  }

  bool flag(const std::string& key, bool fallback) {
    const auto* v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    errors.push_back(key + ": expected a boolean, got '" + *v + "'");
    return fallback;
  }

  std::vector<double> reals(const std::string& key) {
    std::vector<double> out;
    const auto* v = raw(key);
    if (!v) return out;
    std::stringstream ss(*v);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (auto d = to_real(key, trim(cell))) out.push_back(*d);
    }
    return out;
  }

  std::vector<std::string> words(const std::string& key) {
    std::vector<std::string> out;
    const auto* v = raw(key);
    if (!v) return out;
    std::stringstream ss(*v);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
  }

  void check_unknown() {
    for (const auto& [k, v] : kv_) {
      if (!used_.contains(k)) errors.push_back("unknown key '" + k + "'");
    }
  }

  void require(bool ok, const std::string& what) {
    if (!ok) errors.push_back(what);
  }

  std::vector<std::string> errors;

 private:
  std::optional<double> to_real(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used == v.size()) return d;
    } catch (const std::logic_error&) {
    }
    errors.push_back(key + ": expected a number, got '" + v + "'");
    return std::nullopt;
  }

  std::optional<std::size_t> to_count(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec == std::errc() && ptr == v.data() + v.size()) return out;
    errors.push_back(key + ": expected a non-negative integer, got '" + v + "'");
    return std::nullopt;
  }

  const KeyValues& kv_;
  std::set<std::string> used_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

KeyValues parse_key_values(std::string_view text, const std::string& source) {
  KeyValues kv;
  std::vector<std::string> errors;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      errors.push_back(source + ":" + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const auto key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) {
      errors.push_back(source + ":" + std::to_string(lineno) + ": empty key");
      continue;
    }
    kv[key] = trim(std::string_view(body).substr(eq + 1));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return kv;
}

KeyValues merge_config(const std::optional<std::filesystem::path>& path,
                       const KeyValues& overrides) {
  KeyValues kv;
  if (path) kv = parse_key_values(io::read_file(*path), path->string());
  for (const auto& [k, v] : overrides) kv[k] = v;
  return kv;
}

std::string render_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::defaults() {
  return {
      {"dataset", ""},
      {"test_dataset", ""},
      {"synth_train_images", "16551"},
      {"synth_test_images", "1000"},
      {"num_classes", "5"},
      {"synth_class_weights", ""},
      {"synth_min_objects", "1"},
      {"synth_max_objects", "3"},
      {"synth_seed", "0"},
      {"initial_budget", "2000"},
      {"cycles", "5"},
      {"total_budget", "5000"},
      {"per_cycle_budget", ""},
      {"strategy", "unified"},
      {"pseudo_labels", "false"},
      {"tau", "0.99"},
      {"topk_fraction", ""},
      {"nms_iou", "0.45"},
      {"nms_score_floor", "0.01"},
      {"min_match_iou", "0.5"},
      {"match_mode", "greedy"},
      {"include_background", "true"},
      {"unmatched_penalty", ""},
      {"interpolation", "eleven_point"},
      {"batch_mode", "balanced_half"},
      {"batch_size", "32"},
      {"batches_per_cycle", "100"},
      {"seed", "0"},
      {"selection_seed", "0"},
      {"detector_seed", "0"},
      {"accuracy", "0.8"},
      {"robustness", "0.9"},
      {"temperature", "0.5"},
      {"class_accuracy", ""},
      {"class_robustness", ""},
      {"class_temperature", ""},
      {"class_confidently_wrong", ""},
      {"skill_gain", "0"},
      {"pl_gain", "0"},
      {"pl_noise_penalty", "0"},
      {"accuracy_ceiling", "0.95"},
      {"robustness_coupling", "1"},
      {"box_noise", "0.03"},
      {"fp_rate", "0.2"},
      {"fp_temperature", "1"},
      {"fp_robustness", "0.5"},
      {"margin_min", "0.5"},
      {"margin_max", "4"},
      {"logit_spread", "0.5"},
      {"wrong_margin_scale", "0.4"},
      {"output_dir", "flipal_out"},
      {"sweep", "false"},
  };
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& given) {
  KeyValues kv;
  for (const auto& [k, v] : defaults()) kv[k] = v;
  for (const auto& [k, v] : given) kv[k] = v;

  Reader r(kv);
  ExperimentConfig c;
  c.dataset = r.str("dataset", "");
  c.test_dataset = r.str("test_dataset", "");

  c.synth_train.n_images = r.count("synth_train_images", 0);
  c.synth_test.n_images = r.count("synth_test_images", 0);
  const auto n_classes = r.count("num_classes", 5);
  c.synth_train.n_classes = c.synth_test.n_classes = n_classes;
  c.synth_train.class_weights = c.synth_test.class_weights = r.reals("synth_class_weights");
  c.synth_train.min_objects = c.synth_test.min_objects = r.count("synth_min_objects", 1);
  c.synth_train.max_objects = c.synth_test.max_objects = r.count("synth_max_objects", 3);
  const auto synth_seed = r.count("synth_seed", 0);
  c.synth_train.seed = synth_seed;
  c.synth_test.seed = synth_seed + 0x7e57;
  c.synth_train.id_prefix = "train";
  c.synth_test.id_prefix = "test";

  c.initial_budget = r.count("initial_budget", 0);
  c.cycles.cycles = r.count("cycles", 5);
  c.cycles.total_budget = r.count("total_budget", 0);
  c.cycles.per_cycle_budget = r.opt_count("per_cycle_budget");
  try {
    c.cycles.strategy = parse_strategy(r.str("strategy", "unified"));
  } catch (const std::invalid_argument& e) {
    r.errors.push_back(std::string("strategy: ") + e.what());
  }
  c.cycles.pl_enabled = r.flag("pseudo_labels", false);
  c.cycles.tau = r.real("tau", 0.99);
  c.cycles.topk_fraction = r.opt_real("topk_fraction");
  c.cycles.acquisition.nms.iou_threshold = r.real("nms_iou", 0.45);
  c.cycles.acquisition.nms.score_floor = r.real("nms_score_floor", 0.01);
  c.cycles.acquisition.match.min_iou = r.real("min_match_iou", 0.5);
  const auto mode = r.str("match_mode", "greedy");
  if (mode == "greedy") {
    c.cycles.acquisition.match.mode = MatchMode::kGreedy;
  } else if (mode == "literal") {
    c.cycles.acquisition.match.mode = MatchMode::kLiteralArgmax;
  } else {
    r.errors.push_back("match_mode: expected greedy or literal, got '" + mode + "'");
  }
  c.cycles.acquisition.include_background = r.flag("include_background", true);
  c.cycles.acquisition.unmatched_penalty = r.opt_real("unmatched_penalty");
  try {
    c.cycles.interpolation = parse_interpolation(r.str("interpolation", "eleven_point"));
  } catch (const std::invalid_argument& e) {
    r.errors.push_back(std::string("interpolation: ") + e.what());
  }
  try {
    c.batch_mode = parse_batch_mode(r.str("batch_mode", "balanced_half"));
  } catch (const std::invalid_argument& e) {
    r.errors.push_back(std::string("batch_mode: ") + e.what());
  }
  c.batch_size = r.count("batch_size", 32);
  c.batches_per_cycle = r.count("batches_per_cycle", 100);
  c.pool_seed = r.count("seed", 0);
  c.cycles.selection_seed = r.count("selection_seed", 0);

  SyntheticClassParams base;
  base.accuracy = r.real("accuracy", 0.8);
  base.flip_robustness = r.real("robustness", 0.9);
  base.temperature = r.real("temperature", 0.5);
  c.detector = uniform_detector_config(n_classes, base);
  const auto acc = r.reals("class_accuracy");
  const auto rob = r.reals("class_robustness");
  const auto temp = r.reals("class_temperature");
  const auto cw = r.words("class_confidently_wrong");
  auto per_class = [&](const char* key, std::size_t n, auto&& apply) {
    if (n == 0) return;
    if (n != n_classes) {
      r.errors.push_back(std::string(key) + ": expected " + std::to_string(n_classes) +
                         " comma-separated values, got " + std::to_string(n));
      return;
    }
    for (std::size_t i = 0; i < n && i < c.detector.classes.size(); ++i) apply(i);
  };
  per_class("class_accuracy", acc.size(), [&](std::size_t i) { c.detector.classes[i].accuracy = acc[i]; });
  per_class("class_robustness", rob.size(),
            [&](std::size_t i) { c.detector.classes[i].flip_robustness = rob[i]; });
  per_class("class_temperature", temp.size(),
            [&](std::size_t i) { c.detector.classes[i].temperature = temp[i]; });
  per_class("class_confidently_wrong", cw.size(), [&](std::size_t i) {
    if (cw[i] == "auto") return;
    if (cw[i] != "true" && cw[i] != "false") {
      r.errors.push_back("class_confidently_wrong: expected true, false or auto, got '" + cw[i] + "'");
      return;
    }
    c.detector.classes[i].confidently_wrong = cw[i] == "true";
  });
  c.detector.skill_gain_per_labeled = r.real("skill_gain", 0.0);
  c.detector.pl_gain = r.real("pl_gain", 0.0);
  c.detector.pl_noise_penalty = r.real("pl_noise_penalty", 0.0);
  c.detector.accuracy_ceiling = r.real("accuracy_ceiling", 0.95);
  c.detector.robustness_coupling = r.real("robustness_coupling", 1.0);
  c.detector.box_noise = r.real("box_noise", 0.03);
  c.detector.fp_rate = r.real("fp_rate", 0.2);
  c.detector.fp_temperature = r.real("fp_temperature", 1.0);
  c.detector.fp_robustness = r.real("fp_robustness", 0.5);
  c.detector.margin_min = r.real("margin_min", 0.5);
  c.detector.margin_max = r.real("margin_max", 4.0);
  c.detector.logit_spread = r.real("logit_spread", 0.5);
  c.detector.wrong_margin_scale = r.real("wrong_margin_scale", 0.4);
  c.detector.seed = r.count("detector_seed", 0);
  c.output_dir = r.str("output_dir", "flipal_out");
  c.sweep = r.flag("sweep", false);
  r.check_unknown();

  // Cross-field ranges.
  r.require(n_classes >= 1, "num_classes: must be >= 1");
  r.require(c.cycles.tau > 0.0 && c.cycles.tau < 1.0, "tau: must be in (0,1)");
  if (c.cycles.topk_fraction) {
    r.require(*c.cycles.topk_fraction > 0.0 && *c.cycles.topk_fraction <= 1.0,
              "topk_fraction: must be in (0,1]");
  }
  const auto& nms = c.cycles.acquisition.nms;
  r.require(nms.iou_threshold > 0.0 && nms.iou_threshold <= 1.0, "nms_iou: must be in (0,1]");
  r.require(nms.score_floor >= 0.0 && nms.score_floor < 1.0, "nms_score_floor: must be in [0,1)");
  const double mm = c.cycles.acquisition.match.min_iou;
  r.require(mm >= 0.0 && mm <= 1.0, "min_match_iou: must be in [0,1]");
  if (!c.cycles.per_cycle_budget && c.cycles.cycles > 0) {
    r.require(c.cycles.total_budget % c.cycles.cycles == 0,
              "total_budget: " + std::to_string(c.cycles.total_budget) +
                  " is not divisible by cycles=" + std::to_string(c.cycles.cycles));
  }
  r.require(c.batch_size > 0, "batch_size: must be positive");
  if (c.batch_mode == BatchMode::kBalancedHalf) {
    r.require(c.batch_size % 2 == 0, "batch_size: must be even for balanced_half");
  } else if (c.batch_mode == BatchMode::kBalancedQuarter) {
    r.require(c.batch_size % 4 == 0, "batch_size: must be a multiple of 4 for balanced_quarter");
  }
  if (c.dataset.empty()) {
    r.require(c.synth_train.n_images > 0, "synth_train_images: must be positive without a dataset");
    r.require(c.initial_budget <= c.synth_train.n_images,
              "initial_budget: exceeds synth_train_images");
    r.require(c.synth_train.min_objects >= 1 &&
                  c.synth_train.min_objects <= c.synth_train.max_objects,
              "synth_min_objects/synth_max_objects: need 1 <= min <= max");
    if (!c.synth_train.class_weights.empty()) {
      r.require(c.synth_train.class_weights.size() == n_classes,
                "synth_class_weights: expected " + std::to_string(n_classes) + " values");
    }
  } else if (!std::filesystem::exists(c.dataset)) {
    r.errors.push_back("dataset: file '" + c.dataset.string() + "' does not exist");
  }
  if (!c.test_dataset.empty() && !std::filesystem::exists(c.test_dataset)) {
    r.errors.push_back("test_dataset: file '" + c.test_dataset.string() + "' does not exist");
  }
  if (c.test_dataset.empty()) {
    r.require(c.synth_test.n_images > 0, "synth_test_images: must be positive without a test_dataset");
  }
  for (const auto& v : c.detector.violations()) r.errors.push_back("detector: " + v);

  if (!r.errors.empty()) throw ConfigError(std::move(r.errors));
  return c;
}

}  // namespace flipal
