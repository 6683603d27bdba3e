#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flipal/acquisition.hpp"
#include "flipal/cycles.hpp"
#include "flipal/dataset.hpp"
#include "flipal/detector.hpp"
#include "flipal/eval.hpp"
#include "flipal/pool.hpp"
#include "flipal/pseudo_label.hpp"

namespace flipal::io {

/// Malformed input; the message carries the source name and line when known.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-point with six decimals, as used in every CSV this library writes.
std::string fixed6(double v);

// Dataset: {classes:[names], images:[{id, width, height,
//           objects:[{class_id, bbox:[xmin,ymin,xmax,ymax]}]}]}
Dataset read_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::string_view text, const std::string& source = "dataset");
void write_dataset(std::ostream& os, const Dataset& ds);

// Predictions JSONL, one record per (image, orientation):
//   {image_id, flipped, width?, height?,
//    detections:[{bbox:[...], encoded:[dx,dy,w,h], probs:[...]}]}
// Image size comes from the record or, failing that, from `sizes`.
PredictionTable read_predictions(std::istream& is, const Dataset* sizes = nullptr,
                                 const std::string& source = "predictions");
PredictionTable read_predictions(const std::filesystem::path& path,
                                 const Dataset* sizes = nullptr);
void write_prediction(std::ostream& os, const ImagePrediction& pred, bool flipped);

/// Pairs every original record with its flipped record, ordered by image id.
/// A missing flipped record is an error naming the image.
std::vector<PredictionPair> paired_predictions(const PredictionTable& table);

// Scores CSV: image_id,entropy,inconsistency,unified
void write_scores_csv(std::ostream& os, std::span<const AcquisitionScore> scores);
std::vector<AcquisitionScore> read_scores_csv(std::istream& is,
                                              const std::string& source = "scores");

// Pseudo-label JSONL: {image_id, bbox:[...], class_id, confidence}
void write_pseudo_labels(std::ostream& os, std::span<const PseudoLabel> pls);
std::vector<PseudoLabel> read_pseudo_labels(std::istream& is,
                                            const std::string& source = "pseudo-labels");

// Pool state: {cycle, labeled:[ids], unlabeled:[ids], pseudo:{id:[PL records]}}
void write_pool(std::ostream& os, const Pool& pool);
Pool read_pool(const std::filesystem::path& path);
Pool parse_pool(std::string_view text, const std::string& source = "pool");

// Eval CSV: class_id,ap,n_gt per class, then a `map50,<value>,<total n_gt>` row.
// Classes without ground truth are listed with an empty ap field.
void write_eval_csv(std::ostream& os, const EvalResult& r);
EvalResult read_eval_csv(std::istream& is, const std::string& source = "eval");

// Cycle report CSV: cycle,n_labeled,n_pl,pl_ratio,pl_correctness,map50,selected_file
void write_cycle_report_csv(std::ostream& os, std::span<const CycleReport> reports);
std::string selected_file_name(int cycle);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for CLI use: truncate, write, close, check.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace flipal::io
