#include "flipal/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace flipal::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw FormatError(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what);
}

BoxCorner box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("bbox must be [xmin,ymin,xmax,ymax]");
  BoxCorner b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.valid()) throw std::invalid_argument("bbox is not a valid box");
  return b;
}

json box_to_json(const BoxCorner& b) { return json::array({b.xmin, b.ymin, b.xmax, b.ymax}); }

json pl_to_json(const PseudoLabel& pl) {
  return {{"image_id", pl.image_id},
          {"bbox", box_to_json(pl.box_corner)},
          {"class_id", pl.class_id},
          {"confidence", pl.confidence}};
}

PseudoLabel pl_from_json(const json& j) {
  PseudoLabel pl;
  pl.image_id = j.at("image_id").get<std::string>();
  pl.box_corner = box_from_json(j.at("bbox"));
  pl.class_id = j.at("class_id").get<std::size_t>();
  pl.confidence = j.at("confidence").get<double>();
  if (pl.class_id == 0) throw std::invalid_argument("pseudo-label class_id must be >= 1");
  return pl;
}

/// Splits one CSV line on commas; the formats here never quote fields.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& source, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) fail(source, line, "bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(source, line, "bad number '" + s + "'");
  }
}

std::string chomp(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Dataset parse_dataset(std::string_view text, const std::string& source) {
  Dataset ds;
  try {
    const auto j = json::parse(text);
    ds.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& ji : j.at("images")) {
      ImageRecord im;
      const auto& id = ji.at("id");
      im.id = id.is_string() ? id.get<std::string>() : id.dump();
      im.width = ji.at("width").get<int>();
      im.height = ji.at("height").get<int>();
      for (const auto& jo : ji.value("objects", json::array())) {
        im.objects.push_back(
            {im.id, box_from_json(jo.at("bbox")), jo.at("class_id").get<std::size_t>()});
      }
      ds.images.push_back(std::move(im));
    }
    ds.validate();
  } catch (const json::exception& e) {
    fail(source, 0, e.what());
  } catch (const std::invalid_argument& e) {
    fail(source, 0, e.what());
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.string());
}

void write_dataset(std::ostream& os, const Dataset& ds) {
  json images = json::array();
  for (const auto& im : ds.images) {
    json objs = json::array();
    for (const auto& o : im.objects) {
      objs.push_back({{"class_id", o.class_id}, {"bbox", box_to_json(o.box_corner)}});
    }
    images.push_back(
        {{"id", im.id}, {"width", im.width}, {"height", im.height}, {"objects", std::move(objs)}});
  }
  os << json{{"classes", ds.classes}, {"images", std::move(images)}}.dump() << '\n';
}

PredictionTable read_predictions(std::istream& is, const Dataset* sizes,
                                 const std::string& source) {
  std::map<ImageId, std::pair<int, int>> dims;
  if (sizes) {
    for (const auto& im : sizes->images) dims[im.id] = {im.width, im.height};
  }
  PredictionTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = chomp(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      ImagePrediction pred;
      const auto& id = j.at("image_id");
      pred.image_id = id.is_string() ? id.get<std::string>() : id.dump();
      const bool flipped = j.at("flipped").get<bool>();
      if (j.contains("width") && j.contains("height")) {
        pred.width = j["width"].get<int>();
        pred.height = j["height"].get<int>();
      } else if (const auto it = dims.find(pred.image_id); it != dims.end()) {
        std::tie(pred.width, pred.height) = it->second;
      } else {
        fail(source, lineno, "no image size for '" + pred.image_id + "'");
      }
      if (pred.width <= 0 || pred.height <= 0) fail(source, lineno, "non-positive image size");
      for (const auto& jd : j.at("detections")) {
        const auto box = box_from_json(jd.at("bbox"));
        ClassDist dist(jd.at("probs").get<std::vector<double>>());
        if (jd.contains("encoded")) {
          const auto e = jd["encoded"].get<std::vector<double>>();
          if (e.size() != 4) fail(source, lineno, "encoded must be [dx,dy,w,h]");
          const BoxEncoded enc{e[0], e[1], e[2], e[3]};
          if (!enc.valid()) fail(source, lineno, "encoded box needs finite values and w,h > 0");
          pred.detections.push_back({box, enc, std::move(dist)});
        } else {
          pred.detections.push_back(
              Detection::from_corner(box, std::move(dist), pred.width, pred.height));
        }
      }
      table.add(std::move(pred), flipped);
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      fail(source, lineno, e.what());
    }
  }
  return table;
}

PredictionTable read_predictions(const std::filesystem::path& path, const Dataset* sizes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_predictions(in, sizes, path.string());
}

void write_prediction(std::ostream& os, const ImagePrediction& pred, bool flipped) {
  json dets = json::array();
  for (const auto& d : pred.detections) {
    const auto& e = d.box_encoded;
    dets.push_back({{"bbox", box_to_json(d.box_corner)},
                    {"encoded", json::array({e.dx, e.dy, e.w, e.h})},
                    {"probs", std::vector<double>(d.dist.probs().begin(), d.dist.probs().end())}});
  }
  os << json{{"image_id", pred.image_id},
             {"flipped", flipped},
             {"width", pred.width},
             {"height", pred.height},
             {"detections", std::move(dets)}}
            .dump()
     << '\n';
}

std::vector<PredictionPair> paired_predictions(const PredictionTable& table) {
  std::vector<PredictionPair> out;
  for (const auto& [key, pred] : table.records()) {
    const auto& [id, flipped] = key;
    if (flipped) {
      if (!table.contains(id, false)) {
        throw FormatError("image '" + id + "' has a flipped record but no original record");
      }
      continue;
    }
    if (!table.contains(id, true)) {
      throw FormatError("image '" + id + "' has no flipped record");
    }
    out.push_back({pred, table.predict(id, true)});
  }
  return out;
}

void write_scores_csv(std::ostream& os, std::span<const AcquisitionScore> scores) {
  os << "image_id,entropy,inconsistency,unified\n";
  for (const auto& s : scores) {
    os << s.image_id << ',' << fixed6(s.entropy) << ',' << fixed6(s.inconsistency) << ','
       << fixed6(s.unified) << '\n';
  }
}

std::vector<AcquisitionScore> read_scores_csv(std::istream& is, const std::string& source) {
  std::vector<AcquisitionScore> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = chomp(line);
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("image_id", 0) == 0) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) fail(source, lineno, "expected 4 columns");
    out.push_back({cells[0], parse_double(cells[1], source, lineno),
                   parse_double(cells[2], source, lineno),
                   parse_double(cells[3], source, lineno)});
  }
  return out;
}

void write_pseudo_labels(std::ostream& os, std::span<const PseudoLabel> pls) {
  for (const auto& pl : pls) os << pl_to_json(pl).dump() << '\n';
}

std::vector<PseudoLabel> read_pseudo_labels(std::istream& is, const std::string& source) {
  std::vector<PseudoLabel> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = chomp(line);
    if (line.empty()) continue;
    try {
      out.push_back(pl_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      fail(source, lineno, e.what());
    }
  }
  return out;
}

void write_pool(std::ostream& os, const Pool& pool) {
  json pseudo = json::object();
  for (const auto& [id, pls] : pool.pseudo) {
    json arr = json::array();
    for (const auto& pl : pls) arr.push_back(pl_to_json(pl));
    pseudo[id] = std::move(arr);
  }
  os << json{{"cycle", pool.cycle},
             {"labeled", pool.labeled},
             {"unlabeled", pool.unlabeled},
             {"pseudo", std::move(pseudo)}}
            .dump(1)
     << '\n';
}

Pool parse_pool(std::string_view text, const std::string& source) {
  Pool pool;
  try {
    const auto j = json::parse(text);
    pool.cycle = j.at("cycle").get<int>();
    for (const auto& id : j.at("labeled")) pool.labeled.insert(id.get<std::string>());
    for (const auto& id : j.at("unlabeled")) pool.unlabeled.insert(id.get<std::string>());
    const json pseudo = j.value("pseudo", json::object());
    for (const auto& [id, arr] : pseudo.items()) {
      auto& dst = pool.pseudo[id];
      for (const auto& jp : arr) dst.push_back(pl_from_json(jp));
    }
    pool.check_invariants();
  } catch (const std::exception& e) {
    fail(source, 0, e.what());
  }
  return pool;
}

Pool read_pool(const std::filesystem::path& path) {
  return parse_pool(read_file(path), path.string());
}

void write_eval_csv(std::ostream& os, const EvalResult& r) {
  os << "class_id,ap,n_gt\n";
  std::size_t total = 0;
  for (const auto& [c, n] : r.n_gt) {
    total += n;
    const auto it = r.per_class_ap.find(c);
    os << c << ',' << (it == r.per_class_ap.end() ? std::string() : fixed6(it->second)) << ','
       << n << '\n';
  }
  os << "map50," << fixed6(r.map50) << ',' << total << '\n';
}

EvalResult read_eval_csv(std::istream& is, const std::string& source) {
  EvalResult r;
  std::string line;
  std::size_t lineno = 0;
  bool have_summary = false;
  while (std::getline(is, line)) {
    ++lineno;
    line = chomp(line);
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("class_id", 0) == 0) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3) fail(source, lineno, "expected 3 columns");
    if (cells[0] == "map50") {
      r.map50 = parse_double(cells[1], source, lineno);
      have_summary = true;
      continue;
    }
    const auto c = static_cast<std::size_t>(parse_double(cells[0], source, lineno));
    const auto n = static_cast<std::size_t>(parse_double(cells[2], source, lineno));
    r.n_gt[c] = n;
    if (cells[1].empty()) {
      r.excluded_classes.push_back(c);
    } else {
      r.per_class_ap[c] = parse_double(cells[1], source, lineno);
    }
  }
  if (!have_summary) fail(source, 0, "missing map50 summary row");
  return r;
}

std::string selected_file_name(int cycle) {
  return "selected_cycle" + std::to_string(cycle) + ".txt";
}

void write_cycle_report_csv(std::ostream& os, std::span<const CycleReport> reports) {
  os << "cycle,n_labeled,n_pl,pl_ratio,pl_correctness,map50,selected_file\n";
  for (const auto& r : reports) {
    os << r.cycle << ',' << r.n_labeled << ',' << r.n_pl << ',' << fixed6(r.pl_ratio) << ','
       << fixed6(r.pl_audit.correctness) << ',' << fixed6(r.eval.map50) << ','
       << selected_file_name(r.cycle) << '\n';
  }
}

}  // namespace flipal::io
