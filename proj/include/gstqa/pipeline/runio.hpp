#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gstqa/eval/metrics.hpp"
#include "gstqa/pipeline/dataset.hpp"

namespace gstqa::pipeline {

// Ranked-run files: one JSON object per question with the full ranking
// and per-rank positive flags.
inline void save_run(const eval::RankedRun& run, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DatasetError("cannot write run file: " + tmp.string());
    for (const eval::RankedQuestion& q : run.questions) {
      nlohmann::json j;
      j["qid"] = q.qid;
      j["order"] = q.order;
      j["positive"] = q.positive;
      out << j.dump() << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

inline eval::RankedRun load_run(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open run file: " + path.string());
  eval::RankedRun run;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      eval::RankedQuestion q;
      q.qid = j.at("qid").get<std::string>();
      q.order = j.at("order").get<std::vector<int>>();
      q.positive = j.at("positive").get<std::vector<bool>>();
      run.questions.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return run;
}

struct Prediction {
  std::string qid;
  std::string prediction;
  std::vector<std::string> golds;
};

inline void save_predictions(const std::vector<Prediction>& preds,
                             const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DatasetError("cannot write predictions: " + tmp.string());
    for (const Prediction& p : preds) {
      nlohmann::json j;
      j["qid"] = p.qid;
      j["prediction"] = p.prediction;
      j["golds"] = p.golds;
      out << j.dump() << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open predictions: " + path.string());
  std::vector<Prediction> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      Prediction p;
      p.qid = j.at("qid").get<std::string>();
      p.prediction = j.at("prediction").get<std::string>();
      p.golds = j.at("golds").get<std::vector<std::string>>();
      preds.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return preds;
}

inline double predictions_em(const std::vector<Prediction>& preds) {
  if (preds.empty()) return 0.0;
  double total = 0.0;
  for (const Prediction& p : preds) total += eval::exact_match(p.prediction, p.golds);
  return total / static_cast<double>(preds.size());
}

}  // namespace gstqa::pipeline
