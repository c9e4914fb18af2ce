#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gstqa::pipeline {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedRecord : public DatasetError {
 public:
  MalformedRecord(std::size_t line, const std::string& detail)
      : DatasetError("malformed record at line " + std::to_string(line) + ": " + detail) {}
};

class MissingField : public DatasetError {
 public:
  MissingField(std::size_t line, const std::string& name)
      : DatasetError("record at line " + std::to_string(line) + " is missing field '" + name +
                     "'") {}
};

struct PassageRecord {
  std::string title;
  std::string text;
  std::optional<std::string> penman;  // question+passage pair graph
  int retrieval_rank = 0;
  std::optional<bool> positive;  // constructed label; derived from answers when absent
};

struct DatasetRecord {
  std::string question;
  std::vector<std::string> answers;
  std::vector<PassageRecord> passages;  // ordered by retrieval_rank
  std::optional<std::string> paraphrased_question;
};

// "Question: <q>. Title: <title>. Context: <text>", verbatim. An empty
// title still renders its segment.
inline std::string format_input(const std::string& question, const std::string& title,
                                const std::string& text) {
  return "Question: " + question + ". Title: " + title + ". Context: " + text;
}

inline nlohmann::json record_to_json(const DatasetRecord& r) {
  nlohmann::json j;
  j["question"] = r.question;
  j["answers"] = r.answers;
  nlohmann::json ps = nlohmann::json::array();
  for (const PassageRecord& p : r.passages) {
    nlohmann::json pj;
    pj["title"] = p.title;
    pj["text"] = p.text;
    pj["retrieval_rank"] = p.retrieval_rank;
    if (p.penman) pj["penman"] = *p.penman;
    if (p.positive) pj["positive"] = *p.positive;
    ps.push_back(std::move(pj));
  }
  j["passages"] = std::move(ps);
  if (r.paraphrased_question) j["paraphrased_question"] = *r.paraphrased_question;
  return j;
}

inline DatasetRecord record_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw MalformedRecord(line, "record is not an object");
  DatasetRecord r;
  if (!j.contains("question")) throw MissingField(line, "question");
  if (!j.contains("answers")) throw MissingField(line, "answers");
  if (!j.contains("passages")) throw MissingField(line, "passages");
  if (!j["question"].is_string()) throw MalformedRecord(line, "question must be a string");
  r.question = j["question"].get<std::string>();
  if (!j["answers"].is_array()) throw MalformedRecord(line, "answers must be an array");
  for (const auto& a : j["answers"]) {
    if (!a.is_string()) throw MalformedRecord(line, "answers must hold strings");
    r.answers.push_back(a.get<std::string>());
  }
  if (!j["passages"].is_array()) throw MalformedRecord(line, "passages must be an array");
  int last_rank = 0;
  bool first = true;
  for (const auto& pj : j["passages"]) {
    PassageRecord p;
    if (!pj.contains("title")) throw MissingField(line, "passages[].title");
    if (!pj.contains("text")) throw MissingField(line, "passages[].text");
    if (!pj.contains("retrieval_rank")) throw MissingField(line, "passages[].retrieval_rank");
    p.title = pj["title"].get<std::string>();
    p.text = pj["text"].get<std::string>();
    p.retrieval_rank = pj["retrieval_rank"].get<int>();
    if (pj.contains("penman")) p.penman = pj["penman"].get<std::string>();
    if (pj.contains("positive")) p.positive = pj["positive"].get<bool>();
    if (!first && p.retrieval_rank <= last_rank)
      throw MalformedRecord(line, "passages not ordered by retrieval_rank");
    first = false;
    last_rank = p.retrieval_rank;
    r.passages.push_back(std::move(p));
  }
  if (j.contains("paraphrased_question"))
    r.paraphrased_question = j["paraphrased_question"].get<std::string>();
  return r;
}

// Newline-delimited JSON records, UTF-8.
inline std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset: " + path.string());
  std::vector<DatasetRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
    try {
      records.push_back(record_from_json(j, line_no));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return records;
}

inline void save_dataset(const std::vector<DatasetRecord>& records,
                         const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DatasetError("cannot write dataset: " + tmp.string());
    for (const DatasetRecord& r : records) out << record_to_json(r).dump() << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace gstqa::pipeline
