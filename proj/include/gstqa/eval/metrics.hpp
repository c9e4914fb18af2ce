#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gstqa::eval {

class QuestionSetMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// SQuAD-style answer normalization: case-fold, strip ASCII punctuation,
// drop articles a/an/the, collapse whitespace.
inline std::string normalize_answer(const std::string& s) {
  std::string lowered;
  lowered.reserve(s.size());
  for (char c : s) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (u < 128 && std::ispunct(u)) {
      lowered += ' ';
    } else {
      lowered += static_cast<char>(u < 128 ? std::tolower(u) : u);
    }
  }
  std::istringstream in(lowered);
  std::string word, out;
  while (in >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

// 1 iff the normalized prediction equals any normalized gold answer.
inline int exact_match(const std::string& prediction, const std::vector<std::string>& golds) {
  const std::string p = normalize_answer(prediction);
  for (const std::string& g : golds)
    if (p == normalize_answer(g)) return 1;
  return 0;
}

// A passage is positive iff some normalized answer occurs as a substring
// of the normalized passage text.
inline bool passage_is_positive(const std::string& passage_text,
                                const std::vector<std::string>& answers) {
  const std::string hay = normalize_answer(passage_text);
  for (const std::string& a : answers) {
    const std::string needle = normalize_answer(a);
    if (!needle.empty() && hay.find(needle) != std::string::npos) return true;
  }
  return false;
}

inline std::vector<bool> label_passages(const std::vector<std::string>& passage_texts,
                                        const std::vector<std::string>& answers) {
  std::vector<bool> flags;
  flags.reserve(passage_texts.size());
  for (const std::string& t : passage_texts) flags.push_back(passage_is_positive(t, answers));
  return flags;
}

// One question's ranked passages: order[i] is the passage id at rank i+1,
// positive[i] its label.
struct RankedQuestion {
  std::string qid;
  std::vector<int> order;
  std::vector<bool> positive;
};

struct RankedRun {
  std::vector<RankedQuestion> questions;
};

// Fraction of questions with at least one positive ranked within the top
// N. Questions without positives count as misses.
inline double top_n(const RankedRun& run, std::size_t n) {
  if (run.questions.empty()) return 0.0;
  double hits = 0.0;
  for (const RankedQuestion& q : run.questions) {
    const std::size_t limit = std::min(n, q.positive.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (q.positive[i]) {
        hits += 1.0;
        break;
      }
    }
  }
  return hits / static_cast<double>(run.questions.size());
}

// Mean over questions of the average reciprocal rank of that question's
// positives. Questions with no positives are excluded from the mean.
inline double mrr(const RankedRun& run) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const RankedQuestion& q : run.questions) {
    double sum = 0.0;
    std::size_t num_pos = 0;
    for (std::size_t i = 0; i < q.positive.size(); ++i) {
      if (q.positive[i]) {
        sum += 1.0 / static_cast<double>(i + 1);
        ++num_pos;
      }
    }
    if (num_pos > 0) {
      total += sum / static_cast<double>(num_pos);
      ++counted;
    }
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

// Mean over questions of the fraction of that question's positives ranked
// in the top 10. Questions with no positives are excluded.
inline double mhits10(const RankedRun& run) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const RankedQuestion& q : run.questions) {
    std::size_t num_pos = 0, in_top = 0;
    for (std::size_t i = 0; i < q.positive.size(); ++i) {
      if (q.positive[i]) {
        ++num_pos;
        if (i < 10) ++in_top;
      }
    }
    if (num_pos > 0) {
      total += static_cast<double>(in_top) / static_cast<double>(num_pos);
      ++counted;
    }
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

struct MetricReport {
  double top5 = 0.0;
  double top10 = 0.0;
  double mrr = 0.0;
  double mhits10 = 0.0;
  std::optional<double> em;  // reader metric, when predictions exist
  std::vector<std::string> question_ids;
};

inline MetricReport evaluate_run(const RankedRun& run) {
  MetricReport r;
  r.top5 = top_n(run, 5);
  r.top10 = top_n(run, 10);
  r.mrr = mrr(run);
  r.mhits10 = mhits10(run);
  for (const RankedQuestion& q : run.questions) r.question_ids.push_back(q.qid);
  return r;
}

struct MetricDrops {
  double top5 = 0.0;
  double top10 = 0.0;
  double mrr = 0.0;
  double mhits10 = 0.0;
  std::optional<double> em;
};

// drop = paraphrased - original, per metric. Both reports must cover the
// same question ids.
inline MetricDrops robustness_diff(const MetricReport& original, const MetricReport& paraphrased) {
  std::multiset<std::string> a(original.question_ids.begin(), original.question_ids.end());
  std::multiset<std::string> b(paraphrased.question_ids.begin(), paraphrased.question_ids.end());
  if (a != b) throw QuestionSetMismatch("robustness_diff: question id sets differ");
  MetricDrops d;
  d.top5 = paraphrased.top5 - original.top5;
  d.top10 = paraphrased.top10 - original.top10;
  d.mrr = paraphrased.mrr - original.mrr;
  d.mhits10 = paraphrased.mhits10 - original.mhits10;
  if (original.em && paraphrased.em) d.em = *paraphrased.em - *original.em;
  return d;
}

inline std::string report_to_text(const MetricReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "Top5 " << r.top5 << "\n";
  out << "Top10 " << r.top10 << "\n";
  out << "MRR " << r.mrr << "\n";
  out << "MHits@10 " << r.mhits10 << "\n";
  if (r.em) out << "EM " << *r.em << "\n";
  return out.str();
}

// Machine-readable record file: one metric per line as "name<TAB>value".
inline std::string report_to_records(const MetricReport& r) {
  std::ostringstream out;
  out.precision(12);
  out << "Top5\t" << r.top5 << "\n"
      << "Top10\t" << r.top10 << "\n"
      << "MRR\t" << r.mrr << "\n"
      << "MHits@10\t" << r.mhits10 << "\n";
  if (r.em) out << "EM\t" << *r.em << "\n";
  return out.str();
}

inline void write_report(const MetricReport& r, const std::filesystem::path& text_path,
                         const std::filesystem::path& records_path) {
  for (const auto& [path, body] :
       {std::pair{text_path, report_to_text(r)}, std::pair{records_path, report_to_records(r)}}) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    std::ofstream out(tmp, std::ios::trunc);
    out << body;
    out.close();
    std::filesystem::rename(tmp, path);
  }
}

}  // namespace gstqa::eval
