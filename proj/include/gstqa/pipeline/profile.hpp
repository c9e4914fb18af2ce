#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "gstqa/models/reranker.hpp"
#include "gstqa/pipeline/dataset.hpp"

namespace gstqa::pipeline {

struct ProfileReport {
  double time_ratio = 0.0;    // gst wall time / baseline wall time
  double memory_ratio = 0.0;  // gst peak activation bytes / baseline
  double baseline_seconds = 0.0;
  double gst_seconds = 0.0;
  std::size_t baseline_peak_bytes = 0;
  std::size_t gst_peak_bytes = 0;
  std::size_t repetitions = 0;
};

namespace detail {

struct ArmResult {
  double seconds = 0.0;
  std::size_t peak_bytes = 0;
};

// Scores every (question, passage) pair once per repetition; reports the
// median wall time (warm-up excluded) and the largest single-forward
// activation footprint.
inline ArmResult run_arm(const models::RerankScorer& scorer, const nn::ModelParams& params,
                         const std::vector<std::vector<models::PreparedExample>>& prepared,
                         std::size_t repetitions) {
  ArmResult result;
  auto pass = [&]() {
    for (const auto& question : prepared) {
      for (const models::PreparedExample& ex : question) {
        nn::Tape t;
        const nn::BoundParams bp = nn::bind_params(t, params);
        const nn::Tape::Id z = scorer.logit_node(t, bp, ex);
        (void)t.val(z);
        result.peak_bytes = std::max(result.peak_bytes, t.peak_bytes());
      }
    }
  };
  pass();  // warm-up
  std::vector<double> times;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    pass();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  result.seconds = times[times.size() / 2];
  return result;
}

}  // namespace detail

// Identical inputs through both arms; ratios normalize the baseline cost
// to 1.00. Sequence growth from graph tokens makes the gst ratios land
// above 1.0.
inline ProfileReport profile_cost(const std::vector<DatasetRecord>& records,
                                  const nn::ModelParams& params_baseline,
                                  const models::RerankScorer& baseline,
                                  const nn::ModelParams& params_gst,
                                  const models::RerankScorer& gst_arm,
                                  std::size_t repetitions = 5) {
  auto prepare_all = [&](const models::RerankScorer& scorer) {
    std::vector<std::vector<models::PreparedExample>> out;
    for (const DatasetRecord& r : records) {
      std::vector<models::PreparedExample> q;
      for (const models::QPExample& e : models::make_examples(r)) q.push_back(scorer.prepare(e));
      out.push_back(std::move(q));
    }
    return out;
  };
  const auto base_prepared = prepare_all(baseline);
  const auto gst_prepared = prepare_all(gst_arm);
  const detail::ArmResult base = detail::run_arm(baseline, params_baseline, base_prepared, repetitions);
  const detail::ArmResult gst = detail::run_arm(gst_arm, params_gst, gst_prepared, repetitions);
  ProfileReport report;
  report.baseline_seconds = base.seconds;
  report.gst_seconds = gst.seconds;
  report.baseline_peak_bytes = base.peak_bytes;
  report.gst_peak_bytes = gst.peak_bytes;
  report.time_ratio = gst.seconds / base.seconds;
  report.memory_ratio =
      static_cast<double>(gst.peak_bytes) / static_cast<double>(base.peak_bytes);
  report.repetitions = repetitions;
  return report;
}

// Three significant digits, baseline pinned at 1.00.
inline std::string format_profile(const ProfileReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "baseline_time 1.00\nbaseline_memory 1.00\ngst_time_ratio %.3g\n"
                "gst_memory_ratio %.3g\n",
                r.time_ratio, r.memory_ratio);
  return buf;
}

}  // namespace gstqa::pipeline
