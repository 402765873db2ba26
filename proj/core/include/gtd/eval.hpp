#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gtd/corpus.hpp"
#include "gtd/pipeline.hpp"

namespace gtd {

// Generated is the positive class everywhere.
struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(std::span<const Label> preds, std::span<const Label> truth);

// Zero denominators yield 0, so degenerate runs stay comparable.
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1_score(const ConfusionCounts& c);
double accuracy(const ConfusionCounts& c);

struct RunMetrics {
    std::uint64_t seed = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

struct EvalReport {
    std::string model_id;
    std::vector<RunMetrics> runs;
    double mean_f1 = 0.0;
    std::uint64_t base_seed = 0;
    std::string error;  // non-empty when the config failed; runs then empty

    bool failed() const { return !error.empty(); }
};

// Run r: stratified 80:20 split and training with seed base_seed + r,
// evaluation on the held-out 20%. Reported mean is the arithmetic mean of
// the run F1 values. Errors are annotated with the run index.
EvalReport run_experiment(const PipelineConfig& cfg, const Stoplist& stoplist,
                          const Corpus& corpus, std::size_t n_runs,
                          std::uint64_t base_seed);

// Same seeds for every config, so each run index sees identical splits.
// Per-config failures are recorded in the report and the grid continues.
std::vector<EvalReport> benchmark_grid(std::span<const PipelineConfig> configs,
                                       const Stoplist& stoplist, const Corpus& corpus,
                                       std::size_t n_runs, std::uint64_t base_seed);

// Text table shaped like the classification-scores table: one row per model
// with the mean F1 as a percentage, best row flagged. include_runs adds a
// per-run detail block per report.
std::string report_table(std::span<const EvalReport> reports, bool include_runs);
std::string report_json(std::span<const EvalReport> reports);

} // namespace gtd
