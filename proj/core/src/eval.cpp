#include "gtd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gtd/errors.hpp"

namespace gtd {

ConfusionCounts confusion(std::span<const Label> preds, std::span<const Label> truth) {
    if (preds.size() != truth.size() || preds.empty())
        throw DataError("confusion needs equal, non-empty prediction/truth lists");
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool pred_gen = preds[i] == Label::Generated;
        const bool true_gen = truth[i] == Label::Generated;
        if (pred_gen && true_gen)
            ++c.tp;
        else if (pred_gen && !true_gen)
            ++c.fp;
        else if (!pred_gen && true_gen)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

double precision(const ConfusionCounts& c) {
    const auto denom = c.tp + c.fp;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const ConfusionCounts& c) {
    const auto denom = c.tp + c.fn;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1_score(const ConfusionCounts& c) {
    const double p = precision(c);
    const double r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double accuracy(const ConfusionCounts& c) {
    const auto total = c.total();
    return total == 0 ? 0.0
                      : static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

EvalReport run_experiment(const PipelineConfig& cfg, const Stoplist& stoplist,
                          const Corpus& corpus, std::size_t n_runs,
                          std::uint64_t base_seed) {
    if (n_runs < 1) throw ConfigError("n_runs must be at least 1");

    EvalReport report;
    report.model_id = model_identifier(cfg);
    report.base_seed = base_seed;

    double f1_sum = 0.0;
    for (std::size_t r = 0; r < n_runs; ++r) {
        const std::uint64_t run_seed = base_seed + r;
        try {
            const auto [train, test] = split_corpus(corpus, 0.8, run_seed);
            Pipeline pipeline(cfg, stoplist);
            pipeline.fit(train, run_seed);

            std::vector<Label> preds, truth;
            preds.reserve(test.size());
            truth.reserve(test.size());
            for (const auto& doc : test.docs()) {
                preds.push_back(pipeline.predict_text(doc.text).label);
                truth.push_back(*doc.label);
            }
            const ConfusionCounts c = confusion(preds, truth);
            RunMetrics metrics;
            metrics.seed = run_seed;
            metrics.precision = precision(c);
            metrics.recall = recall(c);
            metrics.f1 = f1_score(c);
            metrics.accuracy = accuracy(c);
            f1_sum += metrics.f1;
            report.runs.push_back(metrics);
        } catch (const DataError& e) {
            throw DataError("run " + std::to_string(r) + ": " + e.what());
        } catch (const ConfigError& e) {
            throw ConfigError("run " + std::to_string(r) + ": " + e.what());
        } catch (const std::exception& e) {
            throw TrainError("run " + std::to_string(r) + ": " + e.what());
        }
    }
    report.mean_f1 = f1_sum / static_cast<double>(n_runs);
    return report;
}

std::vector<EvalReport> benchmark_grid(std::span<const PipelineConfig> configs,
                                       const Stoplist& stoplist, const Corpus& corpus,
                                       std::size_t n_runs, std::uint64_t base_seed) {
    if (configs.empty()) throw ConfigError("benchmark grid needs at least one config");
    std::vector<EvalReport> reports;
    reports.reserve(configs.size());
    for (const auto& cfg : configs) {
        try {
            reports.push_back(run_experiment(cfg, stoplist, corpus, n_runs, base_seed));
        } catch (const std::exception& e) {
            EvalReport failed;
            failed.model_id = model_identifier(cfg);
            failed.base_seed = base_seed;
            failed.error = e.what();
            reports.push_back(std::move(failed));
        }
    }
    return reports;
}

namespace {

std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    return buf;
}

} // namespace

std::string report_table(std::span<const EvalReport> reports, bool include_runs) {
    std::size_t best = reports.size();
    double best_f1 = -1.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (!reports[i].failed() && reports[i].mean_f1 > best_f1) {
            best_f1 = reports[i].mean_f1;
            best = i;
        }
    }

    std::size_t name_width = 5;
    for (const auto& r : reports) name_width = std::max(name_width, r.model_id.size());

    std::ostringstream out;
    out << "Model";
    out << std::string(name_width - 5 + 2, ' ') << "F1\n";
    out << std::string(name_width + 9, '-') << "\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        out << r.model_id << std::string(name_width - r.model_id.size() + 2, ' ');
        if (r.failed()) {
            out << "FAILED (" << r.error << ")";
        } else {
            out << pct(r.mean_f1);
            if (i == best) out << " *";
        }
        out << "\n";
    }
    if (include_runs) {
        for (const auto& r : reports) {
            if (r.failed()) continue;
            out << "\n" << r.model_id << " runs (seed, precision, recall, f1, accuracy):\n";
            for (const auto& m : r.runs) {
                out << "  " << m.seed << "  " << pct(m.precision) << "  " << pct(m.recall)
                    << "  " << pct(m.f1) << "  " << pct(m.accuracy) << "\n";
            }
            out << "  mean f1: " << pct(r.mean_f1) << "\n";
        }
    }
    return out.str();
}

std::string report_json(std::span<const EvalReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json obj;
        obj["model"] = r.model_id;
        obj["base_seed"] = r.base_seed;
        if (r.failed()) {
            obj["error"] = r.error;
        } else {
            obj["mean_f1"] = r.mean_f1;
            nlohmann::json runs = nlohmann::json::array();
            for (const auto& m : r.runs) {
                runs.push_back({{"seed", m.seed},
                                {"precision", m.precision},
                                {"recall", m.recall},
                                {"f1", m.f1},
                                {"accuracy", m.accuracy}});
            }
            obj["runs"] = runs;
        }
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

} // namespace gtd
