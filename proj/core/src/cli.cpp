#include "gtd/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gtd/errors.hpp"
#include "gtd/eval.hpp"
#include "gtd/model_io.hpp"
#include "gtd/pipeline.hpp"

namespace gtd {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open \"" + path + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write \"" + path + "\"");
    out << content;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct GlobalOpts {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string stopwords_path;
    std::string json_path;
    bool no_meta = false;
};

Stoplist resolve_stoplist(const GlobalOpts& g) {
    return g.stopwords_path.empty() ? default_stoplist() : load_stoplist(g.stopwords_path);
}

Corpus load_input(const std::string& path, const std::string& format_flag,
                  bool allow_unlabeled) {
    const CorpusFormat format = format_flag.empty()
                                    ? format_from_path(path)
                                    : (format_flag == "jsonl" ? CorpusFormat::Jsonl
                                                              : CorpusFormat::Csv);
    return load_corpus(path, format, allow_unlabeled);
}

void cmd_stats(const std::string& input, const std::string& format,
               const GlobalOpts& g, std::ostream& out) {
    const Corpus corpus = load_input(input, format, /*allow_unlabeled=*/false);
    if (corpus.empty()) throw DataError("corpus is empty");
    const CorpusStats stats = corpus_stats(corpus);

    auto row = [&](std::string_view name, auto human, auto generated) {
        out << name;
        for (std::size_t i = name.size(); i < 12; ++i) out << ' ';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%10s %10s", std::to_string(human).c_str(),
                      std::to_string(generated).c_str());
        out << buf << "\n";
    };
    out << "            " << "     human  generated\n";
    row("docs", stats.human.n_docs, stats.generated.n_docs);
    row("min_words", stats.human.min_words, stats.generated.min_words);
    row("max_words", stats.human.max_words, stats.generated.max_words);
    row("avg_words", static_cast<long long>(std::llround(stats.human.avg_words)),
        static_cast<long long>(std::llround(stats.generated.avg_words)));

    if (!g.json_path.empty()) {
        std::ostringstream js;
        js.precision(17);
        js << "{\n";
        auto emit = [&js](const char* key, const LabelWordStats& s, bool last) {
            js << "  \"" << key << "\": {\"docs\": " << s.n_docs
               << ", \"min_words\": " << s.min_words << ", \"max_words\": " << s.max_words
               << ", \"avg_words\": " << s.avg_words << "}" << (last ? "\n" : ",\n");
        };
        emit("human", stats.human, false);
        emit("generated", stats.generated, true);
        js << "}\n";
        write_file(g.json_path, js.str());
    }
}

void cmd_train(const std::string& config_path, const std::string& input,
               const std::string& output, const std::string& format,
               const GlobalOpts& g, std::ostream& out) {
    PipelineConfig cfg = parse_pipeline_config(read_file(config_path));
    const std::uint64_t seed = g.seed_given ? g.seed : cfg.seed;
    cfg.seed = seed;

    const Corpus corpus = load_input(input, format, /*allow_unlabeled=*/false);
    Pipeline pipeline(cfg, resolve_stoplist(g));
    pipeline.fit(corpus, seed);

    ModelMetadata meta;
    meta.seed = seed;
    meta.corpus_fingerprint = corpus_fingerprint(corpus);
    meta.trained_docs = corpus.size();
    if (!g.no_meta) meta.timestamp = utc_timestamp();
    save_model_file(pipeline, meta, output);

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", pipeline.training_metric_value());
    out << model_identifier(cfg) << ": " << pipeline.training_metric_name() << "="
        << buf << "\n";
    out << "model written to " << output << "\n";
}

void cmd_eval(const std::string& config_path, const std::string& input,
              std::size_t runs, const std::string& format, const GlobalOpts& g,
              std::ostream& out) {
    const auto configs = parse_pipeline_configs(read_file(config_path));
    const std::uint64_t base_seed = g.seed_given ? g.seed : configs.front().seed;
    const Corpus corpus = load_input(input, format, /*allow_unlabeled=*/false);
    const Stoplist stoplist = resolve_stoplist(g);

    std::vector<EvalReport> reports;
    if (configs.size() == 1) {
        reports.push_back(run_experiment(configs[0], stoplist, corpus, runs, base_seed));
    } else {
        reports = benchmark_grid(configs, stoplist, corpus, runs, base_seed);
    }
    out << report_table(reports, /*include_runs=*/configs.size() == 1);
    if (!g.json_path.empty()) write_file(g.json_path, report_json(reports));
}

void cmd_benchmark(const std::string& config_path, const std::string& input,
                   std::size_t runs, const std::string& format, const GlobalOpts& g,
                   std::ostream& out) {
    const auto configs = parse_pipeline_configs(read_file(config_path));
    const std::uint64_t base_seed = g.seed_given ? g.seed : configs.front().seed;
    const Corpus corpus = load_input(input, format, /*allow_unlabeled=*/false);
    const auto reports =
        benchmark_grid(configs, resolve_stoplist(g), corpus, runs, base_seed);
    out << report_table(reports, /*include_runs=*/false);
    if (!g.json_path.empty()) write_file(g.json_path, report_json(reports));
}

void cmd_predict(const std::string& model_path, const std::string& input,
                 const std::string& text, bool text_given, const std::string& format,
                 std::ostream& out) {
    LoadedModel loaded = load_model_file(model_path);

    std::vector<Document> docs;
    if (text_given) {
        if (whitespace_word_count(text) == 0) throw DataError("--text is empty");
        Document doc;
        doc.id = "0";
        doc.text = text;
        docs.push_back(std::move(doc));
    } else {
        const Corpus corpus = load_input(input, format, /*allow_unlabeled=*/true);
        docs.assign(corpus.docs().begin(), corpus.docs().end());
    }

    for (const auto& doc : docs) {
        const Prediction pred = loaded.pipeline.predict_text(doc.text);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", pred.score);
        out << doc.id << "\t" << label_name(pred.label) << "\t" << buf << "\n";
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"machine-generated text detector"};
    app.require_subcommand(1);
    app.fallthrough(true);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "seed override")->each([&](const std::string&) {
        g.seed_given = true;
    });
    app.add_option("--stopwords", g.stopwords_path, "stopword list file");
    app.add_option("--json", g.json_path, "also write a JSON report/output file");
    app.add_flag("--no-meta", g.no_meta, "omit timestamps from outputs");

    std::string input, output, config_path, model_path, format, text;
    std::size_t runs = 5;
    bool text_given = false;

    auto* stats = app.add_subcommand("stats", "per-label corpus word statistics");
    stats->add_option("--input", input, "corpus file (.jsonl or .csv)")->required();
    stats->add_option("--format", format, "jsonl|csv (default: by extension)")
        ->check(CLI::IsMember({"jsonl", "csv"}));

    auto* train = app.add_subcommand("train", "train a detector on a full corpus");
    train->add_option("--config", config_path, "pipeline config JSON")->required();
    train->add_option("--input", input, "labeled corpus")->required();
    train->add_option("--output", output, "model file to write")->required();
    train->add_option("--format", format, "jsonl|csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));

    auto* eval = app.add_subcommand("eval", "multi-run split/train/test evaluation");
    eval->add_option("--config", config_path, "pipeline config JSON (object or array)")
        ->required();
    eval->add_option("--input", input, "labeled corpus")->required();
    eval->add_option("--runs", runs, "experimental iterations (default 5)");
    eval->add_option("--format", format, "jsonl|csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));

    auto* bench = app.add_subcommand("benchmark", "evaluate a grid of configs");
    bench->add_option("--config", config_path, "JSON array of pipeline configs")
        ->required();
    bench->add_option("--input", input, "labeled corpus")->required();
    bench->add_option("--runs", runs, "experimental iterations (default 5)");
    bench->add_option("--format", format, "jsonl|csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));

    auto* predict = app.add_subcommand("predict", "label documents with a trained model");
    predict->add_option("--model", model_path, "model file")->required();
    predict->add_option("--input", input, "documents to label (labels optional)");
    predict->add_option("--text", text, "single text to label")->each(
        [&](const std::string&) { text_given = true; });
    predict->add_option("--format", format, "jsonl|csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));

    try {
        std::vector<const char*> argv;
        argv.push_back("gtd");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (stats->parsed()) {
            cmd_stats(input, format, g, out);
        } else if (train->parsed()) {
            cmd_train(config_path, input, output, format, g, out);
        } else if (eval->parsed()) {
            cmd_eval(config_path, input, runs, format, g, out);
        } else if (bench->parsed()) {
            cmd_benchmark(config_path, input, runs, format, g, out);
        } else if (predict->parsed()) {
            if (text_given == !input.empty())
                throw ConfigError("predict needs exactly one of --input or --text");
            cmd_predict(model_path, input, text, text_given, format, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (const TrainError& e) {
        err << "training error: " << e.what() << "\n";
        return 3;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace gtd
