#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gtd/corpus.hpp"
#include "gtd/ensemble.hpp"
#include "gtd/neural.hpp"
#include "gtd/textproc.hpp"
#include "gtd/vectorize.hpp"

namespace gtd {

// Model-family hyperparameters with the declared defaults; the config file
// overrides individual keys.
struct Hyperparams {
    // statistical bases
    double nb_alpha = 1.0;
    double pa_C = 1.0;
    double svm_lambda = 0.01;
    std::size_t linear_epochs = 5;
    std::size_t min_df = 1;
    // ensembles
    std::vector<std::string> members{"nb", "pa", "svm"};
    VoteMode vote_mode = VoteMode::Hard;
    std::size_t folds = 5;
    std::size_t n_estimators = 10;
    std::size_t n_rounds = 10;
    // neural
    NeuralConfig neural;
};

enum class EncoderKind { Bow, Tfidf, NeuralEmbedding };

EncoderKind parse_encoder(std::string_view name);
std::string_view encoder_name(EncoderKind e);

struct PipelineConfig {
    PipelineVariant preprocessing = PipelineVariant::Statistical;
    EncoderKind encoder = EncoderKind::Tfidf;
    std::string model = "nb";
    Hyperparams hyper;
    std::uint64_t seed = 0;
};

bool is_neural_model(const std::string& model);
bool is_ensemble_model(const std::string& model);
bool is_statistical_model(const std::string& model);

// Parses one config object. Missing preprocessing/encoder fields default by
// model family (statistical+recurrent models preprocess with the stopword/
// stemming pipeline, transformer ensembles with lowercase+punctuation only,
// standalone transformers with raw tokenization). Throws ConfigError on
// unknown fields, unknown values, or encoder/model incompatibility.
PipelineConfig parse_pipeline_config(const std::string& json_text);
// A single object or an array of them (grid configs).
std::vector<PipelineConfig> parse_pipeline_configs(const std::string& json_text);
std::string pipeline_config_to_json(const PipelineConfig& cfg);

// Human-readable identifier, e.g. "nb + tfidf" or "voting(nb,pa,svm) + bow".
std::string model_identifier(const PipelineConfig& cfg);

// A fitted (or loadable) end-to-end detector: preprocessing -> encoding ->
// classifier.
class Pipeline {
public:
    Pipeline(PipelineConfig cfg, Stoplist stoplist);

    void fit(const Corpus& train, std::uint64_t seed);
    Prediction predict_text(const std::string& text) const;

    bool fitted() const { return fitted_; }
    const PipelineConfig& config() const { return cfg_; }
    const Stoplist& stoplist() const { return stoplist_; }
    const Vocabulary& vocabulary() const { return vocab_; }

    // "train_f1" for statistical models, "final_loss" for neural ones.
    const std::string& training_metric_name() const { return metric_name_; }
    double training_metric_value() const { return metric_value_; }

    // Parameter blocks for the model file; load_params rebuilds the fitted
    // state from config + vocabulary + blocks without retraining.
    void save_params(NamedTensorMap& out) const;
    void load_params(const NamedTensorMap& in, Vocabulary vocab);

private:
    FeatureVector encode(const TokenSequence& tokens) const;
    std::vector<ClassifierFactory> member_factories() const;

    PipelineConfig cfg_;
    Stoplist stoplist_;
    Vocabulary vocab_;
    std::variant<std::monostate, std::unique_ptr<BaseClassifier>, VotingModel,
                 StackedModel, BaggedModel, BoostState,
                 std::unique_ptr<TextClassifierNet>>
        model_;
    bool fitted_ = false;
    std::string metric_name_;
    double metric_value_ = 0.0;
};

} // namespace gtd
