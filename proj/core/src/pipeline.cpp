#include "gtd/pipeline.hpp"

#include <algorithm>

#include <json.hpp>

#include "gtd/errors.hpp"
#include "gtd/eval.hpp"
#include "gtd/rng.hpp"

namespace gtd {

namespace {

using nlohmann::json;

const std::vector<std::string> kNeuralModels{
    "lstm", "bilstm", "lstm_cnn", "bilstm_cnn",
    "transformer", "transformer_cnn", "dual_transformer"};
const std::vector<std::string> kEnsembleModels{"voting", "stacking", "bagging",
                                               "boosting"};
const std::vector<std::string> kBaseModels{"nb", "pa", "svm"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

PipelineVariant default_preprocessing(const std::string& model) {
    // Statistical and recurrent inputs get the full stopword/stemming
    // pipeline; transformer ensembles only lowercase + punctuation strip;
    // standalone transformers take raw tokenization.
    if (model == "transformer") return PipelineVariant::Raw;
    if (model == "transformer_cnn" || model == "dual_transformer")
        return PipelineVariant::NeuralEnsemble;
    return PipelineVariant::Statistical;
}

template <typename T>
T get_number(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("hyperparameter \"" + key + "\" must be a number");
    return obj[key].get<T>();
}

void check_known_keys(const json& obj, const std::vector<std::string>& known,
                      const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!contains(known, key))
            throw ConfigError("unknown " + where + " field \"" + key + "\"");
    }
}

json hyper_to_json(const PipelineConfig& cfg) {
    const Hyperparams& h = cfg.hyper;
    json out = json::object();
    out["min_df"] = h.min_df;
    if (is_neural_model(cfg.model)) {
        const NeuralConfig& n = h.neural;
        out["embed_dim"] = n.embed_dim;
        out["max_seq_len"] = n.max_seq_len;
        out["lstm_hidden"] = n.lstm_hidden;
        out["kernel_widths"] = n.cnn.kernel_widths;
        out["filters_per_width"] = n.cnn.filters_per_width;
        out["layers"] = n.transformer.layers;
        out["heads"] = n.transformer.heads;
        out["ff_dim"] = n.transformer.ff_dim;
        out["epochs"] = n.epochs;
        out["batch_size"] = n.batch_size;
        out["learning_rate"] = n.learning_rate;
        return out;
    }
    out["alpha"] = h.nb_alpha;
    out["C"] = h.pa_C;
    out["lambda"] = h.svm_lambda;
    out["epochs"] = h.linear_epochs;
    if (is_ensemble_model(cfg.model)) {
        out["members"] = h.members;
        if (cfg.model == "voting")
            out["mode"] = h.vote_mode == VoteMode::Hard ? "hard" : "soft";
        if (cfg.model == "stacking") out["folds"] = h.folds;
        if (cfg.model == "bagging") out["n_estimators"] = h.n_estimators;
        if (cfg.model == "boosting") out["n_rounds"] = h.n_rounds;
    }
    return out;
}

void parse_hyper(const json& obj, PipelineConfig& cfg) {
    Hyperparams& h = cfg.hyper;
    if (is_neural_model(cfg.model)) {
        check_known_keys(obj,
                         {"min_df", "embed_dim", "max_seq_len", "lstm_hidden",
                          "kernel_widths", "filters_per_width", "layers", "heads",
                          "ff_dim", "epochs", "batch_size", "learning_rate"},
                         "hyperparameter");
        NeuralConfig& n = h.neural;
        h.min_df = get_number<std::size_t>(obj, "min_df", h.min_df);
        n.embed_dim = get_number<std::size_t>(obj, "embed_dim", n.embed_dim);
        n.max_seq_len = get_number<std::size_t>(obj, "max_seq_len", n.max_seq_len);
        n.lstm_hidden = get_number<std::size_t>(obj, "lstm_hidden", n.lstm_hidden);
        if (obj.contains("kernel_widths")) {
            if (!obj["kernel_widths"].is_array())
                throw ConfigError("kernel_widths must be an array");
            n.cnn.kernel_widths = obj["kernel_widths"].get<std::vector<std::size_t>>();
        }
        n.cnn.filters_per_width =
            get_number<std::size_t>(obj, "filters_per_width", n.cnn.filters_per_width);
        n.transformer.layers = get_number<std::size_t>(obj, "layers", n.transformer.layers);
        n.transformer.heads = get_number<std::size_t>(obj, "heads", n.transformer.heads);
        n.transformer.ff_dim = get_number<std::size_t>(obj, "ff_dim", n.transformer.ff_dim);
        n.epochs = get_number<std::size_t>(obj, "epochs", n.epochs);
        n.batch_size = get_number<std::size_t>(obj, "batch_size", n.batch_size);
        n.learning_rate = get_number<double>(obj, "learning_rate", n.learning_rate);
        return;
    }
    check_known_keys(obj,
                     {"min_df", "alpha", "C", "lambda", "epochs", "members", "mode",
                      "folds", "n_estimators", "n_rounds"},
                     "hyperparameter");
    h.min_df = get_number<std::size_t>(obj, "min_df", h.min_df);
    h.nb_alpha = get_number<double>(obj, "alpha", h.nb_alpha);
    h.pa_C = get_number<double>(obj, "C", h.pa_C);
    h.svm_lambda = get_number<double>(obj, "lambda", h.svm_lambda);
    h.linear_epochs = get_number<std::size_t>(obj, "epochs", h.linear_epochs);
    if (obj.contains("members")) {
        if (!is_ensemble_model(cfg.model))
            throw ConfigError("\"members\" only applies to ensemble models");
        h.members = obj["members"].get<std::vector<std::string>>();
        if (h.members.empty()) throw ConfigError("\"members\" must be non-empty");
        for (const auto& m : h.members)
            if (!contains(kBaseModels, m))
                throw ConfigError("unknown ensemble member \"" + m + "\"");
    }
    if (obj.contains("mode")) {
        const auto mode = obj["mode"].get<std::string>();
        if (mode == "hard")
            h.vote_mode = VoteMode::Hard;
        else if (mode == "soft")
            h.vote_mode = VoteMode::Soft;
        else
            throw ConfigError("voting mode must be \"hard\" or \"soft\"");
    }
    h.folds = get_number<std::size_t>(obj, "folds", h.folds);
    h.n_estimators = get_number<std::size_t>(obj, "n_estimators", h.n_estimators);
    h.n_rounds = get_number<std::size_t>(obj, "n_rounds", h.n_rounds);
    if (cfg.model == "stacking" && h.folds < 2)
        throw ConfigError("stacking needs folds >= 2");
    if (cfg.model == "bagging" && h.n_estimators < 1)
        throw ConfigError("bagging needs n_estimators >= 1");
    if (cfg.model == "boosting" && h.n_rounds < 1)
        throw ConfigError("boosting needs n_rounds >= 1");
}

PipelineConfig parse_one(const json& obj) {
    if (!obj.is_object()) throw ConfigError("pipeline config must be a JSON object");
    check_known_keys(obj, {"preprocessing", "encoder", "model", "hyperparameters", "seed"},
                     "config");
    PipelineConfig cfg;
    if (!obj.contains("model") || !obj["model"].is_string())
        throw ConfigError("config requires a string \"model\" field");
    cfg.model = obj["model"].get<std::string>();
    if (!is_neural_model(cfg.model) && !is_ensemble_model(cfg.model) &&
        !contains(kBaseModels, cfg.model))
        throw ConfigError("unknown model \"" + cfg.model + "\"");

    cfg.preprocessing = obj.contains("preprocessing")
                            ? parse_pipeline_variant(obj["preprocessing"].get<std::string>())
                            : default_preprocessing(cfg.model);
    cfg.encoder = obj.contains("encoder")
                      ? parse_encoder(obj["encoder"].get<std::string>())
                      : (is_neural_model(cfg.model) ? EncoderKind::NeuralEmbedding
                                                    : EncoderKind::Tfidf);
    if (obj.contains("seed")) cfg.seed = obj["seed"].get<std::uint64_t>();
    if (obj.contains("hyperparameters")) {
        if (!obj["hyperparameters"].is_object())
            throw ConfigError("\"hyperparameters\" must be an object");
        parse_hyper(obj["hyperparameters"], cfg);
    }

    // encoder/model compatibility
    const bool neural = is_neural_model(cfg.model);
    if (neural && cfg.encoder != EncoderKind::NeuralEmbedding)
        throw ConfigError("model \"" + cfg.model +
                          "\" requires encoder \"neural-embedding\", got \"" +
                          std::string(encoder_name(cfg.encoder)) + "\"");
    if (!neural && cfg.encoder == EncoderKind::NeuralEmbedding)
        throw ConfigError("model \"" + cfg.model +
                          "\" requires encoder \"bow\" or \"tfidf\", got \"" +
                          std::string(encoder_name(cfg.encoder)) + "\"");
    return cfg;
}

} // namespace

EncoderKind parse_encoder(std::string_view name) {
    if (name == "bow") return EncoderKind::Bow;
    if (name == "tfidf") return EncoderKind::Tfidf;
    if (name == "neural-embedding") return EncoderKind::NeuralEmbedding;
    throw ConfigError("unknown encoder \"" + std::string(name) +
                      "\" (expected bow, tfidf or neural-embedding)");
}

std::string_view encoder_name(EncoderKind e) {
    switch (e) {
        case EncoderKind::Bow: return "bow";
        case EncoderKind::Tfidf: return "tfidf";
        default: return "neural-embedding";
    }
}

bool is_neural_model(const std::string& model) { return contains(kNeuralModels, model); }
bool is_ensemble_model(const std::string& model) {
    return contains(kEnsembleModels, model);
}
bool is_statistical_model(const std::string& model) {
    return contains(kBaseModels, model) || is_ensemble_model(model);
}

PipelineConfig parse_pipeline_config(const std::string& json_text) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    return parse_one(parsed);
}

std::vector<PipelineConfig> parse_pipeline_configs(const std::string& json_text) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    std::vector<PipelineConfig> out;
    if (parsed.is_array()) {
        if (parsed.empty()) throw ConfigError("config array is empty");
        for (const auto& item : parsed) out.push_back(parse_one(item));
    } else {
        out.push_back(parse_one(parsed));
    }
    return out;
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
    json out;
    out["model"] = cfg.model;
    out["preprocessing"] = std::string(pipeline_variant_name(cfg.preprocessing));
    out["encoder"] = std::string(encoder_name(cfg.encoder));
    out["seed"] = cfg.seed;
    out["hyperparameters"] = hyper_to_json(cfg);
    return out.dump();
}

std::string model_identifier(const PipelineConfig& cfg) {
    std::string id = cfg.model;
    if (is_ensemble_model(cfg.model)) {
        id += "(";
        for (std::size_t i = 0; i < cfg.hyper.members.size(); ++i) {
            if (i > 0) id += ",";
            id += cfg.hyper.members[i];
        }
        id += ")";
    }
    if (!is_neural_model(cfg.model))
        id += std::string(" + ") + std::string(encoder_name(cfg.encoder));
    return id;
}

Pipeline::Pipeline(PipelineConfig cfg, Stoplist stoplist)
    : cfg_(std::move(cfg)), stoplist_(std::move(stoplist)) {}

FeatureVector Pipeline::encode(const TokenSequence& tokens) const {
    return cfg_.encoder == EncoderKind::Bow ? bow_vector(vocab_, tokens)
                                            : tfidf_vector(vocab_, tokens);
}

std::vector<ClassifierFactory> Pipeline::member_factories() const {
    BaseHyper hyper;
    hyper.nb_alpha = cfg_.hyper.nb_alpha;
    hyper.pa_C = cfg_.hyper.pa_C;
    hyper.svm_lambda = cfg_.hyper.svm_lambda;
    hyper.epochs = cfg_.hyper.linear_epochs;
    std::vector<ClassifierFactory> out;
    for (const auto& member : cfg_.hyper.members)
        out.push_back(base_classifier_factory(member, hyper, vocab_.size()));
    return out;
}

void Pipeline::fit(const Corpus& train, std::uint64_t seed) {
    if (!train.all_labeled()) throw DataError("training corpus must be fully labeled");
    if (train.empty()) throw DataError("training corpus is empty");

    std::vector<TokenSequence> token_docs;
    std::vector<Label> labels;
    token_docs.reserve(train.size());
    labels.reserve(train.size());
    for (const auto& doc : train.docs()) {
        token_docs.push_back(preprocess(doc.text, cfg_.preprocessing, stoplist_));
        labels.push_back(*doc.label);
    }
    vocab_ = fit_vocabulary(token_docs, cfg_.hyper.min_df);

    if (is_neural_model(cfg_.model)) {
        NeuralConfig ncfg = cfg_.hyper.neural;
        ncfg.vocab_size = vocab_.size() + 2;  // pad + unk
        const auto variant = parse_architecture(cfg_.model);
        auto net = std::make_unique<TextClassifierNet>(variant, ncfg);
        net->init_params(seed);

        std::vector<std::vector<std::uint32_t>> ids;
        ids.reserve(token_docs.size());
        for (const auto& tokens : token_docs)
            ids.push_back(tokens_to_ids(tokens, vocab_, ncfg.max_seq_len));

        const std::size_t epochs =
            ncfg.epochs > 0 ? ncfg.epochs : default_epochs(variant);
        const std::size_t batch =
            ncfg.batch_size > 0 ? ncfg.batch_size : default_batch_size(variant);
        const TrainResult result =
            train_classifier(*net, ids, labels, epochs, batch, ncfg.learning_rate,
                             derive_seed(seed, 1));
        metric_name_ = "final_loss";
        metric_value_ = result.epoch_losses.empty() ? 0.0 : result.epoch_losses.back();
        model_ = std::move(net);
        fitted_ = true;
        return;
    }

    std::vector<FeatureVector> X;
    X.reserve(token_docs.size());
    for (const auto& tokens : token_docs) X.push_back(encode(tokens));
    const auto w = uniform_weights(X.size());

    if (cfg_.model == "voting") {
        VotingSpec spec{cfg_.hyper.vote_mode, member_factories()};
        model_ = voting_fit(spec, X, labels, seed);
    } else if (cfg_.model == "stacking") {
        StackingSpec spec{cfg_.hyper.folds, member_factories()};
        model_ = stack_fit(spec, X, labels, seed);
    } else if (cfg_.model == "bagging") {
        BaggingSpec spec{cfg_.hyper.n_estimators, member_factories(), false};
        model_ = bag_fit(spec, X, labels, seed);
    } else if (cfg_.model == "boosting") {
        BoostingSpec spec{cfg_.hyper.n_rounds, member_factories()};
        BoostState state = boost_fit(spec, X, labels, seed);
        if (state.round_models.empty())
            throw TrainError("boosting kept no rounds (first round was no better "
                             "than chance)");
        model_ = std::move(state);
    } else {
        BaseHyper hyper;
        hyper.nb_alpha = cfg_.hyper.nb_alpha;
        hyper.pa_C = cfg_.hyper.pa_C;
        hyper.svm_lambda = cfg_.hyper.svm_lambda;
        hyper.epochs = cfg_.hyper.linear_epochs;
        auto clf = make_base_classifier(cfg_.model, hyper, vocab_.size(), seed);
        clf->fit(X, labels, w);
        model_ = std::move(clf);
    }
    fitted_ = true;

    // Training F1 on the fit data, Generated as the positive class.
    std::vector<Label> preds;
    preds.reserve(X.size());
    for (std::size_t d = 0; d < X.size(); ++d) {
        const auto& fv = X[d];
        preds.push_back(std::visit(
            [&](const auto& m) -> Label {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, std::unique_ptr<BaseClassifier>>)
                    return m->predict(fv).label;
                else if constexpr (std::is_same_v<T, VotingModel> ||
                                   std::is_same_v<T, StackedModel> ||
                                   std::is_same_v<T, BaggedModel>)
                    return m.predict(fv).label;
                else if constexpr (std::is_same_v<T, BoostState>)
                    return boost_predict(m, fv).label;
                else
                    throw ModelError("unexpected model state");
            },
            model_));
    }
    metric_name_ = "train_f1";
    metric_value_ = f1_score(confusion(preds, labels));
}

Prediction Pipeline::predict_text(const std::string& text) const {
    if (!fitted_) throw ModelError("pipeline is not fitted");
    const TokenSequence tokens = preprocess(text, cfg_.preprocessing, stoplist_);

    if (is_neural_model(cfg_.model)) {
        const auto& net = std::get<std::unique_ptr<TextClassifierNet>>(model_);
        const auto ids = tokens_to_ids(tokens, vocab_, net->config().max_seq_len);
        return neural_predict(*net, ids);
    }
    const FeatureVector fv = encode(tokens);
    return std::visit(
        [&](const auto& m) -> Prediction {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, std::unique_ptr<BaseClassifier>>)
                return m->predict(fv);
            else if constexpr (std::is_same_v<T, VotingModel> ||
                               std::is_same_v<T, StackedModel> ||
                               std::is_same_v<T, BaggedModel>)
                return m.predict(fv);
            else if constexpr (std::is_same_v<T, BoostState>)
                return boost_predict(m, fv);
            else
                throw ModelError("unexpected model state");
        },
        model_);
}

void Pipeline::save_params(NamedTensorMap& out) const {
    if (!fitted_) throw ModelError("cannot serialize an unfitted pipeline");
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, std::unique_ptr<BaseClassifier>>) {
                m->save(out, "model.");
            } else if constexpr (std::is_same_v<T, VotingModel>) {
                for (std::size_t i = 0; i < m.members.size(); ++i)
                    m.members[i]->save(out, "member" + std::to_string(i) + ".");
            } else if constexpr (std::is_same_v<T, StackedModel>) {
                for (std::size_t i = 0; i < m.members.size(); ++i)
                    m.members[i]->save(out, "member" + std::to_string(i) + ".");
                out["meta.weights"] = {{m.meta_weights.size()}, m.meta_weights};
                out["meta.bias"] = {{1}, {m.meta_bias}};
            } else if constexpr (std::is_same_v<T, BaggedModel>) {
                for (std::size_t i = 0; i < m.estimators.size(); ++i)
                    m.estimators[i]->save(out, "est" + std::to_string(i) + ".");
            } else if constexpr (std::is_same_v<T, BoostState>) {
                for (std::size_t i = 0; i < m.round_models.size(); ++i)
                    m.round_models[i]->save(out, "round" + std::to_string(i) + ".");
                out["boost.alphas"] = {{m.round_alphas.size()}, m.round_alphas};
            } else if constexpr (std::is_same_v<T, std::unique_ptr<TextClassifierNet>>) {
                m->save(out, "net.");
            } else {
                throw ModelError("cannot serialize an unfitted pipeline");
            }
        },
        model_);
}

void Pipeline::load_params(const NamedTensorMap& in, Vocabulary vocab) {
    vocab_ = std::move(vocab);
    try {
        if (is_neural_model(cfg_.model)) {
            NeuralConfig ncfg = cfg_.hyper.neural;
            ncfg.vocab_size = vocab_.size() + 2;
            auto net = std::make_unique<TextClassifierNet>(
                parse_architecture(cfg_.model), ncfg);
            net->load(in, "net.");
            model_ = std::move(net);
        } else if (cfg_.model == "voting" || cfg_.model == "stacking") {
            const auto factories = member_factories();
            std::vector<std::unique_ptr<BaseClassifier>> members;
            for (std::size_t i = 0; i < factories.size(); ++i) {
                auto clf = factories[i](0);
                clf->load(in, "member" + std::to_string(i) + ".");
                members.push_back(std::move(clf));
            }
            if (cfg_.model == "voting") {
                VotingModel m;
                m.mode = cfg_.hyper.vote_mode;
                m.members = std::move(members);
                model_ = std::move(m);
            } else {
                StackedModel m;
                m.members = std::move(members);
                m.meta_weights = in.at("meta.weights").data;
                m.meta_bias = in.at("meta.bias").data.at(0);
                if (m.meta_weights.size() != m.members.size())
                    throw ModelError("meta weight count does not match member count");
                model_ = std::move(m);
            }
        } else if (cfg_.model == "bagging") {
            const auto factories = member_factories();
            BaggedModel m;
            for (std::size_t i = 0; i < cfg_.hyper.n_estimators; ++i) {
                auto clf = factories[i % factories.size()](0);
                clf->load(in, "est" + std::to_string(i) + ".");
                m.estimators.push_back(std::move(clf));
            }
            model_ = std::move(m);
        } else if (cfg_.model == "boosting") {
            const auto factories = member_factories();
            BoostState m;
            m.round_alphas = in.at("boost.alphas").data;
            for (std::size_t i = 0; i < m.round_alphas.size(); ++i) {
                auto clf = factories[i % factories.size()](0);
                clf->load(in, "round" + std::to_string(i) + ".");
                m.round_models.push_back(std::move(clf));
            }
            model_ = std::move(m);
        } else {
            auto clf = make_base_classifier(cfg_.model,
                                            BaseHyper{cfg_.hyper.nb_alpha, cfg_.hyper.pa_C,
                                                      cfg_.hyper.svm_lambda,
                                                      cfg_.hyper.linear_epochs},
                                            vocab_.size(), 0);
            clf->load(in, "model.");
            model_ = std::move(clf);
        }
    } catch (const std::out_of_range&) {
        throw ModelError("model file is missing required parameter blocks");
    }
    fitted_ = true;
}

} // namespace gtd
