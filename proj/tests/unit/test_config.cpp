#include <doctest.h>

#include "gtd/errors.hpp"
#include "gtd/pipeline.hpp"

using namespace gtd;

TEST_CASE("minimal config fills family defaults") {
    const PipelineConfig cfg = parse_pipeline_config(R"({"model":"nb"})");
    CHECK(cfg.model == "nb");
    CHECK(cfg.encoder == EncoderKind::Tfidf);
    CHECK(cfg.preprocessing == PipelineVariant::Statistical);
    CHECK(cfg.seed == 0);
    CHECK(cfg.hyper.nb_alpha == 1.0);
    CHECK(cfg.hyper.members == std::vector<std::string>{"nb", "pa", "svm"});
}

TEST_CASE("preprocessing defaults follow the model family") {
    CHECK(parse_pipeline_config(R"({"model":"lstm"})").preprocessing ==
          PipelineVariant::Statistical);
    CHECK(parse_pipeline_config(R"({"model":"transformer"})").preprocessing ==
          PipelineVariant::Raw);
    CHECK(parse_pipeline_config(R"({"model":"transformer_cnn"})").preprocessing ==
          PipelineVariant::NeuralEnsemble);
    CHECK(parse_pipeline_config(R"({"model":"dual_transformer"})").preprocessing ==
          PipelineVariant::NeuralEnsemble);
    CHECK(parse_pipeline_config(R"({"model":"lstm"})").encoder ==
          EncoderKind::NeuralEmbedding);
}

TEST_CASE("encoder/model incompatibilities name both fields") {
    CHECK_THROWS_WITH_AS(
        parse_pipeline_config(R"({"model":"lstm","encoder":"bow"})"),
        doctest::Contains("lstm"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_pipeline_config(R"({"model":"lstm","encoder":"bow"})"),
        doctest::Contains("bow"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_pipeline_config(R"({"model":"nb","encoder":"neural-embedding"})"),
        doctest::Contains("neural-embedding"), ConfigError);
    // every neural model rejects both statistical encoders
    for (const auto* model : {"lstm", "bilstm", "lstm_cnn", "bilstm_cnn",
                              "transformer", "transformer_cnn", "dual_transformer"}) {
        for (const auto* encoder : {"bow", "tfidf"}) {
            const std::string cfg =
                std::string(R"({"model":")") + model + R"(","encoder":")" + encoder + "\"}";
            CHECK_THROWS_AS(parse_pipeline_config(cfg), ConfigError);
        }
    }
    for (const auto* model : {"nb", "pa", "svm", "voting", "stacking", "bagging",
                              "boosting"}) {
        const std::string cfg = std::string(R"({"model":")") + model +
                                R"(","encoder":"neural-embedding"})";
        CHECK_THROWS_AS(parse_pipeline_config(cfg), ConfigError);
    }
}

TEST_CASE("unknown fields and values are rejected") {
    CHECK_THROWS_AS(parse_pipeline_config(R"({"model":"zoo"})"), ConfigError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"model":"nb","encoder":"onehot"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"model":"nb","oops":1})"), ConfigError);
    CHECK_THROWS_AS(
        parse_pipeline_config(R"({"model":"nb","hyperparameters":{"beta":2}})"),
        ConfigError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"model":"nb",)"), ConfigError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"model":"voting","hyperparameters":
        {"members":["nb","tree"]}})"), ConfigError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"model":"nb","hyperparameters":
        {"members":["nb"]}})"), ConfigError);  // members only for ensembles
    CHECK_THROWS_AS(parse_pipeline_config(R"({"model":"stacking","hyperparameters":
        {"folds":1}})"), ConfigError);
}

TEST_CASE("hyperparameters override defaults") {
    const PipelineConfig cfg = parse_pipeline_config(R"({
        "model": "boosting", "encoder": "bow", "seed": 42,
        "hyperparameters": {"n_rounds": 7, "members": ["nb", "svm"],
                             "alpha": 0.5, "lambda": 0.25, "epochs": 3}
    })");
    CHECK(cfg.seed == 42);
    CHECK(cfg.hyper.n_rounds == 7);
    CHECK(cfg.hyper.members == std::vector<std::string>{"nb", "svm"});
    CHECK(cfg.hyper.nb_alpha == 0.5);
    CHECK(cfg.hyper.svm_lambda == 0.25);
    CHECK(cfg.hyper.linear_epochs == 3);
}

TEST_CASE("neural hyperparameters parse into the neural config") {
    const PipelineConfig cfg = parse_pipeline_config(R"({
        "model": "transformer_cnn",
        "hyperparameters": {"embed_dim": 32, "max_seq_len": 24,
                             "kernel_widths": [2, 3], "filters_per_width": 8,
                             "layers": 1, "heads": 4, "ff_dim": 48,
                             "epochs": 2, "batch_size": 8, "learning_rate": 0.01}
    })");
    CHECK(cfg.hyper.neural.embed_dim == 32);
    CHECK(cfg.hyper.neural.max_seq_len == 24);
    CHECK(cfg.hyper.neural.cnn.kernel_widths == std::vector<std::size_t>{2, 3});
    CHECK(cfg.hyper.neural.transformer.heads == 4);
    CHECK(cfg.hyper.neural.learning_rate == 0.01);
}

TEST_CASE("grid configs parse from arrays, single objects stay singletons") {
    const auto grid = parse_pipeline_configs(
        R"([{"model":"nb"},{"model":"pa","encoder":"bow"}])");
    REQUIRE(grid.size() == 2);
    CHECK(grid[0].model == "nb");
    CHECK(grid[1].encoder == EncoderKind::Bow);

    CHECK(parse_pipeline_configs(R"({"model":"svm"})").size() == 1);
    CHECK_THROWS_AS(parse_pipeline_configs("[]"), ConfigError);
}

TEST_CASE("config serialization round-trips") {
    for (const auto* text :
         {R"({"model":"nb","encoder":"bow","seed":7})",
          R"({"model":"voting","encoder":"tfidf","hyperparameters":{"mode":"soft"}})",
          R"({"model":"transformer_cnn","hyperparameters":{"embed_dim":16,"heads":4}})"}) {
        const PipelineConfig a = parse_pipeline_config(text);
        const PipelineConfig b = parse_pipeline_config(pipeline_config_to_json(a));
        CHECK(a.model == b.model);
        CHECK(a.encoder == b.encoder);
        CHECK(a.preprocessing == b.preprocessing);
        CHECK(a.seed == b.seed);
        CHECK(a.hyper.members == b.hyper.members);
        CHECK(a.hyper.vote_mode == b.hyper.vote_mode);
        CHECK(a.hyper.neural.embed_dim == b.hyper.neural.embed_dim);
        CHECK(a.hyper.neural.transformer.heads == b.hyper.neural.transformer.heads);
        // serialized form is stable
        CHECK(pipeline_config_to_json(a) == pipeline_config_to_json(b));
    }
}

TEST_CASE("model identifiers read like the scores table") {
    CHECK(model_identifier(parse_pipeline_config(R"({"model":"nb"})")) == "nb + tfidf");
    CHECK(model_identifier(parse_pipeline_config(
              R"({"model":"voting","encoder":"bow"})")) == "voting(nb,pa,svm) + bow");
    CHECK(model_identifier(parse_pipeline_config(R"({"model":"transformer_cnn"})")) ==
          "transformer_cnn");
}
