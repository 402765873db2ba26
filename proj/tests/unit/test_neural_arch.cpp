#include <doctest.h>

#include <cmath>

#include "gtd/neural.hpp"
#include "gtd/rng.hpp"
#include "support/gradcheck.hpp"

using namespace gtd;
using gtd::testsupport::finite_difference_check;

namespace {

// Tiny config every architecture can run with.
NeuralConfig tiny_config() {
    NeuralConfig cfg;
    cfg.vocab_size = 12;
    cfg.embed_dim = 8;
    cfg.max_seq_len = 7;
    cfg.lstm_hidden = 5;
    cfg.cnn.kernel_widths = {2, 3};
    cfg.cnn.filters_per_width = 3;
    cfg.transformer.layers = 1;
    cfg.transformer.heads = 2;
    cfg.transformer.ff_dim = 10;
    return cfg;
}

const std::vector<ArchitectureVariant> kAllVariants{
    ArchitectureVariant::Lstm,          ArchitectureVariant::BiLstm,
    ArchitectureVariant::LstmCnn,       ArchitectureVariant::BiLstmCnn,
    ArchitectureVariant::Transformer,   ArchitectureVariant::TransformerCnn,
    ArchitectureVariant::DualTransformerConcat};

std::vector<std::uint32_t> pad_ids(std::vector<std::uint32_t> ids, std::size_t L) {
    ids.resize(L, 0);
    return ids;
}

} // namespace

TEST_CASE("token ids reserve 0 for pad and 1 for unk and truncate at max length") {
    const std::vector<TokenSequence> docs{{"alpha", "beta"}};
    const Vocabulary vocab = fit_vocabulary(docs, 1);

    const auto ids = tokens_to_ids({"alpha", "mystery", "beta"}, vocab, 6);
    CHECK(ids == std::vector<std::uint32_t>{2, 1, 3, 0, 0, 0});

    TokenSequence long_doc(10, "alpha");
    const auto truncated = tokens_to_ids(long_doc, vocab, 4);
    CHECK(truncated == std::vector<std::uint32_t>{2, 2, 2, 2});
}

TEST_CASE("every architecture clears the end-to-end gradient check") {
    const NeuralConfig cfg = tiny_config();
    const std::vector<std::vector<std::uint32_t>> batch{
        pad_ids({2, 5, 7, 3}, cfg.max_seq_len),
        pad_ids({4, 4, 1}, cfg.max_seq_len),
        pad_ids({6, 2, 9, 10, 11, 3, 8}, cfg.max_seq_len),
        pad_ids({3}, cfg.max_seq_len)};
    const std::vector<double> targets{1.0, 0.0, 1.0, 0.0};

    for (const auto variant : kAllVariants) {
        CAPTURE(architecture_name(variant));
        TextClassifierNet net(variant, cfg);
        net.init_params(99);
        Rng jitter_rng(7);
        gtd::testsupport::jitter_params(net.params(), jitter_rng);
        net.zero_grads();

        auto batch_loss = [&] {
            double total = 0.0;
            for (std::size_t k = 0; k < batch.size(); ++k)
                total += bce_loss_from_logit(net.predict_logit(batch[k]), targets[k]);
            return total;
        };

        TextClassifierNet::Cache cache;
        for (std::size_t k = 0; k < batch.size(); ++k) {
            const double z = net.forward(batch[k], cache);
            const double p = logistic(z);
            net.backward(p - targets[k], cache);
        }

        const auto result = finite_difference_check(net.params(), batch_loss);
        CAPTURE(result.worst_param);
        CAPTURE(result.max_rel_err);
        CHECK(result.max_rel_err <= 1e-4);
        CHECK(result.checked > 0);
    }
}

TEST_CASE("predictions are sigmoid-scored with the 0.5-to-Human rule") {
    const NeuralConfig cfg = tiny_config();
    TextClassifierNet net(ArchitectureVariant::TransformerCnn, cfg);
    net.init_params(5);
    const auto ids = pad_ids({2, 3, 4}, cfg.max_seq_len);
    const Prediction p = neural_predict(net, ids);
    CHECK(p.score > 0.0);
    CHECK(p.score < 1.0);
    CHECK(p.label == (p.score > 0.5 ? Label::Generated : Label::Human));
}

TEST_CASE("dual tower concatenation doubles the head input width") {
    const NeuralConfig cfg = tiny_config();
    TextClassifierNet net(ArchitectureVariant::DualTransformerConcat, cfg);
    net.init_params(6);
    bool found = false;
    for (const auto& p : net.params()) {
        if (p.name == "head.W") {
            CHECK(p.value->rows() == 2 * cfg.embed_dim);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("appending pad tokens never changes transformer-family outputs") {
    const NeuralConfig cfg = tiny_config();
    for (const auto variant :
         {ArchitectureVariant::Transformer, ArchitectureVariant::TransformerCnn,
          ArchitectureVariant::DualTransformerConcat}) {
        CAPTURE(architecture_name(variant));
        TextClassifierNet net(variant, cfg);
        net.init_params(77);

        const std::vector<std::uint32_t> raw{2, 9, 4};
        std::vector<std::uint32_t> padded = raw;
        padded.insert(padded.end(), 3, 0u);

        const double a = net.predict_logit(pad_ids(raw, cfg.max_seq_len));
        const double b = net.predict_logit(pad_ids(padded, cfg.max_seq_len));
        CHECK(std::abs(a - b) <= 1e-9);
    }
}

TEST_CASE("empty documents still produce finite scores") {
    const NeuralConfig cfg = tiny_config();
    for (const auto variant : kAllVariants) {
        CAPTURE(architecture_name(variant));
        TextClassifierNet net(variant, cfg);
        net.init_params(31);
        const auto all_pad = pad_ids({}, cfg.max_seq_len);
        const double z = net.predict_logit(all_pad);
        CHECK(std::isfinite(z));
    }
}

TEST_CASE("prediction is bit-deterministic") {
    const NeuralConfig cfg = tiny_config();
    TextClassifierNet net(ArchitectureVariant::BiLstmCnn, cfg);
    net.init_params(8);
    const auto ids = pad_ids({2, 3, 4, 5, 6}, cfg.max_seq_len);
    const double a = net.predict_logit(ids);
    const double b = net.predict_logit(ids);
    CHECK(a == b);
}

TEST_CASE("training with the same seed yields bit-identical parameters") {
    NeuralConfig cfg = tiny_config();
    cfg.learning_rate = 1e-2;

    std::vector<std::vector<std::uint32_t>> ids;
    std::vector<Label> labels;
    Rng rng(17);
    for (std::size_t d = 0; d < 24; ++d) {
        std::vector<std::uint32_t> doc;
        const std::size_t len = 1 + rng.below(cfg.max_seq_len);
        for (std::size_t t = 0; t < len; ++t)
            doc.push_back(2 + static_cast<std::uint32_t>(rng.below(cfg.vocab_size - 2)));
        ids.push_back(pad_ids(doc, cfg.max_seq_len));
        labels.push_back(d % 2 == 0 ? Label::Human : Label::Generated);
    }

    for (const auto variant :
         {ArchitectureVariant::Lstm, ArchitectureVariant::TransformerCnn}) {
        CAPTURE(architecture_name(variant));
        TextClassifierNet a(variant, cfg), b(variant, cfg);
        a.init_params(123);
        b.init_params(123);
        train_classifier(a, ids, labels, 2, 8, cfg.learning_rate, 55);
        train_classifier(b, ids, labels, 2, 8, cfg.learning_rate, 55);
        auto pa = a.params(), pb = b.params();
        REQUIRE(pa.size() == pb.size());
        for (std::size_t k = 0; k < pa.size(); ++k) {
            REQUIRE(pa[k].value->size() == pb[k].value->size());
            for (std::size_t i = 0; i < pa[k].value->size(); ++i)
                CHECK((*pa[k].value)[i] == (*pb[k].value)[i]);
        }
    }
}
