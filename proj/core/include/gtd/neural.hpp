#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gtd/linear.hpp"
#include "gtd/named_tensors.hpp"
#include "gtd/nn_layers.hpp"
#include "gtd/textproc.hpp"
#include "gtd/vectorize.hpp"

namespace gtd {

enum class ArchitectureVariant {
    Lstm,
    BiLstm,
    LstmCnn,
    BiLstmCnn,
    Transformer,
    TransformerCnn,
    DualTransformerConcat,
};

ArchitectureVariant parse_architecture(std::string_view name);
std::string_view architecture_name(ArchitectureVariant v);
bool is_recurrent(ArchitectureVariant v);

struct CnnConfig {
    std::vector<std::size_t> kernel_widths{3, 4, 5};
    std::size_t filters_per_width = 32;
};

struct TransformerConfig {
    std::size_t layers = 2;
    std::size_t heads = 2;
    std::size_t ff_dim = 128;
};

struct NeuralConfig {
    std::size_t vocab_size = 0;  // embedding rows incl. pad(0) and unk(1)
    std::size_t embed_dim = 64;
    std::size_t max_seq_len = 128;
    std::size_t lstm_hidden = 64;
    CnnConfig cnn;
    TransformerConfig transformer;
    std::size_t epochs = 0;      // 0 -> per-architecture default
    std::size_t batch_size = 0;  // 0 -> per-architecture default
    double learning_rate = 1e-3;

    void validate(ArchitectureVariant v) const;  // throws ConfigError
};

std::size_t default_epochs(ArchitectureVariant v);      // 10 recurrent, 3 transformer
std::size_t default_batch_size(ArchitectureVariant v);  // 64 / 128 / 16

// Token ids for the embedding: 0 = pad, 1 = unk, vocabulary index + 2
// otherwise; padded/truncated to max_seq_len.
std::vector<std::uint32_t> tokens_to_ids(const TokenSequence& tokens,
                                         const Vocabulary& vocab,
                                         std::size_t max_seq_len);

// One of the composition graphs, trained end-to-end on a scalar logit.
class TextClassifierNet {
public:
    TextClassifierNet(ArchitectureVariant variant, const NeuralConfig& cfg);

    void init_params(std::uint64_t seed);

    // Per-sample activations captured by forward for backward.
    struct Cache {
        std::vector<nn::Embedding::Ctx> embed;  // per branch
        std::vector<nn::Lstm::Ctx> lstm;        // fwd [+ bwd]
        nn::ConvBank::Ctx conv;
        nn::Dense::Ctx head;
        std::vector<std::vector<nn::TransformerBlock::Ctx>> towers;
        std::vector<Tensor> tower_out;
        std::vector<std::vector<std::size_t>> pool_argmax;  // per tower
        std::vector<bool> mask;
        Tensor bilstm_states;  // L x 2h per-step concat (BiLstmCnn)
    };

    // ids must already be padded to max_seq_len. Returns the pre-sigmoid
    // logit; cache keeps everything backward() needs.
    double forward(std::span<const std::uint32_t> ids, Cache& cache) const;
    void backward(double dlogit, const Cache& cache);

    double predict_logit(std::span<const std::uint32_t> ids) const;

    std::vector<nn::ParamRef> params();
    void zero_grads();

    void save(NamedTensorMap& out, const std::string& prefix) const;
    void load(const NamedTensorMap& in, const std::string& prefix);

    ArchitectureVariant variant() const { return variant_; }
    const NeuralConfig& config() const { return cfg_; }

private:
    ArchitectureVariant variant_;
    NeuralConfig cfg_;

    std::vector<nn::Embedding> embeds_;            // 1, or 2 for the dual tower
    std::vector<nn::Lstm> lstms_;                  // fwd [+ bwd]
    std::optional<nn::ConvBank> conv_;
    std::vector<std::vector<nn::TransformerBlock>> towers_;
    std::optional<nn::Dense> head_;
};

struct TrainResult {
    std::vector<double> epoch_losses;  // mean BCE per epoch
};

// Adam with bias correction (beta1 0.9, beta2 0.999, eps 1e-8); elements
// inside a frozen prefix are never touched.
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<nn::ParamRef> params, double lr);
    void step();

    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

private:
    struct Slot {
        Tensor m, v;
    };
    std::vector<nn::ParamRef> params_;
    std::vector<Slot> slots_;
    double lr_;
    std::size_t t_ = 0;
};

// Adam over all trainable parameters; seeded shuffling; Glorot init is the
// caller's job (init_params). Throws TrainError on a non-finite loss,
// naming the offending batch.
TrainResult train_classifier(TextClassifierNet& net,
                             std::span<const std::vector<std::uint32_t>> ids,
                             std::span<const Label> labels, std::size_t epochs,
                             std::size_t batch_size, double learning_rate,
                             std::uint64_t seed);

// score = sigmoid(logit); score > 0.5 -> Generated, exactly 0.5 -> Human.
Prediction neural_predict(const TextClassifierNet& net,
                          std::span<const std::uint32_t> ids);

double bce_loss(double p, double y);
double bce_loss_from_logit(double z, double y);

} // namespace gtd
