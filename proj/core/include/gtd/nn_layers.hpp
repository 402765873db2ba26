#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gtd/rng.hpp"
#include "gtd/tensor.hpp"

namespace gtd::nn {

struct Parameter {
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::size_t rows, std::size_t cols)
        : value(rows, cols), grad(rows, cols) {}
};

// Handle into a layer's parameter storage. frozen_prefix marks leading
// elements that are pinned (the embedding pad row) and must be skipped by
// updates and finite-difference probes.
struct ParamRef {
    std::string name;
    Tensor* value;
    Tensor* grad;
    std::size_t frozen_prefix = 0;
};

void glorot_init(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

// y = x W + b on a single row vector.
class Dense {
public:
    Dense(std::size_t in, std::size_t out) : W_(in, out), b_(1, out) {}
    void init(Rng& rng) { glorot_init(W_.value, W_.value.rows(), W_.value.cols(), rng); }

    struct Ctx {
        Tensor x;
    };
    Tensor forward(const Tensor& x, Ctx& ctx) const;
    Tensor backward(const Tensor& dy, const Ctx& ctx);
    void collect(std::vector<ParamRef>& out, const std::string& prefix);

private:
    Parameter W_, b_;
};

// Token-id lookup table. Row 0 is the pad row: zero at init, zero forever
// (its gradient is discarded).
class Embedding {
public:
    Embedding(std::size_t vocab_size, std::size_t dim) : E_(vocab_size, dim) {}
    void init(Rng& rng);

    struct Ctx {
        std::vector<std::uint32_t> ids;
    };
    // ids are already padded/truncated to the sequence length.
    Tensor forward(std::span<const std::uint32_t> ids, Ctx& ctx) const;
    void backward(const Tensor& dx, const Ctx& ctx);
    void collect(std::vector<ParamRef>& out, const std::string& prefix);

    std::size_t vocab_size() const { return E_.value.rows(); }

private:
    Parameter E_;
};

// Single-direction LSTM, h0 = c0 = 0, gate layout [i | f | g | o].
class Lstm {
public:
    Lstm(std::size_t in_dim, std::size_t hidden)
        : hidden_(hidden), Wx_(in_dim, 4 * hidden), Wh_(hidden, 4 * hidden),
          b_(1, 4 * hidden) {}
    void init(Rng& rng);

    struct Ctx {
        Tensor x;      // L x d
        Tensor gates;  // L x 4h, post-activation
        Tensor c;      // L x h
        Tensor h;      // L x h
    };
    Tensor forward(const Tensor& x, Ctx& ctx) const;  // L x h
    Tensor backward(const Tensor& dh_out, const Ctx& ctx);
    void collect(std::vector<ParamRef>& out, const std::string& prefix);

    std::size_t hidden() const { return hidden_; }

private:
    std::size_t hidden_;
    Parameter Wx_, Wh_, b_;
};

// Parallel 1-D convolution branches (one per kernel width), valid padding,
// ReLU, global max pooling over time, outputs concatenated.
class ConvBank {
public:
    ConvBank(std::vector<std::size_t> widths, std::size_t filters, std::size_t in_dim);
    void init(Rng& rng);

    struct Ctx {
        Tensor x;
        std::vector<Tensor> preact;               // per width: (L-w+1) x F
        std::vector<std::vector<std::size_t>> argmax;  // per width: F window indices
    };
    Tensor forward(const Tensor& x, Ctx& ctx) const;  // 1 x (n_widths * F)
    Tensor backward(const Tensor& dout, const Ctx& ctx);
    void collect(std::vector<ParamRef>& out, const std::string& prefix);

    std::size_t out_dim() const { return widths_.size() * filters_; }

private:
    std::vector<std::size_t> widths_;
    std::size_t filters_;
    std::size_t in_dim_;
    std::vector<Parameter> kernels_;  // per width: (w * in_dim) x F
    std::vector<Parameter> biases_;   // per width: 1 x F
};

// Row-wise layer normalization with learned gain/offset.
class LayerNorm {
public:
    explicit LayerNorm(std::size_t dim) : gamma_(1, dim), beta_(1, dim) {
        gamma_.value.fill(1.0);
    }

    struct Ctx {
        Tensor xhat;
        std::vector<double> inv_std;
    };
    Tensor forward(const Tensor& x, Ctx& ctx) const;
    Tensor backward(const Tensor& dy, const Ctx& ctx);
    void collect(std::vector<ParamRef>& out, const std::string& prefix);

    static constexpr double kEps = 1e-5;

private:
    Parameter gamma_, beta_;
};

// Scaled dot-product self-attention; pad keys are masked to -inf before
// the softmax. mask[t] is true for real positions.
class MultiHeadAttention {
public:
    MultiHeadAttention(std::size_t dim, std::size_t heads);
    void init(Rng& rng);

    struct Ctx {
        Tensor x, q, k, v;
        Tensor concat;
        std::vector<Tensor> attn;  // per head: L x L row-stochastic over valid keys
        std::vector<bool> mask;
    };
    Tensor forward(const Tensor& x, const std::vector<bool>& mask, Ctx& ctx) const;
    Tensor backward(const Tensor& dy, const Ctx& ctx);
    void collect(std::vector<ParamRef>& out, const std::string& prefix);

private:
    std::size_t dim_, heads_, head_dim_;
    Parameter wq_, wk_, wv_, wo_;
    Parameter bq_, bk_, bv_, bo_;
};

// Position-wise feed-forward with ReLU.
class FeedForward {
public:
    FeedForward(std::size_t dim, std::size_t hidden)
        : W1_(dim, hidden), b1_(1, hidden), W2_(hidden, dim), b2_(1, dim) {}
    void init(Rng& rng);

    struct Ctx {
        Tensor x;
        Tensor pre;  // L x hidden, pre-activation
    };
    Tensor forward(const Tensor& x, Ctx& ctx) const;
    Tensor backward(const Tensor& dy, const Ctx& ctx);
    void collect(std::vector<ParamRef>& out, const std::string& prefix);

private:
    Parameter W1_, b1_, W2_, b2_;
};

// Post-norm encoder block: x -> LN(x + MHA(x)) -> LN(.. + FF(..)).
class TransformerBlock {
public:
    TransformerBlock(std::size_t dim, std::size_t heads, std::size_t ff_dim)
        : mha_(dim, heads), ln1_(dim), ff_(dim, ff_dim), ln2_(dim) {}
    void init(Rng& rng);

    struct Ctx {
        MultiHeadAttention::Ctx mha;
        LayerNorm::Ctx ln1;
        FeedForward::Ctx ff;
        LayerNorm::Ctx ln2;
    };
    Tensor forward(const Tensor& x, const std::vector<bool>& mask, Ctx& ctx) const;
    Tensor backward(const Tensor& dy, const Ctx& ctx);
    void collect(std::vector<ParamRef>& out, const std::string& prefix);

private:
    MultiHeadAttention mha_;
    LayerNorm ln1_;
    FeedForward ff_;
    LayerNorm ln2_;
};

// Adds sinusoidal positional encodings in place (all rows, pads included;
// pad positions are masked downstream).
void add_positional_encoding(Tensor& x);

} // namespace gtd::nn
