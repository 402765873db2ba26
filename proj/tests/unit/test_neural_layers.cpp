#include <doctest.h>

#include <cmath>

#include "gtd/errors.hpp"
#include "gtd/nn_layers.hpp"
#include "gtd/rng.hpp"
#include "support/gradcheck.hpp"

using namespace gtd;
using namespace gtd::nn;
using gtd::testsupport::finite_difference_check;

namespace {

constexpr double kTol = 1e-4;

Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng) {
    Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
    return t;
}

// 0.5 * sum of squares, and its gradient w.r.t. the layer output.
double probe_loss(const Tensor& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * y[i];
    return 0.5 * s;
}

Tensor probe_grad(const Tensor& y) { return y; }

} // namespace

TEST_CASE("dense layer gradients match finite differences") {
    Rng rng(1);
    Dense layer(7, 3);
    layer.init(rng);
    const Tensor x = random_tensor(1, 7, rng);

    Dense::Ctx ctx;
    Tensor y = layer.forward(x, ctx);
    const Tensor dx = layer.backward(probe_grad(y), ctx);

    std::vector<ParamRef> params;
    layer.collect(params, "dense");
    const auto result = finite_difference_check(params, [&] {
        Dense::Ctx scratch;
        return probe_loss(layer.forward(x, scratch));
    });
    CHECK(result.max_rel_err <= kTol);

    // input gradient against finite differences
    Tensor x_probe = x;
    for (std::size_t i = 0; i < x_probe.size(); ++i) {
        const double saved = x_probe[i];
        Dense::Ctx scratch;
        x_probe[i] = saved + 1e-5;
        const double up = probe_loss(layer.forward(x_probe, scratch));
        x_probe[i] = saved - 1e-5;
        const double down = probe_loss(layer.forward(x_probe, scratch));
        x_probe[i] = saved;
        CHECK(std::abs((up - down) / 2e-5 - dx[i]) <= kTol);
    }
}

TEST_CASE("embedding looks rows up and keeps the pad row frozen at zero") {
    Rng rng(2);
    Embedding emb(5, 4);
    emb.init(rng);

    Embedding::Ctx ctx;
    const std::vector<std::uint32_t> all_pad{0, 0, 0};
    const Tensor zeros = emb.forward(all_pad, ctx);
    for (std::size_t i = 0; i < zeros.size(); ++i) CHECK(zeros[i] == 0.0);

    const std::vector<std::uint32_t> ids{1, 0};
    const Tensor x = emb.forward(ids, ctx);
    CHECK(x(1, 0) == 0.0);
    CHECK(x(0, 0) != 0.0);

    CHECK_THROWS_AS(emb.forward(std::vector<std::uint32_t>{9}, ctx), DataError);
}

TEST_CASE("embedding gradients match finite differences outside the frozen row") {
    Rng rng(3);
    Embedding emb(6, 4);
    emb.init(rng);
    const std::vector<std::uint32_t> ids{2, 5, 2, 0};

    Embedding::Ctx ctx;
    const Tensor y = emb.forward(ids, ctx);
    emb.backward(probe_grad(y), ctx);

    std::vector<ParamRef> params;
    emb.collect(params, "embed");
    CHECK(params[0].frozen_prefix == 4);  // pad row excluded
    const auto result = finite_difference_check(params, [&] {
        Embedding::Ctx scratch;
        return probe_loss(emb.forward(ids, scratch));
    });
    CHECK(result.max_rel_err <= kTol);
}

TEST_CASE("lstm with all-zero parameters emits all-zero states") {
    Lstm lstm(3, 4);  // not initialized: weights and biases are zero
    Lstm::Ctx ctx;
    Rng rng(4);
    const Tensor x = random_tensor(5, 3, rng);
    const Tensor h = lstm.forward(x, ctx);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i] == 0.0);
}

TEST_CASE("a large forget bias makes the cell state persist") {
    // Gate layout [i | f | g | o]: push the forget-gate bias toward 1.
    Rng rng(5);
    Lstm lstm(2, 3);
    lstm.init(rng);
    std::vector<ParamRef> params;
    lstm.collect(params, "lstm");
    for (auto& p : params) {
        if (p.name == "lstm.b")
            for (std::size_t j = 3; j < 6; ++j) (*p.value)[j] = 25.0;
    }
    Tensor x(3, 2);  // nonnegative inputs over 3 steps
    x.fill(0.5);
    Lstm::Ctx ctx;
    lstm.forward(x, ctx);
    // With f ~= 1 and i*g >= 0 ... c_t is monotone nondecreasing when g >= 0;
    // check |c_t| never shrinks across time for each unit.
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(ctx.c(1, j)) >= std::abs(ctx.c(0, j)) - 1e-9);
        CHECK(std::abs(ctx.c(2, j)) >= std::abs(ctx.c(1, j)) - 1e-9);
    }
}

TEST_CASE("lstm gradients match finite differences on a 5-token toy") {
    Rng rng(6);
    Lstm lstm(4, 3);
    lstm.init(rng);
    const Tensor x = random_tensor(5, 4, rng);

    Lstm::Ctx ctx;
    const Tensor h = lstm.forward(x, ctx);
    const Tensor dx = lstm.backward(probe_grad(h), ctx);

    std::vector<ParamRef> params;
    lstm.collect(params, "lstm");
    const auto result = finite_difference_check(params, [&] {
        Lstm::Ctx scratch;
        return probe_loss(lstm.forward(x, scratch));
    });
    CAPTURE(result.worst_param);
    CHECK(result.max_rel_err <= kTol);

    Tensor x_probe = x;
    for (std::size_t i = 0; i < x_probe.size(); ++i) {
        const double saved = x_probe[i];
        Lstm::Ctx scratch;
        x_probe[i] = saved + 1e-5;
        const double up = probe_loss(lstm.forward(x_probe, scratch));
        x_probe[i] = saved - 1e-5;
        const double down = probe_loss(lstm.forward(x_probe, scratch));
        x_probe[i] = saved;
        const double fd = (up - down) / 2e-5;
        CHECK(std::abs(fd - dx[i]) <=
              kTol * std::max({1.0, std::abs(fd), std::abs(dx[i])}));
    }
}

TEST_CASE("conv bank output shapes follow the width arithmetic") {
    ConvBank bank({3, 4, 5}, 32, 64);
    CHECK(bank.out_dim() == 96);

    Rng rng(7);
    ConvBank small({2, 3}, 4, 5);
    small.init(rng);
    ConvBank::Ctx ctx;
    const Tensor x = random_tensor(6, 5, rng);
    const Tensor y = small.forward(x, ctx);
    CHECK(y.cols() == 8);
    REQUIRE(ctx.preact.size() == 2);
    CHECK(ctx.preact[0].rows() == 5);  // 6 - 2 + 1
    CHECK(ctx.preact[1].rows() == 4);  // 6 - 3 + 1
}

TEST_CASE("conv bank on zero input with zero bias is zero") {
    Rng rng(8);
    ConvBank bank({3}, 4, 5);
    bank.init(rng);  // biases stay zero
    Tensor x(7, 5);
    ConvBank::Ctx ctx;
    const Tensor y = bank.forward(x, ctx);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == 0.0);
}

TEST_CASE("global max pooling finds a lone activation anywhere in time") {
    Rng rng(9);
    ConvBank bank({2}, 3, 4);
    bank.init(rng);

    auto pooled_for = [&](std::size_t hot_row) {
        Tensor x(8, 4);
        x(hot_row, 1) = 1.0;
        ConvBank::Ctx ctx;
        return bank.forward(x, ctx);
    };
    const Tensor a = pooled_for(0);
    const Tensor b = pooled_for(4);
    const Tensor c = pooled_for(7);
    // An interior activation is seen at both window offsets, so its pooled
    // value dominates the boundary placements that see only one offset.
    for (std::size_t f = 0; f < 3; ++f)
        CHECK(b(0, f) == doctest::Approx(std::max({a(0, f), b(0, f), c(0, f)}))
                             .epsilon(1e-12));
}

TEST_CASE("permuting time positions leaves the pooled conv output unchanged") {
    Rng rng(10);
    ConvBank bank({1}, 5, 6);  // width-1 windows: pooling sees rows directly
    bank.init(rng);
    Tensor x = random_tensor(9, 6, rng);

    ConvBank::Ctx ctx;
    const Tensor before = bank.forward(x, ctx);
    // rotate rows
    Tensor rotated(9, 6);
    for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t c = 0; c < 6; ++c) rotated(r, c) = x((r + 4) % 9, c);
    const Tensor after = bank.forward(rotated, ctx);
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(before[i] == doctest::Approx(after[i]).epsilon(1e-12));
}

TEST_CASE("conv bank gradients match finite differences") {
    Rng rng(11);
    ConvBank bank({2, 3}, 3, 4);
    bank.init(rng);
    const Tensor x = random_tensor(7, 4, rng);

    ConvBank::Ctx ctx;
    const Tensor y = bank.forward(x, ctx);
    bank.backward(probe_grad(y), ctx);

    std::vector<ParamRef> params;
    bank.collect(params, "cnn");
    const auto result = finite_difference_check(params, [&] {
        ConvBank::Ctx scratch;
        return probe_loss(bank.forward(x, scratch));
    });
    CAPTURE(result.worst_param);
    CHECK(result.max_rel_err <= kTol);
}

TEST_CASE("layer norm gradients match finite differences") {
    Rng rng(12);
    LayerNorm ln(6);
    const Tensor x = random_tensor(4, 6, rng);

    LayerNorm::Ctx ctx;
    const Tensor y = ln.forward(x, ctx);
    const Tensor dx = ln.backward(probe_grad(y), ctx);

    std::vector<ParamRef> params;
    ln.collect(params, "ln");
    const auto result = finite_difference_check(params, [&] {
        LayerNorm::Ctx scratch;
        return probe_loss(ln.forward(x, scratch));
    });
    CHECK(result.max_rel_err <= kTol);

    Tensor x_probe = x;
    for (std::size_t i = 0; i < x_probe.size(); ++i) {
        const double saved = x_probe[i];
        LayerNorm::Ctx scratch;
        x_probe[i] = saved + 1e-5;
        const double up = probe_loss(ln.forward(x_probe, scratch));
        x_probe[i] = saved - 1e-5;
        const double down = probe_loss(ln.forward(x_probe, scratch));
        x_probe[i] = saved;
        const double fd = (up - down) / 2e-5;
        CHECK(std::abs(fd - dx[i]) <=
              kTol * std::max({1.0, std::abs(fd), std::abs(dx[i])}));
    }
}

TEST_CASE("attention rows are stochastic over unmasked keys") {
    Rng rng(13);
    MultiHeadAttention mha(8, 2);
    mha.init(rng);
    const Tensor x = random_tensor(5, 8, rng);
    std::vector<bool> mask{true, true, true, false, false};

    MultiHeadAttention::Ctx ctx;
    mha.forward(x, mask, ctx);
    for (const auto& attn : ctx.attn) {
        for (std::size_t i = 0; i < 5; ++i) {
            double row_sum = 0.0;
            for (std::size_t j = 0; j < 5; ++j) {
                if (!mask[j]) CHECK(attn(i, j) == 0.0);
                row_sum += attn(i, j);
            }
            CHECK(std::abs(row_sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("a single unmasked token attends only to itself") {
    Rng rng(14);
    MultiHeadAttention mha(6, 2);
    mha.init(rng);
    const Tensor x = random_tensor(4, 6, rng);
    std::vector<bool> mask{true, false, false, false};

    MultiHeadAttention::Ctx ctx;
    mha.forward(x, mask, ctx);
    for (const auto& attn : ctx.attn)
        for (std::size_t i = 0; i < 4; ++i) CHECK(attn(i, 0) == doctest::Approx(1.0));
}

TEST_CASE("attention gradients match finite differences") {
    Rng rng(15);
    MultiHeadAttention mha(8, 2);
    mha.init(rng);
    const Tensor x = random_tensor(5, 8, rng);
    const std::vector<bool> mask{true, true, true, true, false};

    MultiHeadAttention::Ctx ctx;
    const Tensor y = mha.forward(x, mask, ctx);
    const Tensor dx = mha.backward(probe_grad(y), ctx);

    std::vector<ParamRef> params;
    mha.collect(params, "attn");
    const auto result = finite_difference_check(params, [&] {
        MultiHeadAttention::Ctx scratch;
        return probe_loss(mha.forward(x, mask, scratch));
    });
    CAPTURE(result.worst_param);
    CHECK(result.max_rel_err <= kTol);

    Tensor x_probe = x;
    for (std::size_t i = 0; i < x_probe.size(); ++i) {
        const double saved = x_probe[i];
        MultiHeadAttention::Ctx scratch;
        x_probe[i] = saved + 1e-5;
        const double up = probe_loss(mha.forward(x_probe, mask, scratch));
        x_probe[i] = saved - 1e-5;
        const double down = probe_loss(mha.forward(x_probe, mask, scratch));
        x_probe[i] = saved;
        const double fd = (up - down) / 2e-5;
        CHECK(std::abs(fd - dx[i]) <=
              kTol * std::max({1.0, std::abs(fd), std::abs(dx[i])}));
    }
}

TEST_CASE("feed-forward gradients match finite differences") {
    Rng rng(16);
    FeedForward ff(6, 10);
    ff.init(rng);
    const Tensor x = random_tensor(4, 6, rng);

    FeedForward::Ctx ctx;
    const Tensor y = ff.forward(x, ctx);
    ff.backward(probe_grad(y), ctx);

    std::vector<ParamRef> params;
    ff.collect(params, "ff");
    const auto result = finite_difference_check(params, [&] {
        FeedForward::Ctx scratch;
        return probe_loss(ff.forward(x, scratch));
    });
    CAPTURE(result.worst_param);
    CHECK(result.max_rel_err <= kTol);
}

TEST_CASE("full transformer block gradients match finite differences") {
    Rng rng(17);
    TransformerBlock block(8, 2, 12);
    block.init(rng);
    const Tensor x = random_tensor(6, 8, rng);
    const std::vector<bool> mask{true, true, true, true, false, false};

    TransformerBlock::Ctx ctx;
    const Tensor y = block.forward(x, mask, ctx);
    block.backward(probe_grad(y), ctx);

    std::vector<ParamRef> params;
    block.collect(params, "block");
    const auto result = finite_difference_check(params, [&] {
        TransformerBlock::Ctx scratch;
        return probe_loss(block.forward(x, mask, scratch));
    });
    CAPTURE(result.worst_param);
    CAPTURE(result.max_rel_err);
    CHECK(result.max_rel_err <= kTol);
}

TEST_CASE("sinusoidal positional encoding is deterministic and bounded") {
    Tensor a(5, 8), b(5, 8);
    add_positional_encoding(a);
    add_positional_encoding(b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(std::abs(a[i]) <= 1.0);
    }
    CHECK(a(0, 0) == 0.0);  // sin(0)
    CHECK(a(0, 1) == 1.0);  // cos(0)
}
