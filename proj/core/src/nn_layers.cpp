#include "gtd/nn_layers.hpp"

#include <cmath>
#include <limits>

#include "gtd/errors.hpp"

namespace gtd::nn {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// db += column sums of dy.
void add_col_sums(const Tensor& dy, Tensor& db) {
    for (std::size_t r = 0; r < dy.rows(); ++r) {
        const double* row = dy.row(r);
        double* out = db.row(0);
        for (std::size_t c = 0; c < dy.cols(); ++c) out[c] += row[c];
    }
}

void add_row_bias(Tensor& x, const Tensor& b) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double* row = x.row(r);
        const double* bias = b.row(0);
        for (std::size_t c = 0; c < x.cols(); ++c) row[c] += bias[c];
    }
}

} // namespace

void glorot_init(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
}

// ---------------------------------------------------------------- Dense

Tensor Dense::forward(const Tensor& x, Ctx& ctx) const {
    ctx.x = x;
    Tensor y(1, W_.value.cols());
    matmul(x, W_.value, y);
    add_row_bias(y, b_.value);
    return y;
}

Tensor Dense::backward(const Tensor& dy, const Ctx& ctx) {
    matmul_at(ctx.x, dy, W_.grad, /*accumulate=*/true);
    add_col_sums(dy, b_.grad);
    Tensor dx(1, W_.value.rows());
    matmul_bt(dy, W_.value, dx);
    return dx;
}

void Dense::collect(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".W", &W_.value, &W_.grad, 0});
    out.push_back({prefix + ".b", &b_.value, &b_.grad, 0});
}

// ------------------------------------------------------------ Embedding

void Embedding::init(Rng& rng) {
    glorot_init(E_.value, E_.value.rows(), E_.value.cols(), rng);
    for (std::size_t c = 0; c < E_.value.cols(); ++c) E_.value(0, c) = 0.0;  // pad row
}

Tensor Embedding::forward(std::span<const std::uint32_t> ids, Ctx& ctx) const {
    ctx.ids.assign(ids.begin(), ids.end());
    Tensor x(ids.size(), E_.value.cols());
    for (std::size_t t = 0; t < ids.size(); ++t) {
        if (ids[t] >= E_.value.rows())
            throw DataError("token id " + std::to_string(ids[t]) +
                            " outside embedding table of size " +
                            std::to_string(E_.value.rows()));
        const double* src = E_.value.row(ids[t]);
        double* dst = x.row(t);
        for (std::size_t c = 0; c < x.cols(); ++c) dst[c] = src[c];
    }
    return x;
}

void Embedding::backward(const Tensor& dx, const Ctx& ctx) {
    for (std::size_t t = 0; t < ctx.ids.size(); ++t) {
        const std::uint32_t id = ctx.ids[t];
        if (id == 0) continue;  // pad row stays frozen
        const double* src = dx.row(t);
        double* dst = E_.grad.row(id);
        for (std::size_t c = 0; c < dx.cols(); ++c) dst[c] += src[c];
    }
}

void Embedding::collect(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".E", &E_.value, &E_.grad, E_.value.cols()});
}

// ----------------------------------------------------------------- Lstm

void Lstm::init(Rng& rng) {
    glorot_init(Wx_.value, Wx_.value.rows(), Wx_.value.cols(), rng);
    glorot_init(Wh_.value, Wh_.value.rows(), Wh_.value.cols(), rng);
}

Tensor Lstm::forward(const Tensor& x, Ctx& ctx) const {
    const std::size_t L = x.rows();
    const std::size_t h = hidden_;
    ctx.x = x;
    ctx.gates = Tensor(L, 4 * h);
    ctx.c = Tensor(L, h);
    ctx.h = Tensor(L, h);

    Tensor pre(1, 4 * h);
    Tensor x_row(1, x.cols());
    Tensor h_prev(1, h);
    for (std::size_t t = 0; t < L; ++t) {
        for (std::size_t c = 0; c < x.cols(); ++c) x_row(0, c) = x(t, c);
        matmul(x_row, Wx_.value, pre);
        if (t > 0) {
            for (std::size_t c = 0; c < h; ++c) h_prev(0, c) = ctx.h(t - 1, c);
            matmul(h_prev, Wh_.value, pre, /*accumulate=*/true);
        }
        add_row_bias(pre, b_.value);

        double* gates = ctx.gates.row(t);
        for (std::size_t j = 0; j < h; ++j) {
            const double gi = sigmoid(pre(0, j));
            const double gf = sigmoid(pre(0, h + j));
            const double gg = std::tanh(pre(0, 2 * h + j));
            const double go = sigmoid(pre(0, 3 * h + j));
            gates[j] = gi;
            gates[h + j] = gf;
            gates[2 * h + j] = gg;
            gates[3 * h + j] = go;
            const double c_prev = t > 0 ? ctx.c(t - 1, j) : 0.0;
            const double c_t = gf * c_prev + gi * gg;
            ctx.c(t, j) = c_t;
            ctx.h(t, j) = go * std::tanh(c_t);
        }
    }
    return ctx.h;
}

Tensor Lstm::backward(const Tensor& dh_out, const Ctx& ctx) {
    const std::size_t L = ctx.x.rows();
    const std::size_t h = hidden_;
    Tensor dx(L, ctx.x.cols());
    std::vector<double> dh_rec(h, 0.0), dc_rec(h, 0.0);
    Tensor da(1, 4 * h);
    Tensor x_row(1, ctx.x.cols());
    Tensor h_prev(1, h);
    Tensor dx_row(1, ctx.x.cols());
    Tensor dh_prev(1, h);

    for (std::size_t ti = L; ti-- > 0;) {
        const double* gates = ctx.gates.row(ti);
        for (std::size_t j = 0; j < h; ++j) {
            const double gi = gates[j];
            const double gf = gates[h + j];
            const double gg = gates[2 * h + j];
            const double go = gates[3 * h + j];
            const double c_t = ctx.c(ti, j);
            const double tanh_c = std::tanh(c_t);
            const double c_prev = ti > 0 ? ctx.c(ti - 1, j) : 0.0;

            const double dh = dh_out(ti, j) + dh_rec[j];
            const double dc = dh * go * (1.0 - tanh_c * tanh_c) + dc_rec[j];

            da(0, j) = dc * gg * gi * (1.0 - gi);               // input gate
            da(0, h + j) = dc * c_prev * gf * (1.0 - gf);       // forget gate
            da(0, 2 * h + j) = dc * gi * (1.0 - gg * gg);       // candidate
            da(0, 3 * h + j) = dh * tanh_c * go * (1.0 - go);   // output gate
            dc_rec[j] = dc * gf;
        }

        for (std::size_t c = 0; c < ctx.x.cols(); ++c) x_row(0, c) = ctx.x(ti, c);
        matmul_at(x_row, da, Wx_.grad, /*accumulate=*/true);
        if (ti > 0) {
            for (std::size_t c = 0; c < h; ++c) h_prev(0, c) = ctx.h(ti - 1, c);
            matmul_at(h_prev, da, Wh_.grad, /*accumulate=*/true);
        }
        add_col_sums(da, b_.grad);

        matmul_bt(da, Wx_.value, dx_row);
        for (std::size_t c = 0; c < ctx.x.cols(); ++c) dx(ti, c) = dx_row(0, c);
        matmul_bt(da, Wh_.value, dh_prev);
        for (std::size_t c = 0; c < h; ++c) dh_rec[c] = dh_prev(0, c);
    }
    return dx;
}

void Lstm::collect(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".Wx", &Wx_.value, &Wx_.grad, 0});
    out.push_back({prefix + ".Wh", &Wh_.value, &Wh_.grad, 0});
    out.push_back({prefix + ".b", &b_.value, &b_.grad, 0});
}

// ------------------------------------------------------------- ConvBank

ConvBank::ConvBank(std::vector<std::size_t> widths, std::size_t filters,
                   std::size_t in_dim)
    : widths_(std::move(widths)), filters_(filters), in_dim_(in_dim) {
    for (const std::size_t w : widths_) {
        kernels_.emplace_back(w * in_dim_, filters_);
        biases_.emplace_back(1, filters_);
    }
}

void ConvBank::init(Rng& rng) {
    for (auto& k : kernels_) glorot_init(k.value, k.value.rows(), filters_, rng);
}

Tensor ConvBank::forward(const Tensor& x, Ctx& ctx) const {
    const std::size_t L = x.rows();
    ctx.x = x;
    ctx.preact.clear();
    ctx.argmax.clear();
    Tensor out(1, out_dim());

    for (std::size_t wi = 0; wi < widths_.size(); ++wi) {
        const std::size_t w = widths_[wi];
        if (w > L) throw TrainError("convolution width exceeds sequence length");
        const std::size_t n_windows = L - w + 1;
        const Tensor& kernel = kernels_[wi].value;
        Tensor pre(n_windows, filters_);
        for (std::size_t s = 0; s < n_windows; ++s) {
            double* pre_row = pre.row(s);
            for (std::size_t f = 0; f < filters_; ++f) pre_row[f] = biases_[wi].value(0, f);
            for (std::size_t j = 0; j < w; ++j) {
                const double* x_row = x.row(s + j);
                for (std::size_t c = 0; c < in_dim_; ++c) {
                    const double xv = x_row[c];
                    if (xv == 0.0) continue;
                    const double* k_row = kernel.row(j * in_dim_ + c);
                    for (std::size_t f = 0; f < filters_; ++f) pre_row[f] += xv * k_row[f];
                }
            }
        }
        // ReLU + global max pool; first maximum wins ties.
        std::vector<std::size_t> arg(filters_, 0);
        for (std::size_t f = 0; f < filters_; ++f) {
            double best = std::max(0.0, pre(0, f));
            for (std::size_t s = 1; s < n_windows; ++s) {
                const double v = std::max(0.0, pre(s, f));
                if (v > best) {
                    best = v;
                    arg[f] = s;
                }
            }
            out(0, wi * filters_ + f) = best;
        }
        ctx.preact.push_back(std::move(pre));
        ctx.argmax.push_back(std::move(arg));
    }
    return out;
}

Tensor ConvBank::backward(const Tensor& dout, const Ctx& ctx) {
    Tensor dx(ctx.x.rows(), in_dim_);
    for (std::size_t wi = 0; wi < widths_.size(); ++wi) {
        const std::size_t w = widths_[wi];
        const Tensor& kernel = kernels_[wi].value;
        Tensor& dkernel = kernels_[wi].grad;
        for (std::size_t f = 0; f < filters_; ++f) {
            const std::size_t s = ctx.argmax[wi][f];
            if (ctx.preact[wi](s, f) <= 0.0) continue;  // ReLU inactive
            const double g = dout(0, wi * filters_ + f);
            if (g == 0.0) continue;
            biases_[wi].grad(0, f) += g;
            for (std::size_t j = 0; j < w; ++j) {
                const double* x_row = ctx.x.row(s + j);
                double* dx_row = dx.row(s + j);
                for (std::size_t c = 0; c < in_dim_; ++c) {
                    dkernel(j * in_dim_ + c, f) += x_row[c] * g;
                    dx_row[c] += kernel(j * in_dim_ + c, f) * g;
                }
            }
        }
    }
    return dx;
}

void ConvBank::collect(std::vector<ParamRef>& out, const std::string& prefix) {
    for (std::size_t wi = 0; wi < widths_.size(); ++wi) {
        const std::string tag = prefix + ".w" + std::to_string(widths_[wi]);
        out.push_back({tag + ".K", &kernels_[wi].value, &kernels_[wi].grad, 0});
        out.push_back({tag + ".b", &biases_[wi].value, &biases_[wi].grad, 0});
    }
}

// ------------------------------------------------------------ LayerNorm

Tensor LayerNorm::forward(const Tensor& x, Ctx& ctx) const {
    const std::size_t d = x.cols();
    ctx.xhat = Tensor(x.rows(), d);
    ctx.inv_std.assign(x.rows(), 0.0);
    Tensor y(x.rows(), d);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* xr = x.row(r);
        double mean = 0.0;
        for (std::size_t c = 0; c < d; ++c) mean += xr[c];
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = xr[c] - mean;
            var += diff * diff;
        }
        var /= static_cast<double>(d);
        const double inv_std = 1.0 / std::sqrt(var + kEps);
        ctx.inv_std[r] = inv_std;
        for (std::size_t c = 0; c < d; ++c) {
            const double xhat = (xr[c] - mean) * inv_std;
            ctx.xhat(r, c) = xhat;
            y(r, c) = gamma_.value(0, c) * xhat + beta_.value(0, c);
        }
    }
    return y;
}

Tensor LayerNorm::backward(const Tensor& dy, const Ctx& ctx) {
    const std::size_t d = dy.cols();
    Tensor dx(dy.rows(), d);
    for (std::size_t r = 0; r < dy.rows(); ++r) {
        double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double dyv = dy(r, c);
            const double xhat = ctx.xhat(r, c);
            gamma_.grad(0, c) += dyv * xhat;
            beta_.grad(0, c) += dyv;
            const double dxhat = dyv * gamma_.value(0, c);
            mean_dxhat += dxhat;
            mean_dxhat_xhat += dxhat * xhat;
        }
        mean_dxhat /= static_cast<double>(d);
        mean_dxhat_xhat /= static_cast<double>(d);
        for (std::size_t c = 0; c < d; ++c) {
            const double dxhat = dy(r, c) * gamma_.value(0, c);
            dx(r, c) = ctx.inv_std[r] *
                       (dxhat - mean_dxhat - ctx.xhat(r, c) * mean_dxhat_xhat);
        }
    }
    return dx;
}

void LayerNorm::collect(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".gamma", &gamma_.value, &gamma_.grad, 0});
    out.push_back({prefix + ".beta", &beta_.value, &beta_.grad, 0});
}

// -------------------------------------------------- MultiHeadAttention

MultiHeadAttention::MultiHeadAttention(std::size_t dim, std::size_t heads)
    : dim_(dim), heads_(heads), head_dim_(dim / heads), wq_(dim, dim), wk_(dim, dim),
      wv_(dim, dim), wo_(dim, dim), bq_(1, dim), bk_(1, dim), bv_(1, dim),
      bo_(1, dim) {
    if (heads == 0 || dim % heads != 0)
        throw ConfigError("embedding dim must be divisible by the head count");
}

void MultiHeadAttention::init(Rng& rng) {
    glorot_init(wq_.value, dim_, dim_, rng);
    glorot_init(wk_.value, dim_, dim_, rng);
    glorot_init(wv_.value, dim_, dim_, rng);
    glorot_init(wo_.value, dim_, dim_, rng);
}

Tensor MultiHeadAttention::forward(const Tensor& x, const std::vector<bool>& mask,
                                   Ctx& ctx) const {
    const std::size_t L = x.rows();
    ctx.x = x;
    ctx.mask = mask;
    ctx.q = Tensor(L, dim_);
    ctx.k = Tensor(L, dim_);
    ctx.v = Tensor(L, dim_);
    matmul(x, wq_.value, ctx.q);
    add_row_bias(ctx.q, bq_.value);
    matmul(x, wk_.value, ctx.k);
    add_row_bias(ctx.k, bk_.value);
    matmul(x, wv_.value, ctx.v);
    add_row_bias(ctx.v, bv_.value);

    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim_));
    ctx.attn.assign(heads_, Tensor(L, L));
    ctx.concat = Tensor(L, dim_);
    for (std::size_t hd = 0; hd < heads_; ++hd) {
        const std::size_t off = hd * head_dim_;
        Tensor& attn = ctx.attn[hd];
        for (std::size_t i = 0; i < L; ++i) {
            double max_score = -std::numeric_limits<double>::infinity();
            std::vector<double> scores(L, 0.0);
            for (std::size_t j = 0; j < L; ++j) {
                if (!mask[j]) continue;
                double s = 0.0;
                for (std::size_t p = 0; p < head_dim_; ++p)
                    s += ctx.q(i, off + p) * ctx.k(j, off + p);
                s *= scale;
                scores[j] = s;
                max_score = std::max(max_score, s);
            }
            double z = 0.0;
            for (std::size_t j = 0; j < L; ++j) {
                if (!mask[j]) continue;
                const double e = std::exp(scores[j] - max_score);
                attn(i, j) = e;
                z += e;
            }
            for (std::size_t j = 0; j < L; ++j)
                if (mask[j]) attn(i, j) /= z;
            for (std::size_t p = 0; p < head_dim_; ++p) {
                double s = 0.0;
                for (std::size_t j = 0; j < L; ++j)
                    if (mask[j]) s += attn(i, j) * ctx.v(j, off + p);
                ctx.concat(i, off + p) = s;
            }
        }
    }

    Tensor y(L, dim_);
    matmul(ctx.concat, wo_.value, y);
    add_row_bias(y, bo_.value);
    return y;
}

Tensor MultiHeadAttention::backward(const Tensor& dy, const Ctx& ctx) {
    const std::size_t L = dy.rows();
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim_));

    matmul_at(ctx.concat, dy, wo_.grad, /*accumulate=*/true);
    add_col_sums(dy, bo_.grad);
    Tensor dconcat(L, dim_);
    matmul_bt(dy, wo_.value, dconcat);

    Tensor dq(L, dim_), dk(L, dim_), dv(L, dim_);
    for (std::size_t hd = 0; hd < heads_; ++hd) {
        const std::size_t off = hd * head_dim_;
        const Tensor& attn = ctx.attn[hd];
        std::vector<double> dattn(L, 0.0), dscores(L, 0.0);
        for (std::size_t i = 0; i < L; ++i) {
            // dattn(i, :) and dV accumulation over this query row.
            double dot = 0.0;
            for (std::size_t j = 0; j < L; ++j) {
                if (!ctx.mask[j]) {
                    dattn[j] = 0.0;
                    continue;
                }
                double s = 0.0;
                for (std::size_t p = 0; p < head_dim_; ++p)
                    s += dconcat(i, off + p) * ctx.v(j, off + p);
                dattn[j] = s;
                dot += s * attn(i, j);
                for (std::size_t p = 0; p < head_dim_; ++p)
                    dv(j, off + p) += attn(i, j) * dconcat(i, off + p);
            }
            for (std::size_t j = 0; j < L; ++j) {
                if (!ctx.mask[j]) continue;
                dscores[j] = attn(i, j) * (dattn[j] - dot) * scale;
                for (std::size_t p = 0; p < head_dim_; ++p) {
                    dq(i, off + p) += dscores[j] * ctx.k(j, off + p);
                    dk(j, off + p) += dscores[j] * ctx.q(i, off + p);
                }
            }
        }
    }

    matmul_at(ctx.x, dq, wq_.grad, /*accumulate=*/true);
    matmul_at(ctx.x, dk, wk_.grad, /*accumulate=*/true);
    matmul_at(ctx.x, dv, wv_.grad, /*accumulate=*/true);
    add_col_sums(dq, bq_.grad);
    add_col_sums(dk, bk_.grad);
    add_col_sums(dv, bv_.grad);

    Tensor dx(L, dim_);
    matmul_bt(dq, wq_.value, dx, /*accumulate=*/true);
    matmul_bt(dk, wk_.value, dx, /*accumulate=*/true);
    matmul_bt(dv, wv_.value, dx, /*accumulate=*/true);
    return dx;
}

void MultiHeadAttention::collect(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".Wq", &wq_.value, &wq_.grad, 0});
    out.push_back({prefix + ".bq", &bq_.value, &bq_.grad, 0});
    out.push_back({prefix + ".Wk", &wk_.value, &wk_.grad, 0});
    out.push_back({prefix + ".bk", &bk_.value, &bk_.grad, 0});
    out.push_back({prefix + ".Wv", &wv_.value, &wv_.grad, 0});
    out.push_back({prefix + ".bv", &bv_.value, &bv_.grad, 0});
    out.push_back({prefix + ".Wo", &wo_.value, &wo_.grad, 0});
    out.push_back({prefix + ".bo", &bo_.value, &bo_.grad, 0});
}

// ---------------------------------------------------------- FeedForward

void FeedForward::init(Rng& rng) {
    glorot_init(W1_.value, W1_.value.rows(), W1_.value.cols(), rng);
    glorot_init(W2_.value, W2_.value.rows(), W2_.value.cols(), rng);
}

Tensor FeedForward::forward(const Tensor& x, Ctx& ctx) const {
    ctx.x = x;
    ctx.pre = Tensor(x.rows(), W1_.value.cols());
    matmul(x, W1_.value, ctx.pre);
    add_row_bias(ctx.pre, b1_.value);
    Tensor h(x.rows(), W1_.value.cols());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::max(0.0, ctx.pre[i]);
    Tensor y(x.rows(), W2_.value.cols());
    matmul(h, W2_.value, y);
    add_row_bias(y, b2_.value);
    return y;
}

Tensor FeedForward::backward(const Tensor& dy, const Ctx& ctx) {
    Tensor h(ctx.pre.rows(), ctx.pre.cols());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::max(0.0, ctx.pre[i]);
    matmul_at(h, dy, W2_.grad, /*accumulate=*/true);
    add_col_sums(dy, b2_.grad);

    Tensor dh(ctx.pre.rows(), ctx.pre.cols());
    matmul_bt(dy, W2_.value, dh);
    for (std::size_t i = 0; i < dh.size(); ++i)
        if (ctx.pre[i] <= 0.0) dh[i] = 0.0;

    matmul_at(ctx.x, dh, W1_.grad, /*accumulate=*/true);
    add_col_sums(dh, b1_.grad);
    Tensor dx(ctx.x.rows(), ctx.x.cols());
    matmul_bt(dh, W1_.value, dx);
    return dx;
}

void FeedForward::collect(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".W1", &W1_.value, &W1_.grad, 0});
    out.push_back({prefix + ".b1", &b1_.value, &b1_.grad, 0});
    out.push_back({prefix + ".W2", &W2_.value, &W2_.grad, 0});
    out.push_back({prefix + ".b2", &b2_.value, &b2_.grad, 0});
}

// ----------------------------------------------------- TransformerBlock

void TransformerBlock::init(Rng& rng) {
    mha_.init(rng);
    ff_.init(rng);
}

Tensor TransformerBlock::forward(const Tensor& x, const std::vector<bool>& mask,
                                 Ctx& ctx) const {
    Tensor a = mha_.forward(x, mask, ctx.mha);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += x[i];  // residual
    Tensor n1 = ln1_.forward(a, ctx.ln1);
    Tensor f = ff_.forward(n1, ctx.ff);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += n1[i];  // residual
    return ln2_.forward(f, ctx.ln2);
}

Tensor TransformerBlock::backward(const Tensor& dy, const Ctx& ctx) {
    Tensor df = ln2_.backward(dy, ctx.ln2);
    Tensor dn1 = ff_.backward(df, ctx.ff);
    for (std::size_t i = 0; i < dn1.size(); ++i) dn1[i] += df[i];
    Tensor da = ln1_.backward(dn1, ctx.ln1);
    Tensor dx = mha_.backward(da, ctx.mha);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += da[i];
    return dx;
}

void TransformerBlock::collect(std::vector<ParamRef>& out, const std::string& prefix) {
    mha_.collect(out, prefix + ".attn");
    ln1_.collect(out, prefix + ".ln1");
    ff_.collect(out, prefix + ".ff");
    ln2_.collect(out, prefix + ".ln2");
}

void add_positional_encoding(Tensor& x) {
    const std::size_t L = x.rows(), d = x.cols();
    for (std::size_t pos = 0; pos < L; ++pos) {
        double* row = x.row(pos);
        for (std::size_t i = 0; 2 * i < d; ++i) {
            const double freq =
                std::pow(10000.0, -2.0 * static_cast<double>(i) / static_cast<double>(d));
            const double angle = static_cast<double>(pos) * freq;
            row[2 * i] += std::sin(angle);
            if (2 * i + 1 < d) row[2 * i + 1] += std::cos(angle);
        }
    }
}

} // namespace gtd::nn
