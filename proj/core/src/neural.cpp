#include "gtd/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtd/errors.hpp"

namespace gtd {

namespace {

Tensor reverse_rows(const Tensor& x) {
    Tensor out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* src = x.row(x.rows() - 1 - r);
        double* dst = out.row(r);
        for (std::size_t c = 0; c < x.cols(); ++c) dst[c] = src[c];
    }
    return out;
}

// Max over valid rows per column; first maximum wins.
Tensor masked_max_pool(const Tensor& x, const std::vector<bool>& mask,
                       std::vector<std::size_t>& argmax) {
    Tensor pooled(1, x.cols());
    argmax.assign(x.cols(), 0);
    for (std::size_t c = 0; c < x.cols(); ++c) {
        bool first = true;
        for (std::size_t t = 0; t < x.rows(); ++t) {
            if (!mask[t]) continue;
            if (first || x(t, c) > pooled(0, c)) {
                pooled(0, c) = x(t, c);
                argmax[c] = t;
                first = false;
            }
        }
    }
    return pooled;
}

void zero_masked_rows(Tensor& x, const std::vector<bool>& mask) {
    for (std::size_t t = 0; t < x.rows(); ++t) {
        if (mask[t]) continue;
        double* row = x.row(t);
        for (std::size_t c = 0; c < x.cols(); ++c) row[c] = 0.0;
    }
}

} // namespace

AdamOptimizer::AdamOptimizer(std::vector<nn::ParamRef> params, double lr)
    : params_(std::move(params)), lr_(lr) {
    slots_.reserve(params_.size());
    for (const auto& p : params_)
        slots_.push_back({Tensor(p.value->rows(), p.value->cols()),
                          Tensor(p.value->rows(), p.value->cols())});
}

void AdamOptimizer::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
        auto& p = params_[k];
        auto& [m, v] = slots_[k];
        for (std::size_t i = p.frozen_prefix; i < p.value->size(); ++i) {
            const double g = (*p.grad)[i];
            m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g;
            v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            (*p.value)[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
        }
    }
}

ArchitectureVariant parse_architecture(std::string_view name) {
    if (name == "lstm") return ArchitectureVariant::Lstm;
    if (name == "bilstm") return ArchitectureVariant::BiLstm;
    if (name == "lstm_cnn") return ArchitectureVariant::LstmCnn;
    if (name == "bilstm_cnn") return ArchitectureVariant::BiLstmCnn;
    if (name == "transformer") return ArchitectureVariant::Transformer;
    if (name == "transformer_cnn") return ArchitectureVariant::TransformerCnn;
    if (name == "dual_transformer") return ArchitectureVariant::DualTransformerConcat;
    throw ConfigError("unknown architecture \"" + std::string(name) + "\"");
}

std::string_view architecture_name(ArchitectureVariant v) {
    switch (v) {
        case ArchitectureVariant::Lstm: return "lstm";
        case ArchitectureVariant::BiLstm: return "bilstm";
        case ArchitectureVariant::LstmCnn: return "lstm_cnn";
        case ArchitectureVariant::BiLstmCnn: return "bilstm_cnn";
        case ArchitectureVariant::Transformer: return "transformer";
        case ArchitectureVariant::TransformerCnn: return "transformer_cnn";
        default: return "dual_transformer";
    }
}

bool is_recurrent(ArchitectureVariant v) {
    switch (v) {
        case ArchitectureVariant::Lstm:
        case ArchitectureVariant::BiLstm:
        case ArchitectureVariant::LstmCnn:
        case ArchitectureVariant::BiLstmCnn:
            return true;
        default:
            return false;
    }
}

std::size_t default_epochs(ArchitectureVariant v) { return is_recurrent(v) ? 10 : 3; }

std::size_t default_batch_size(ArchitectureVariant v) {
    switch (v) {
        case ArchitectureVariant::Lstm:
        case ArchitectureVariant::LstmCnn:
            return 64;
        case ArchitectureVariant::BiLstm:
        case ArchitectureVariant::BiLstmCnn:
            return 128;
        default:
            return 16;
    }
}

void NeuralConfig::validate(ArchitectureVariant v) const {
    if (vocab_size < 2) throw ConfigError("neural vocab_size must be at least 2");
    if (embed_dim == 0 || max_seq_len == 0)
        throw ConfigError("embed_dim and max_seq_len must be positive");
    if (!is_recurrent(v) && v != ArchitectureVariant::Lstm) {
        if (transformer.heads == 0 || embed_dim % transformer.heads != 0)
            throw ConfigError("embed_dim must be divisible by transformer heads");
        if (transformer.layers == 0)
            throw ConfigError("transformer needs at least one layer");
    }
    const bool uses_cnn = v == ArchitectureVariant::LstmCnn ||
                          v == ArchitectureVariant::BiLstmCnn ||
                          v == ArchitectureVariant::TransformerCnn;
    if (uses_cnn) {
        if (cnn.kernel_widths.empty() || cnn.filters_per_width == 0)
            throw ConfigError("CNN needs kernel widths and filters");
        for (const std::size_t w : cnn.kernel_widths)
            if (w == 0 || w >= max_seq_len)
                throw ConfigError("CNN kernel widths must be in [1, max_seq_len)");
    }
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
}

std::vector<std::uint32_t> tokens_to_ids(const TokenSequence& tokens,
                                         const Vocabulary& vocab,
                                         std::size_t max_seq_len) {
    std::vector<std::uint32_t> ids(max_seq_len, 0);
    const std::size_t n = std::min(tokens.size(), max_seq_len);
    for (std::size_t t = 0; t < n; ++t) {
        const auto idx = vocab.lookup(tokens[t]);
        ids[t] = idx < 0 ? 1u : static_cast<std::uint32_t>(idx) + 2u;
    }
    return ids;
}

TextClassifierNet::TextClassifierNet(ArchitectureVariant variant, const NeuralConfig& cfg)
    : variant_(variant), cfg_(cfg) {
    cfg_.validate(variant);
    const std::size_t d = cfg_.embed_dim;
    const std::size_t h = cfg_.lstm_hidden;
    const std::size_t n_towers =
        variant == ArchitectureVariant::DualTransformerConcat ? 2 : 1;

    const std::size_t n_embeds =
        variant == ArchitectureVariant::DualTransformerConcat ? 2 : 1;
    embeds_.reserve(n_embeds);
    for (std::size_t i = 0; i < n_embeds; ++i) embeds_.emplace_back(cfg_.vocab_size, d);

    switch (variant) {
        case ArchitectureVariant::Lstm:
            lstms_.emplace_back(d, h);
            head_.emplace(h, 1);
            break;
        case ArchitectureVariant::BiLstm:
            lstms_.emplace_back(d, h);
            lstms_.emplace_back(d, h);
            head_.emplace(2 * h, 1);
            break;
        case ArchitectureVariant::LstmCnn:
            lstms_.emplace_back(d, h);
            conv_.emplace(cfg_.cnn.kernel_widths, cfg_.cnn.filters_per_width, h);
            head_.emplace(conv_->out_dim(), 1);
            break;
        case ArchitectureVariant::BiLstmCnn:
            lstms_.emplace_back(d, h);
            lstms_.emplace_back(d, h);
            conv_.emplace(cfg_.cnn.kernel_widths, cfg_.cnn.filters_per_width, 2 * h);
            head_.emplace(conv_->out_dim(), 1);
            break;
        case ArchitectureVariant::Transformer:
            head_.emplace(d, 1);
            break;
        case ArchitectureVariant::TransformerCnn:
            conv_.emplace(cfg_.cnn.kernel_widths, cfg_.cnn.filters_per_width, d);
            head_.emplace(conv_->out_dim(), 1);
            break;
        case ArchitectureVariant::DualTransformerConcat:
            head_.emplace(2 * d, 1);
            break;
    }
    if (variant == ArchitectureVariant::Transformer ||
        variant == ArchitectureVariant::TransformerCnn ||
        variant == ArchitectureVariant::DualTransformerConcat) {
        for (std::size_t tw = 0; tw < n_towers; ++tw) {
            std::vector<nn::TransformerBlock> blocks;
            for (std::size_t l = 0; l < cfg_.transformer.layers; ++l)
                blocks.emplace_back(d, cfg_.transformer.heads, cfg_.transformer.ff_dim);
            towers_.push_back(std::move(blocks));
        }
    }
}

void TextClassifierNet::init_params(std::uint64_t seed) {
    Rng rng(seed);
    for (auto& e : embeds_) e.init(rng);
    for (auto& l : lstms_) l.init(rng);
    for (auto& tower : towers_)
        for (auto& block : tower) block.init(rng);
    if (conv_) conv_->init(rng);
    head_->init(rng);
}

double TextClassifierNet::forward(std::span<const std::uint32_t> ids,
                                  Cache& cache) const {
    const std::size_t L = cfg_.max_seq_len;
    if (ids.size() != L) throw DataError("id sequence length must equal max_seq_len");

    cache.mask.assign(L, false);
    bool any_valid = false;
    for (std::size_t t = 0; t < L; ++t) {
        cache.mask[t] = ids[t] != 0;
        any_valid = any_valid || cache.mask[t];
    }
    if (!any_valid) cache.mask[0] = true;  // empty doc: keep one position live

    cache.embed.assign(embeds_.size(), {});
    cache.lstm.assign(lstms_.size(), {});
    cache.towers.assign(towers_.size(), {});
    cache.tower_out.assign(towers_.size(), {});
    cache.pool_argmax.assign(towers_.size(), {});

    Tensor head_in;
    switch (variant_) {
        case ArchitectureVariant::Lstm: {
            const Tensor x = embeds_[0].forward(ids, cache.embed[0]);
            const Tensor h = lstms_[0].forward(x, cache.lstm[0]);
            head_in = Tensor(1, h.cols());
            for (std::size_t c = 0; c < h.cols(); ++c) head_in(0, c) = h(L - 1, c);
            break;
        }
        case ArchitectureVariant::BiLstm: {
            const Tensor x = embeds_[0].forward(ids, cache.embed[0]);
            const Tensor hf = lstms_[0].forward(x, cache.lstm[0]);
            const Tensor hb = lstms_[1].forward(reverse_rows(x), cache.lstm[1]);
            head_in = Tensor(1, hf.cols() + hb.cols());
            for (std::size_t c = 0; c < hf.cols(); ++c) head_in(0, c) = hf(L - 1, c);
            for (std::size_t c = 0; c < hb.cols(); ++c)
                head_in(0, hf.cols() + c) = hb(L - 1, c);
            break;
        }
        case ArchitectureVariant::LstmCnn: {
            const Tensor x = embeds_[0].forward(ids, cache.embed[0]);
            const Tensor h = lstms_[0].forward(x, cache.lstm[0]);
            head_in = conv_->forward(h, cache.conv);
            break;
        }
        case ArchitectureVariant::BiLstmCnn: {
            const Tensor x = embeds_[0].forward(ids, cache.embed[0]);
            const Tensor hf = lstms_[0].forward(x, cache.lstm[0]);
            const Tensor hb = lstms_[1].forward(reverse_rows(x), cache.lstm[1]);
            const std::size_t hdim = hf.cols();
            Tensor states(L, 2 * hdim);
            for (std::size_t t = 0; t < L; ++t) {
                for (std::size_t c = 0; c < hdim; ++c) {
                    states(t, c) = hf(t, c);
                    states(t, hdim + c) = hb(L - 1 - t, c);
                }
            }
            head_in = conv_->forward(states, cache.conv);
            break;
        }
        case ArchitectureVariant::Transformer: {
            Tensor x = embeds_[0].forward(ids, cache.embed[0]);
            nn::add_positional_encoding(x);
            cache.towers[0].resize(towers_[0].size());
            for (std::size_t l = 0; l < towers_[0].size(); ++l)
                x = towers_[0][l].forward(x, cache.mask, cache.towers[0][l]);
            cache.tower_out[0] = x;
            head_in = masked_max_pool(x, cache.mask, cache.pool_argmax[0]);
            break;
        }
        case ArchitectureVariant::TransformerCnn: {
            Tensor x = embeds_[0].forward(ids, cache.embed[0]);
            nn::add_positional_encoding(x);
            cache.towers[0].resize(towers_[0].size());
            for (std::size_t l = 0; l < towers_[0].size(); ++l)
                x = towers_[0][l].forward(x, cache.mask, cache.towers[0][l]);
            cache.tower_out[0] = x;
            Tensor masked = x;
            zero_masked_rows(masked, cache.mask);
            head_in = conv_->forward(masked, cache.conv);
            break;
        }
        case ArchitectureVariant::DualTransformerConcat: {
            const std::size_t d = cfg_.embed_dim;
            head_in = Tensor(1, 2 * d);
            for (std::size_t tw = 0; tw < 2; ++tw) {
                Tensor x = embeds_[tw].forward(ids, cache.embed[tw]);
                nn::add_positional_encoding(x);
                cache.towers[tw].resize(towers_[tw].size());
                for (std::size_t l = 0; l < towers_[tw].size(); ++l)
                    x = towers_[tw][l].forward(x, cache.mask, cache.towers[tw][l]);
                cache.tower_out[tw] = x;
                const Tensor pooled =
                    masked_max_pool(x, cache.mask, cache.pool_argmax[tw]);
                for (std::size_t c = 0; c < d; ++c) head_in(0, tw * d + c) = pooled(0, c);
            }
            break;
        }
    }
    const Tensor z = head_->forward(head_in, cache.head);
    return z(0, 0);
}

void TextClassifierNet::backward(double dlogit, const Cache& cache) {
    const std::size_t L = cfg_.max_seq_len;
    Tensor dz(1, 1);
    dz(0, 0) = dlogit;
    const Tensor dhead_in = head_->backward(dz, cache.head);

    auto tower_backward = [&](std::size_t tw, const Tensor& dtower_out) {
        Tensor dx = dtower_out;
        for (std::size_t l = towers_[tw].size(); l-- > 0;)
            dx = towers_[tw][l].backward(dx, cache.towers[tw][l]);
        embeds_[tw].backward(dx, cache.embed[tw]);
    };

    switch (variant_) {
        case ArchitectureVariant::Lstm: {
            Tensor dh(L, lstms_[0].hidden());
            for (std::size_t c = 0; c < dh.cols(); ++c) dh(L - 1, c) = dhead_in(0, c);
            const Tensor dx = lstms_[0].backward(dh, cache.lstm[0]);
            embeds_[0].backward(dx, cache.embed[0]);
            break;
        }
        case ArchitectureVariant::BiLstm: {
            const std::size_t h = lstms_[0].hidden();
            Tensor dhf(L, h), dhb(L, h);
            for (std::size_t c = 0; c < h; ++c) {
                dhf(L - 1, c) = dhead_in(0, c);
                dhb(L - 1, c) = dhead_in(0, h + c);
            }
            Tensor dx = lstms_[0].backward(dhf, cache.lstm[0]);
            const Tensor dx_rev = lstms_[1].backward(dhb, cache.lstm[1]);
            const Tensor dx_b = reverse_rows(dx_rev);
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dx_b[i];
            embeds_[0].backward(dx, cache.embed[0]);
            break;
        }
        case ArchitectureVariant::LstmCnn: {
            const Tensor dh = conv_->backward(dhead_in, cache.conv);
            const Tensor dx = lstms_[0].backward(dh, cache.lstm[0]);
            embeds_[0].backward(dx, cache.embed[0]);
            break;
        }
        case ArchitectureVariant::BiLstmCnn: {
            const std::size_t h = lstms_[0].hidden();
            const Tensor dstates = conv_->backward(dhead_in, cache.conv);
            Tensor dhf(L, h), dhb(L, h);
            for (std::size_t t = 0; t < L; ++t) {
                for (std::size_t c = 0; c < h; ++c) {
                    dhf(t, c) = dstates(t, c);
                    dhb(L - 1 - t, c) = dstates(t, h + c);
                }
            }
            Tensor dx = lstms_[0].backward(dhf, cache.lstm[0]);
            const Tensor dx_b = reverse_rows(lstms_[1].backward(dhb, cache.lstm[1]));
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dx_b[i];
            embeds_[0].backward(dx, cache.embed[0]);
            break;
        }
        case ArchitectureVariant::Transformer: {
            Tensor dtower(L, cfg_.embed_dim);
            for (std::size_t c = 0; c < cfg_.embed_dim; ++c)
                dtower(cache.pool_argmax[0][c], c) += dhead_in(0, c);
            tower_backward(0, dtower);
            break;
        }
        case ArchitectureVariant::TransformerCnn: {
            Tensor dmasked = conv_->backward(dhead_in, cache.conv);
            zero_masked_rows(dmasked, cache.mask);
            tower_backward(0, dmasked);
            break;
        }
        case ArchitectureVariant::DualTransformerConcat: {
            const std::size_t d = cfg_.embed_dim;
            for (std::size_t tw = 0; tw < 2; ++tw) {
                Tensor dtower(L, d);
                for (std::size_t c = 0; c < d; ++c)
                    dtower(cache.pool_argmax[tw][c], c) += dhead_in(0, tw * d + c);
                tower_backward(tw, dtower);
            }
            break;
        }
    }
}

double TextClassifierNet::predict_logit(std::span<const std::uint32_t> ids) const {
    Cache scratch;
    return forward(ids, scratch);
}

std::vector<nn::ParamRef> TextClassifierNet::params() {
    std::vector<nn::ParamRef> out;
    for (std::size_t i = 0; i < embeds_.size(); ++i)
        embeds_[i].collect(out, embeds_.size() > 1 ? "embed" + std::to_string(i) : "embed");
    for (std::size_t i = 0; i < lstms_.size(); ++i)
        lstms_[i].collect(out, i == 0 ? "lstm.fwd" : "lstm.bwd");
    for (std::size_t tw = 0; tw < towers_.size(); ++tw) {
        const std::string tower_tag =
            towers_.size() > 1 ? "tower" + std::to_string(tw) : "tower";
        for (std::size_t l = 0; l < towers_[tw].size(); ++l)
            towers_[tw][l].collect(out, tower_tag + ".block" + std::to_string(l));
    }
    if (conv_) conv_->collect(out, "cnn");
    head_->collect(out, "head");
    return out;
}

void TextClassifierNet::zero_grads() {
    for (auto& p : params()) p.grad->zero();
}

void TextClassifierNet::save(NamedTensorMap& out, const std::string& prefix) const {
    auto* self = const_cast<TextClassifierNet*>(this);
    for (const auto& p : self->params()) {
        out[prefix + p.name] = {{p.value->rows(), p.value->cols()}, p.value->data()};
    }
}

void TextClassifierNet::load(const NamedTensorMap& in, const std::string& prefix) {
    for (auto& p : params()) {
        const auto it = in.find(prefix + p.name);
        if (it == in.end())
            throw ModelError("model file is missing parameter \"" + prefix + p.name + "\"");
        if (it->second.data.size() != p.value->size())
            throw ModelError("parameter \"" + prefix + p.name + "\" has wrong size");
        p.value->data() = it->second.data;
    }
}

double bce_loss(double p, double y) {
    constexpr double kTiny = 1e-300;
    return -(y * std::log(std::max(p, kTiny)) +
             (1.0 - y) * std::log(std::max(1.0 - p, kTiny)));
}

double bce_loss_from_logit(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

TrainResult train_classifier(TextClassifierNet& net,
                             std::span<const std::vector<std::uint32_t>> ids,
                             std::span<const Label> labels, std::size_t epochs,
                             std::size_t batch_size, double learning_rate,
                             std::uint64_t seed) {
    if (ids.size() != labels.size())
        throw TrainError("ids and labels must have equal lengths");
    if (ids.empty()) throw TrainError("cannot train on an empty set");
    if (batch_size == 0) throw TrainError("batch_size must be positive");

    AdamOptimizer adam(net.params(), learning_rate);
    net.zero_grads();

    const std::size_t n = ids.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);

    TrainResult result;
    TextClassifierNet::Cache cache;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += batch_size, ++batch_index) {
            const std::size_t end = std::min(start + batch_size, n);
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t d = order[k];
                const double y = labels[d] == Label::Generated ? 1.0 : 0.0;
                const double z = net.forward(ids[d], cache);
                batch_loss += bce_loss_from_logit(z, y);
                const double p = logistic(z);
                net.backward((p - y) * inv_batch, cache);
            }
            if (!std::isfinite(batch_loss))
                throw TrainError("non-finite loss in epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(batch_index));
            adam.step();
            net.zero_grads();
            epoch_loss += batch_loss;
        }
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    }
    return result;
}

Prediction neural_predict(const TextClassifierNet& net,
                          std::span<const std::uint32_t> ids) {
    const double p = logistic(net.predict_logit(ids));
    return {p > 0.5 ? Label::Generated : Label::Human, p};
}

} // namespace gtd
