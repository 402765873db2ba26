#include "gtd/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtd/errors.hpp"
#include "gtd/rng.hpp"

namespace gtd {

namespace {

void check_shapes(std::size_t nx, std::size_t ny, std::size_t nw) {
    if (nx != ny || nx != nw)
        throw TrainError("X, y and sample weights must have equal lengths");
    if (nx == 0) throw TrainError("cannot fit on an empty training set");
}

double dot(const std::vector<double>& w, const FeatureVector& x) {
    double s = 0.0;
    for (const auto& [idx, value] : x.entries) s += w[idx] * value;
    return s;
}

double squared_norm(const FeatureVector& x) {
    double s = 0.0;
    for (const auto& [idx, value] : x.entries) s += value * value;
    return s;
}

double signed_label(Label l) { return l == Label::Generated ? 1.0 : -1.0; }

std::vector<std::size_t> index_range(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

// Sample weights act as relative weights: fits rescale them to mean 1 so
// training is invariant to the overall weight scale (boosting hands in
// weights summing to 1, plain fits hand in all-ones).
std::vector<double> normalized_weights(std::span<const double> w) {
    const double mass = std::accumulate(w.begin(), w.end(), 0.0);
    if (mass <= 0.0) throw TrainError("sample weights must have positive total");
    const double factor = static_cast<double>(w.size()) / mass;
    std::vector<double> out(w.begin(), w.end());
    for (double& wi : out) wi *= factor;
    return out;
}

} // namespace

SampleWeights uniform_weights(std::size_t n) { return SampleWeights(n, 1.0); }

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

NaiveBayesModel nb_fit(std::span<const FeatureVector> X, std::span<const Label> y,
                       std::span<const double> w, double alpha, std::size_t n_features) {
    check_shapes(X.size(), y.size(), w.size());
    if (alpha <= 0.0) throw TrainError("NB smoothing alpha must be positive");

    NaiveBayesModel m;
    m.alpha = alpha;
    const std::vector<double> wn = normalized_weights(w);
    std::array<std::vector<double>, 2> counts{std::vector<double>(n_features, 0.0),
                                              std::vector<double>(n_features, 0.0)};
    std::array<double, 2> class_mass{0.0, 0.0};
    for (std::size_t d = 0; d < X.size(); ++d) {
        const int c = static_cast<int>(y[d]);
        class_mass[c] += wn[d];
        for (const auto& [idx, value] : X[d].entries) counts[c][idx] += wn[d] * value;
    }
    const double total_mass = class_mass[0] + class_mass[1];
    for (int c = 0; c < 2; ++c) {
        if (class_mass[c] <= 0.0)
            throw TrainError(std::string("class \"") +
                             std::string(label_name(static_cast<Label>(c))) +
                             "\" is absent or has zero sample weight");
        m.class_log_prior[c] = std::log(class_mass[c] / total_mass);
        const double count_sum =
            std::accumulate(counts[c].begin(), counts[c].end(), 0.0);
        const double denom = count_sum + alpha * static_cast<double>(n_features);
        auto& flp = m.feature_log_prob[c];
        flp.resize(n_features);
        for (std::size_t i = 0; i < n_features; ++i)
            flp[i] = std::log((counts[c][i] + alpha) / denom);
    }
    return m;
}

Prediction nb_predict(const NaiveBayesModel& m, const FeatureVector& x) {
    std::array<double, 2> joint = {m.class_log_prior[0], m.class_log_prior[1]};
    for (const auto& [idx, value] : x.entries) {
        joint[0] += value * m.feature_log_prob[0][idx];
        joint[1] += value * m.feature_log_prob[1][idx];
    }
    const double hi = std::max(joint[0], joint[1]);
    const double z0 = std::exp(joint[0] - hi);
    const double z1 = std::exp(joint[1] - hi);
    const double score = z1 / (z0 + z1);
    const Label label = joint[1] > joint[0] ? Label::Generated : Label::Human;
    return {label, score};
}

LinearModel pa_fit(std::span<const FeatureVector> X, std::span<const Label> y,
                   std::span<const double> w, double C, std::size_t epochs,
                   std::uint64_t seed, std::size_t n_features) {
    check_shapes(X.size(), y.size(), w.size());
    if (C <= 0.0) throw TrainError("PA aggressiveness C must be positive");

    LinearModel m;
    m.kind = LinearKind::PassiveAggressive;
    m.weights.assign(n_features, 0.0);
    const std::vector<double> wn = normalized_weights(w);

    Rng rng(seed);
    auto order = index_range(X.size());
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (const std::size_t d : order) {
            const double yd = signed_label(y[d]);
            const double margin = yd * (dot(m.weights, X[d]) + m.bias);
            const double loss = std::max(0.0, 1.0 - margin);
            if (loss == 0.0) continue;
            const double tau = std::min(C, wn[d] * loss / (squared_norm(X[d]) + 1.0));
            if (tau == 0.0) continue;
            for (const auto& [idx, value] : X[d].entries)
                m.weights[idx] += tau * yd * value;
            m.bias += tau * yd;
        }
    }
    return m;
}

LinearModel svm_fit(std::span<const FeatureVector> X, std::span<const Label> y,
                    std::span<const double> w, double lambda, std::size_t epochs,
                    std::uint64_t seed, std::size_t n_features) {
    check_shapes(X.size(), y.size(), w.size());
    if (lambda <= 0.0) throw TrainError("SVM regularization lambda must be positive");

    LinearModel m;
    m.kind = LinearKind::Svm;
    m.weights.assign(n_features, 0.0);
    const std::vector<double> wn = normalized_weights(w);

    // w is kept as scale * v so the regularization shrink is O(1) per step.
    std::vector<double> v(n_features, 0.0);
    double scale = 1.0;
    auto materialize = [&] {
        for (std::size_t i = 0; i < n_features; ++i) m.weights[i] = scale * v[i];
    };

    Rng rng(seed);
    auto order = index_range(X.size());
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (const std::size_t d : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double yd = signed_label(y[d]);
            const double margin = yd * (scale * dot(v, X[d]) + m.bias);
            const double shrink = 1.0 - eta * lambda;  // 0 exactly at t == 1
            if (shrink == 0.0) {
                std::fill(v.begin(), v.end(), 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
                if (scale < 1e-100) {  // re-absorb before underflow
                    for (double& vi : v) vi *= scale;
                    scale = 1.0;
                }
            }
            if (margin < 1.0) {
                // Sub-gradient of the weighted mean hinge estimated from one
                // sample carries its normalized weight.
                const double step = eta * wn[d] / scale;
                for (const auto& [idx, value] : X[d].entries)
                    v[idx] += step * yd * value;
                m.bias += eta * wn[d] * yd;
            }
        }
    }
    materialize();
    return m;
}

Prediction linear_predict(const LinearModel& m, const FeatureVector& x) {
    const double margin = dot(m.weights, x) + m.bias;
    const Label label = margin > 0.0 ? Label::Generated : Label::Human;
    return {label, logistic(margin)};
}

} // namespace gtd
