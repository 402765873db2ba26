#include "gtd/ensemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gtd/errors.hpp"
#include "gtd/rng.hpp"

namespace gtd {

namespace {

class NbClassifier final : public BaseClassifier {
public:
    NbClassifier(double alpha, std::size_t n_features)
        : alpha_(alpha), n_features_(n_features) {}

    void fit(std::span<const FeatureVector> X, std::span<const Label> y,
             std::span<const double> w) override {
        model_ = nb_fit(X, y, w, alpha_, n_features_);
    }
    Prediction predict(const FeatureVector& x) const override {
        return nb_predict(model_, x);
    }
    std::string kind() const override { return "nb"; }

    void save(NamedTensorMap& out, const std::string& prefix) const override {
        out[prefix + "class_log_prior"] = {{2}, {model_.class_log_prior[0],
                                                 model_.class_log_prior[1]}};
        for (int c = 0; c < 2; ++c)
            out[prefix + "feature_log_prob." + std::to_string(c)] = {
                {model_.feature_log_prob[c].size()}, model_.feature_log_prob[c]};
    }
    void load(const NamedTensorMap& in, const std::string& prefix) override {
        const auto& prior = in.at(prefix + "class_log_prior").data;
        model_.class_log_prior = {prior.at(0), prior.at(1)};
        model_.alpha = alpha_;
        for (int c = 0; c < 2; ++c)
            model_.feature_log_prob[c] =
                in.at(prefix + "feature_log_prob." + std::to_string(c)).data;
    }

private:
    double alpha_;
    std::size_t n_features_;
    NaiveBayesModel model_;
};

class OnlineLinearClassifier final : public BaseClassifier {
public:
    OnlineLinearClassifier(LinearKind kind, const BaseHyper& hyper,
                           std::size_t n_features, std::uint64_t seed)
        : kind_(kind), hyper_(hyper), n_features_(n_features), seed_(seed) {}

    void fit(std::span<const FeatureVector> X, std::span<const Label> y,
             std::span<const double> w) override {
        model_ = kind_ == LinearKind::PassiveAggressive
                     ? pa_fit(X, y, w, hyper_.pa_C, hyper_.epochs, seed_, n_features_)
                     : svm_fit(X, y, w, hyper_.svm_lambda, hyper_.epochs, seed_,
                               n_features_);
    }
    Prediction predict(const FeatureVector& x) const override {
        return linear_predict(model_, x);
    }
    std::string kind() const override {
        return kind_ == LinearKind::PassiveAggressive ? "pa" : "svm";
    }

    void save(NamedTensorMap& out, const std::string& prefix) const override {
        out[prefix + "weights"] = {{model_.weights.size()}, model_.weights};
        out[prefix + "bias"] = {{1}, {model_.bias}};
    }
    void load(const NamedTensorMap& in, const std::string& prefix) override {
        model_.kind = kind_;
        model_.weights = in.at(prefix + "weights").data;
        model_.bias = in.at(prefix + "bias").data.at(0);
    }

private:
    LinearKind kind_;
    BaseHyper hyper_;
    std::size_t n_features_;
    std::uint64_t seed_;
    LinearModel model_;
};

std::vector<const BaseClassifier*> raw_pointers(
    const std::vector<std::unique_ptr<BaseClassifier>>& owned) {
    std::vector<const BaseClassifier*> out;
    out.reserve(owned.size());
    for (const auto& p : owned) out.push_back(p.get());
    return out;
}

void require_members(const std::vector<ClassifierFactory>& members) {
    if (members.empty()) throw ConfigError("ensemble needs at least one member");
}

// Stratified fold ids: within each class the seeded shuffle order is dealt
// round-robin across folds.
std::vector<std::size_t> stratified_fold_ids(std::span<const Label> y,
                                             std::size_t folds, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < y.size(); ++i)
        by_class[static_cast<int>(y[i])].push_back(i);
    for (const auto& cls : by_class)
        if (cls.size() < folds)
            throw TrainError("stacking folds exceed the smallest class count");

    Rng rng(seed);
    std::vector<std::size_t> fold_of(y.size(), 0);
    for (auto& cls : by_class) {
        rng.shuffle(cls);
        for (std::size_t k = 0; k < cls.size(); ++k) fold_of[cls[k]] = k % folds;
    }
    return fold_of;
}

// Full-batch gradient descent on mean binary cross-entropy.
void logistic_meta_fit(const std::vector<std::vector<double>>& features,
                       std::span<const Label> y, std::vector<double>& weights,
                       double& bias) {
    constexpr int kIterations = 200;
    constexpr double kStep = 0.1;
    const std::size_t n = features.size();
    const std::size_t dim = weights.size();
    std::vector<double> grad(dim);
    for (int it = 0; it < kIterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            double z = bias;
            for (std::size_t j = 0; j < dim; ++j) z += weights[j] * features[d][j];
            const double err = logistic(z) - (y[d] == Label::Generated ? 1.0 : 0.0);
            for (std::size_t j = 0; j < dim; ++j) grad[j] += err * features[d][j];
            grad_bias += err;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < dim; ++j) weights[j] -= kStep * grad[j] * inv_n;
        bias -= kStep * grad_bias * inv_n;
    }
}

} // namespace

std::unique_ptr<BaseClassifier> make_base_classifier(const std::string& kind,
                                                     const BaseHyper& hyper,
                                                     std::size_t n_features,
                                                     std::uint64_t seed) {
    if (kind == "nb") return std::make_unique<NbClassifier>(hyper.nb_alpha, n_features);
    if (kind == "pa")
        return std::make_unique<OnlineLinearClassifier>(LinearKind::PassiveAggressive,
                                                        hyper, n_features, seed);
    if (kind == "svm")
        return std::make_unique<OnlineLinearClassifier>(LinearKind::Svm, hyper,
                                                        n_features, seed);
    throw ConfigError("unknown base classifier \"" + kind +
                      "\" (expected nb, pa or svm)");
}

ClassifierFactory base_classifier_factory(const std::string& kind,
                                          const BaseHyper& hyper,
                                          std::size_t n_features) {
    return [kind, hyper, n_features](std::uint64_t seed) {
        return make_base_classifier(kind, hyper, n_features, seed);
    };
}

Prediction vote_combine(std::span<const Prediction> preds, VoteMode mode) {
    if (preds.empty()) throw ModelError("vote over zero members");
    // Centered mean: identical member scores reproduce the member exactly.
    const double base = preds[0].score;
    double delta_sum = 0.0;
    std::size_t generated_votes = 0;
    for (const Prediction& p : preds) {
        delta_sum += p.score - base;
        if (p.label == Label::Generated) ++generated_votes;
    }
    const double mean_score = base + delta_sum / static_cast<double>(preds.size());
    Label label;
    if (mode == VoteMode::Hard) {
        label = 2 * generated_votes > preds.size() ? Label::Generated : Label::Human;
    } else {
        label = mean_score > 0.5 ? Label::Generated : Label::Human;
    }
    return {label, mean_score};
}

Prediction vote_predict(std::span<const BaseClassifier* const> members,
                        const FeatureVector& x, VoteMode mode) {
    std::vector<Prediction> preds;
    preds.reserve(members.size());
    for (const auto* m : members) preds.push_back(m->predict(x));
    return vote_combine(preds, mode);
}

Prediction VotingModel::predict(const FeatureVector& x) const {
    const auto ptrs = raw_pointers(members);
    return vote_predict(ptrs, x, mode);
}

VotingModel voting_fit(const VotingSpec& spec, std::span<const FeatureVector> X,
                       std::span<const Label> y, std::uint64_t seed) {
    require_members(spec.members);
    VotingModel model;
    model.mode = spec.mode;
    const auto w = uniform_weights(X.size());
    for (std::size_t m = 0; m < spec.members.size(); ++m) {
        auto clf = spec.members[m](derive_seed(seed, 1 + m));
        clf->fit(X, y, w);
        model.members.push_back(std::move(clf));
    }
    return model;
}

Prediction StackedModel::predict(const FeatureVector& x) const {
    double z = meta_bias;
    for (std::size_t m = 0; m < members.size(); ++m)
        z += meta_weights[m] * members[m]->predict(x).score;
    const double p = logistic(z);
    return {p > 0.5 ? Label::Generated : Label::Human, p};
}

StackedModel stack_fit(const StackingSpec& spec, std::span<const FeatureVector> X,
                       std::span<const Label> y, std::uint64_t seed) {
    require_members(spec.members);
    if (spec.folds < 2) throw ConfigError("stacking needs at least 2 folds");

    const std::size_t n = X.size();
    const std::size_t n_members = spec.members.size();
    const auto fold_of = stratified_fold_ids(y, spec.folds, seed);

    // Out-of-fold score matrix: row per sample, column per member.
    std::vector<std::vector<double>> meta(n, std::vector<double>(n_members, 0.0));
    std::uint64_t component = 1;
    for (std::size_t f = 0; f < spec.folds; ++f) {
        std::vector<FeatureVector> train_X;
        std::vector<Label> train_y;
        std::vector<std::size_t> held_out;
        for (std::size_t d = 0; d < n; ++d) {
            if (fold_of[d] == f) {
                held_out.push_back(d);
            } else {
                train_X.push_back(X[d]);
                train_y.push_back(y[d]);
            }
        }
        const auto w = uniform_weights(train_X.size());
        for (std::size_t m = 0; m < n_members; ++m) {
            auto clf = spec.members[m](derive_seed(seed, component++));
            clf->fit(train_X, train_y, w);
            for (const std::size_t d : held_out) meta[d][m] = clf->predict(X[d]).score;
        }
    }

    StackedModel model;
    model.meta_weights.assign(n_members, 0.0);
    logistic_meta_fit(meta, y, model.meta_weights, model.meta_bias);

    const auto w = uniform_weights(n);
    for (std::size_t m = 0; m < n_members; ++m) {
        auto clf = spec.members[m](derive_seed(seed, component++));
        clf->fit(X, y, w);
        model.members.push_back(std::move(clf));
    }
    return model;
}

Prediction BaggedModel::predict(const FeatureVector& x) const {
    const auto ptrs = raw_pointers(estimators);
    return vote_predict(ptrs, x, VoteMode::Hard);
}

BaggedModel bag_fit(const BaggingSpec& spec, std::span<const FeatureVector> X,
                    std::span<const Label> y, std::uint64_t seed) {
    require_members(spec.members);
    if (spec.n_estimators < 1) throw ConfigError("bagging needs n_estimators >= 1");

    const std::size_t n = X.size();
    BaggedModel model;
    for (std::size_t e = 0; e < spec.n_estimators; ++e) {
        const std::uint64_t member_seed = derive_seed(seed, 1 + e);
        std::vector<FeatureVector> sample_X;
        std::vector<Label> sample_y;
        sample_X.reserve(n);
        sample_y.reserve(n);
        if (spec.identity_resample) {
            sample_X.assign(X.begin(), X.end());
            sample_y.assign(y.begin(), y.end());
        } else {
            Rng rng(member_seed);
            for (std::size_t k = 0; k < n; ++k) {
                const auto d = static_cast<std::size_t>(rng.below(n));
                sample_X.push_back(X[d]);
                sample_y.push_back(y[d]);
            }
        }
        // Round-robin member assignment for heterogeneous ensembles.
        auto clf = spec.members[e % spec.members.size()](member_seed);
        clf->fit(sample_X, sample_y, uniform_weights(n));
        model.estimators.push_back(std::move(clf));
    }
    return model;
}

BoostState boost_fit(const BoostingSpec& spec, std::span<const FeatureVector> X,
                     std::span<const Label> y, std::uint64_t seed) {
    require_members(spec.members);
    if (spec.n_rounds < 1) throw ConfigError("boosting needs n_rounds >= 1");

    const std::size_t n = X.size();
    if (n == 0) throw TrainError("cannot boost on an empty training set");
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> h(n);

    BoostState state;
    for (std::size_t r = 0; r < spec.n_rounds; ++r) {
        auto clf = spec.members[r % spec.members.size()](derive_seed(seed, 1 + r));
        clf->fit(X, y, w);

        double err = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const Label pred = clf->predict(X[d]).label;
            h[d] = pred == Label::Generated ? 1.0 : -1.0;
            if (pred != y[d]) err += w[d];
        }
        if (err >= 0.5) break;  // no better than chance: drop round and stop

        const double eps = std::clamp(err, 1e-10, 1.0 - 1e-10);
        const double alpha = 0.5 * std::log((1.0 - eps) / eps);
        state.round_models.push_back(std::move(clf));
        state.round_alphas.push_back(alpha);
        if (err == 0.0) break;

        double mass = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const double yd = y[d] == Label::Generated ? 1.0 : -1.0;
            w[d] *= std::exp(-alpha * yd * h[d]);
            mass += w[d];
        }
        for (double& wd : w) wd /= mass;
    }
    return state;
}

Prediction boost_predict(const BoostState& s, const FeatureVector& x) {
    if (s.round_models.empty())
        throw ModelError("boosted model kept no rounds; cannot predict");
    double margin = 0.0;
    for (std::size_t r = 0; r < s.round_models.size(); ++r) {
        const double h =
            s.round_models[r]->predict(x).label == Label::Generated ? 1.0 : -1.0;
        margin += s.round_alphas[r] * h;
    }
    return {margin > 0.0 ? Label::Generated : Label::Human, logistic(margin)};
}

} // namespace gtd
