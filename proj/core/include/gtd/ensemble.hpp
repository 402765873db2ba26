#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gtd/linear.hpp"
#include "gtd/named_tensors.hpp"

namespace gtd {

// Contract every ensemble strategy builds on: weighted fit plus a
// probability-scored prediction.
class BaseClassifier {
public:
    virtual ~BaseClassifier() = default;
    virtual void fit(std::span<const FeatureVector> X, std::span<const Label> y,
                     std::span<const double> w) = 0;
    virtual Prediction predict(const FeatureVector& x) const = 0;
    virtual std::string kind() const = 0;
    virtual void save(NamedTensorMap& out, const std::string& prefix) const = 0;
    virtual void load(const NamedTensorMap& in, const std::string& prefix) = 0;
};

// Fresh unfitted classifier with the given training seed.
using ClassifierFactory =
    std::function<std::unique_ptr<BaseClassifier>(std::uint64_t seed)>;

struct BaseHyper {
    double nb_alpha = 1.0;
    double pa_C = 1.0;
    double svm_lambda = 0.01;
    std::size_t epochs = 5;
};

// kind is one of "nb", "pa", "svm".
std::unique_ptr<BaseClassifier> make_base_classifier(const std::string& kind,
                                                     const BaseHyper& hyper,
                                                     std::size_t n_features,
                                                     std::uint64_t seed);
ClassifierFactory base_classifier_factory(const std::string& kind,
                                          const BaseHyper& hyper,
                                          std::size_t n_features);

enum class VoteMode { Hard, Soft };

// Hard: majority label, ties -> Human. Soft: mean Generated-score against a
// 0.5 threshold, exact 0.5 -> Human. Score is the mean member score either way.
Prediction vote_combine(std::span<const Prediction> preds, VoteMode mode);
Prediction vote_predict(std::span<const BaseClassifier* const> members,
                        const FeatureVector& x, VoteMode mode);

struct VotingSpec {
    VoteMode mode = VoteMode::Hard;
    std::vector<ClassifierFactory> members;
};

struct StackingSpec {
    std::size_t folds = 5;
    std::vector<ClassifierFactory> members;
};

struct BaggingSpec {
    std::size_t n_estimators = 10;
    std::vector<ClassifierFactory> members;
    // Test hook: train every estimator on the data as-is instead of a
    // bootstrap resample.
    bool identity_resample = false;
};

struct BoostingSpec {
    std::size_t n_rounds = 10;
    std::vector<ClassifierFactory> members;
};

struct VotingModel {
    VoteMode mode = VoteMode::Hard;
    std::vector<std::unique_ptr<BaseClassifier>> members;
    Prediction predict(const FeatureVector& x) const;
};

VotingModel voting_fit(const VotingSpec& spec, std::span<const FeatureVector> X,
                       std::span<const Label> y, std::uint64_t seed);

struct StackedModel {
    std::vector<std::unique_ptr<BaseClassifier>> members;  // refit on full data
    std::vector<double> meta_weights;                      // one per member
    double meta_bias = 0.0;
    Prediction predict(const FeatureVector& x) const;
};

// Out-of-fold meta-features from a stratified k-fold, then a logistic
// regression meta-model (full-batch gradient descent, 200 iterations,
// step 0.1) over the member score columns.
StackedModel stack_fit(const StackingSpec& spec, std::span<const FeatureVector> X,
                       std::span<const Label> y, std::uint64_t seed);

struct BaggedModel {
    std::vector<std::unique_ptr<BaseClassifier>> estimators;
    Prediction predict(const FeatureVector& x) const;  // hard vote
};

BaggedModel bag_fit(const BaggingSpec& spec, std::span<const FeatureVector> X,
                    std::span<const Label> y, std::uint64_t seed);

struct BoostState {
    std::vector<std::unique_ptr<BaseClassifier>> round_models;
    std::vector<double> round_alphas;
};

// AdaBoost.M1 over +/-1 labels. Rounds with weighted error >= 0.5 are
// dropped and stop the loop; a zero-error round is kept and stops it.
BoostState boost_fit(const BoostingSpec& spec, std::span<const FeatureVector> X,
                     std::span<const Label> y, std::uint64_t seed);

// sign(sum alpha_r * h_r(x)) with 0 -> Human; score = logistic of the sum.
Prediction boost_predict(const BoostState& s, const FeatureVector& x);

} // namespace gtd
