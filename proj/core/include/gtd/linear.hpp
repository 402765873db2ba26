#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gtd/corpus.hpp"
#include "gtd/vectorize.hpp"

namespace gtd {

// Shared prediction contract: score is the probability-like weight on
// Generated, so soft voting and stacking can mix any model's output.
struct Prediction {
    Label label;
    double score;  // P(Generated)
};

// Multinomial NB with weighted fractional counts.
struct NaiveBayesModel {
    std::array<double, 2> class_log_prior{};              // [Human, Generated]
    std::array<std::vector<double>, 2> feature_log_prob;  // per class, length V
    double alpha = 1.0;

    std::size_t n_features() const { return feature_log_prob[0].size(); }
};

enum class LinearKind { PassiveAggressive, Svm };

struct LinearModel {
    std::vector<double> weights;  // length V
    double bias = 0.0;
    LinearKind kind = LinearKind::PassiveAggressive;
};

// Per-sample weights; uniform 1.0 unless a caller (boosting) says otherwise.
using SampleWeights = std::vector<double>;

SampleWeights uniform_weights(std::size_t n);

// count(c,i) = sum over class-c samples of w_d * x_{d,i};
// feature_log_prob(c,i) = ln((count(c,i)+alpha) / (sum_i count(c,i)+alpha*V));
// class_log_prior(c) = ln(class weight mass / total weight mass).
// Throws TrainError when a class is absent or has zero total weight.
NaiveBayesModel nb_fit(std::span<const FeatureVector> X, std::span<const Label> y,
                       std::span<const double> w, double alpha, std::size_t n_features);

// Posterior via log-sum-exp; ties break toward Human.
Prediction nb_predict(const NaiveBayesModel& m, const FeatureVector& x);

// PA-I online updates over seeded-shuffled epochs. Per sample with hinge
// loss l = max(0, 1 - y*(w.x + b)): tau = min(C, w_d*l / (|x|^2 + 1)),
// w += tau*y*x, b += tau*y (the +1 is the implicit bias feature).
LinearModel pa_fit(std::span<const FeatureVector> X, std::span<const Label> y,
                   std::span<const double> w, double C, std::size_t epochs,
                   std::uint64_t seed, std::size_t n_features);

// Pegasos-style primal sub-gradient descent on
// lambda/2*|w|^2 + (1/sum w_d) * sum w_d*hinge, step 1/(lambda*t),
// bias unregularized.
LinearModel svm_fit(std::span<const FeatureVector> X, std::span<const Label> y,
                    std::span<const double> w, double lambda, std::size_t epochs,
                    std::uint64_t seed, std::size_t n_features);

// sign(w.x + b), 0 -> Human; score = logistic(w.x + b).
Prediction linear_predict(const LinearModel& m, const FeatureVector& x);

double logistic(double z);

} // namespace gtd
