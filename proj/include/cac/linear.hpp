#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cac/features.hpp"

namespace cac::linear {

struct Hyperparams {
    double learning_rate = 0.1;
    int epochs = 300;
    int batch_size = 0;  // 0 = full batch
    std::uint64_t seed = 1;
};

struct LinearModel {
    // 10 x (F+1); the last column multiplies the constant-1 bias input.
    Eigen::MatrixXd weights;
    Hyperparams hyper;

    int feature_count() const {
        return static_cast<int>(weights.cols()) - 1;
    }
};

struct Prediction {
    std::array<double, 10> scores{};
    int predicted_class = 0;  // argmax; ties break toward the lowest index
};

Prediction forward(std::span<const std::uint8_t> feature_bits,
                   const LinearModel& model);

struct TrainReport {
    double final_loss = 0.0;
    double train_accuracy = 0.0;
};

// Softmax cross-entropy minimized by gradient descent from zero weights.
// Deterministic given (data, hyperparams, seed). Throws on a non-finite loss.
LinearModel train(const features::FeatureMatrix& features,
                  std::span<const std::uint8_t> labels, const Hyperparams& hyper,
                  TrainReport* report = nullptr);

struct Evaluation {
    double accuracy = 0.0;
    std::array<std::array<std::int64_t, 10>, 10> confusion{};  // [true][pred]
};

Evaluation evaluate(const LinearModel& model,
                    const features::FeatureMatrix& features,
                    std::span<const std::uint8_t> labels);

// Test-suite oracle hooks: loss and analytic gradient at given weights.
double softmax_cross_entropy_loss(const Eigen::MatrixXd& weights,
                                  const Eigen::MatrixXd& inputs,
                                  std::span<const std::uint8_t> labels);
Eigen::MatrixXd softmax_cross_entropy_gradient(
    const Eigen::MatrixXd& weights, const Eigen::MatrixXd& inputs,
    std::span<const std::uint8_t> labels);

// Inputs matrix with the appended constant-1 bias column, one row per sample.
Eigen::MatrixXd design_matrix(const features::FeatureMatrix& features);

}  // namespace cac::linear
