#include "cac/linear.hpp"

#include <cmath>
#include <stdexcept>

#include "cac/rng.hpp"

namespace cac::linear {

namespace {

constexpr int kClasses = 10;

// Row-wise softmax of X * W^T with the usual max-shift for stability.
Eigen::MatrixXd softmax_probs(const Eigen::MatrixXd& weights,
                              const Eigen::MatrixXd& inputs) {
    Eigen::MatrixXd z = inputs * weights.transpose();  // n x 10
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double m = z.row(i).maxCoeff();
        z.row(i) = (z.row(i).array() - m).exp();
        z.row(i) /= z.row(i).sum();
    }
    return z;
}

int argmax_lowest(const Eigen::RowVectorXd& scores) {
    int best = 0;
    for (int c = 1; c < kClasses; ++c) {
        if (scores(c) > scores(best)) {
            best = c;
        }
    }
    return best;
}

}  // namespace

Eigen::MatrixXd design_matrix(const features::FeatureMatrix& features) {
    Eigen::MatrixXd x(features.n_rows, features.n_cols + 1);
    for (std::size_t i = 0; i < features.n_rows; ++i) {
        for (std::size_t j = 0; j < features.n_cols; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                features.at(i, j) ? 1.0 : 0.0;
        }
        x(static_cast<Eigen::Index>(i),
          static_cast<Eigen::Index>(features.n_cols)) = 1.0;
    }
    return x;
}

double softmax_cross_entropy_loss(const Eigen::MatrixXd& weights,
                                  const Eigen::MatrixXd& inputs,
                                  std::span<const std::uint8_t> labels) {
    const Eigen::MatrixXd p = softmax_probs(weights, inputs);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        loss -= std::log(p(i, labels[static_cast<std::size_t>(i)]));
    }
    return loss / static_cast<double>(p.rows());
}

Eigen::MatrixXd softmax_cross_entropy_gradient(
    const Eigen::MatrixXd& weights, const Eigen::MatrixXd& inputs,
    std::span<const std::uint8_t> labels) {
    Eigen::MatrixXd p = softmax_probs(weights, inputs);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        p(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    }
    return (p.transpose() * inputs) / static_cast<double>(inputs.rows());
}

Prediction forward(std::span<const std::uint8_t> feature_bits,
                   const LinearModel& model) {
    if (static_cast<int>(feature_bits.size()) != model.feature_count()) {
        throw std::invalid_argument("forward: feature length mismatch");
    }
    Eigen::VectorXd x(model.weights.cols());
    for (std::size_t j = 0; j < feature_bits.size(); ++j) {
        x(static_cast<Eigen::Index>(j)) = feature_bits[j] ? 1.0 : 0.0;
    }
    x(model.weights.cols() - 1) = 1.0;
    const Eigen::VectorXd s = model.weights * x;
    Prediction pred;
    for (int c = 0; c < kClasses; ++c) {
        pred.scores[c] = s(c);
    }
    pred.predicted_class = argmax_lowest(s.transpose());
    return pred;
}

LinearModel train(const features::FeatureMatrix& features,
                  std::span<const std::uint8_t> labels, const Hyperparams& hyper,
                  TrainReport* report) {
    if (features.n_rows == 0) {
        throw std::invalid_argument("train: empty dataset");
    }
    if (features.n_rows != labels.size()) {
        throw std::invalid_argument("train: feature/label count mismatch");
    }

    const Eigen::MatrixXd x = design_matrix(features);
    LinearModel model;
    model.hyper = hyper;
    model.weights = Eigen::MatrixXd::Zero(kClasses, x.cols());

    const auto n = static_cast<std::uint32_t>(features.n_rows);
    rng::Engine g(hyper.seed);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        if (hyper.batch_size <= 0 ||
            hyper.batch_size >= static_cast<int>(n)) {
            model.weights -=
                hyper.learning_rate *
                softmax_cross_entropy_gradient(model.weights, x, labels);
        } else {
            const auto order = rng::sample_without_replacement(g, n, n);
            const auto b = static_cast<std::uint32_t>(hyper.batch_size);
            for (std::uint32_t start = 0; start < n; start += b) {
                const std::uint32_t count = std::min(b, n - start);
                Eigen::MatrixXd xb(count, x.cols());
                std::vector<std::uint8_t> yb(count);
                for (std::uint32_t i = 0; i < count; ++i) {
                    xb.row(i) = x.row(order[start + i]);
                    yb[i] = labels[order[start + i]];
                }
                model.weights -= hyper.learning_rate *
                                 softmax_cross_entropy_gradient(model.weights,
                                                                xb, yb);
            }
        }
        if (!model.weights.allFinite()) {
            throw std::runtime_error(
                "train: non-finite weights at epoch " + std::to_string(epoch) +
                "; lower the learning rate");
        }
    }

    if (report) {
        report->final_loss = softmax_cross_entropy_loss(model.weights, x, labels);
        std::size_t correct = 0;
        const Eigen::MatrixXd scores = x * model.weights.transpose();
        for (Eigen::Index i = 0; i < scores.rows(); ++i) {
            if (argmax_lowest(scores.row(i)) ==
                labels[static_cast<std::size_t>(i)]) {
                ++correct;
            }
        }
        report->train_accuracy =
            static_cast<double>(correct) / static_cast<double>(n);
        if (!std::isfinite(report->final_loss)) {
            throw std::runtime_error("train: non-finite final loss");
        }
    }
    return model;
}

Evaluation evaluate(const LinearModel& model,
                    const features::FeatureMatrix& features,
                    std::span<const std::uint8_t> labels) {
    if (features.n_rows != labels.size()) {
        throw std::invalid_argument("evaluate: feature/label count mismatch");
    }
    if (static_cast<int>(features.n_cols) != model.feature_count()) {
        throw std::invalid_argument("evaluate: feature width mismatch");
    }
    const Eigen::MatrixXd x = design_matrix(features);
    const Eigen::MatrixXd scores = x * model.weights.transpose();
    Evaluation ev;
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const int pred = argmax_lowest(scores.row(i));
        const int truth = labels[static_cast<std::size_t>(i)];
        ev.confusion[truth][pred] += 1;
        if (pred == truth) {
            ++correct;
        }
    }
    ev.accuracy = features.n_rows == 0
                      ? 0.0
                      : static_cast<double>(correct) /
                            static_cast<double>(features.n_rows);
    return ev;
}

}  // namespace cac::linear
