#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cac/lattice.hpp"
#include "cac/mnist.hpp"
#include "cac/stepper.hpp"

namespace cac::features {

struct TrainedAutomaton {
    RuleTable rule;
    int depth = 1;
    int trained_class = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
};

// 1 iff the trajectory from `image` under the automaton's rule and depth has
// intensive activity strictly below theta (the low-activity phase).
bool phase_feature(const Lattice& image, const TrainedAutomaton& automaton,
                   double theta);

struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::uint8_t> bits;       // row-major, one byte per entry
    std::vector<int> column_class;        // trained class per ensemble member
    double theta = 0.25;

    std::uint8_t at(std::size_t row, std::size_t col) const {
        return bits[row * n_cols + col];
    }
};

// Entry (j, k) = phase_feature(binarize(image j), automaton k, theta).
// `depth_override`, when set, replaces every automaton's trained depth
// (long-trajectory diagnostic).
FeatureMatrix extract_feature_matrix(const mnist::Dataset& dataset,
                                     std::span<const TrainedAutomaton> ensemble,
                                     double theta,
                                     std::optional<int> depth_override = {});

}  // namespace cac::features
