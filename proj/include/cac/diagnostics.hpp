#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cac/features.hpp"
#include "cac/lattice.hpp"

namespace cac::diag {

struct ActivityHistogram {
    double bin_width = 1.0 / 50.0;
    int n_bins = 50;
    std::array<std::vector<std::int64_t>, 10> counts{};  // per class
    std::array<std::int64_t, 10> class_totals{};

    // normalized so each present class sums to 1
    double mass(int cls, int bin) const {
        return class_totals[cls] == 0
                   ? 0.0
                   : static_cast<double>(counts[cls][bin]) /
                         static_cast<double>(class_totals[cls]);
    }
};

// Per-class histogram over a in [0,1]; a = 1.0 lands in the last bin.
// bin_width must evenly partition [0,1]. Throws std::invalid_argument for
// non-finite or out-of-range activities.
ActivityHistogram activity_histogram(std::span<const double> activities,
                                     std::span<const std::uint8_t> labels,
                                     double bin_width = 1.0 / 50.0);

struct TraceSeries {
    std::vector<int> instantaneous;    // changed-cell count per step, length T
    std::vector<double> cumulative_a;  // a(t) = A(t)/(N*t), length T
};

// Time-integrated and instantaneous activity for each image, run to t_max.
std::vector<TraceSeries> activity_traces(
    std::span<const Lattice> images, const features::TrainedAutomaton& automaton,
    int t_max);

struct SnapshotFrame {
    int time = 0;
    Lattice lattice;
    std::vector<std::uint8_t> changed_mask;  // all-false at time 0
};

// Lattice plus changed-cell mask at each requested step. Times must lie in
// [0, automaton.depth].
std::vector<SnapshotFrame> snapshot_grid(
    const Lattice& image, const features::TrainedAutomaton& automaton,
    std::span<const int> times);

struct BimodalitySummary {
    double below = 0.0;   // a < lo
    double middle = 0.0;  // lo <= a < hi
    double above = 0.0;   // a >= hi
};

BimodalitySummary bimodality_summary(std::span<const double> activities,
                                     double lo = 0.25, double hi = 0.75);

}  // namespace cac::diag
