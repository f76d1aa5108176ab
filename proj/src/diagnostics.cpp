#include "cac/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "cac/parallel.hpp"
#include "cac/stepper.hpp"

namespace cac::diag {

ActivityHistogram activity_histogram(std::span<const double> activities,
                                     std::span<const std::uint8_t> labels,
                                     double bin_width) {
    if (activities.size() != labels.size()) {
        throw std::invalid_argument("activity_histogram: size mismatch");
    }
    const double bins_exact = 1.0 / bin_width;
    const int n_bins = static_cast<int>(std::llround(bins_exact));
    if (n_bins < 1 || std::abs(bins_exact - n_bins) > 1e-9) {
        throw std::invalid_argument(
            "activity_histogram: bin width must evenly partition [0,1]");
    }
    ActivityHistogram hist;
    hist.bin_width = bin_width;
    hist.n_bins = n_bins;
    for (auto& c : hist.counts) {
        c.assign(n_bins, 0);
    }
    for (std::size_t j = 0; j < activities.size(); ++j) {
        const double a = activities[j];
        if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
            throw std::invalid_argument(
                "activity_histogram: activity outside [0,1]");
        }
        const int bin = std::min(static_cast<int>(a / bin_width), n_bins - 1);
        const int cls = labels[j];
        hist.counts[cls][bin] += 1;
        hist.class_totals[cls] += 1;
    }
    return hist;
}

std::vector<TraceSeries> activity_traces(
    std::span<const Lattice> images, const features::TrainedAutomaton& automaton,
    int t_max) {
    if (t_max < 1) {
        throw std::invalid_argument("activity_traces: t_max must be >= 1");
    }
    std::vector<TraceSeries> out(images.size());
    parallel_chunks(images.size(), hardware_threads(), [&](std::size_t lo,
                                                           std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            const auto traj = run_trajectory(images[j], automaton.rule, t_max);
            TraceSeries& series = out[j];
            series.instantaneous = traj.per_step_activity;
            series.cumulative_a.resize(traj.per_step_activity.size());
            const double n = static_cast<double>(images[j].size());
            std::int64_t acc = 0;
            for (std::size_t t = 0; t < series.instantaneous.size(); ++t) {
                acc += series.instantaneous[t];
                series.cumulative_a[t] =
                    static_cast<double>(acc) / (n * static_cast<double>(t + 1));
            }
        }
    });
    return out;
}

std::vector<SnapshotFrame> snapshot_grid(
    const Lattice& image, const features::TrainedAutomaton& automaton,
    std::span<const int> times) {
    for (const int t : times) {
        if (t < 0 || t > automaton.depth) {
            throw std::invalid_argument(
                "snapshot_grid: requested time beyond trajectory depth");
        }
    }
    const auto traj = run_trajectory(image, automaton.rule, automaton.depth,
                                     /*record_snapshots=*/true);
    std::vector<SnapshotFrame> frames;
    frames.reserve(times.size());
    for (const int t : times) {
        const auto& snap = traj.snapshots[static_cast<std::size_t>(t)];
        frames.push_back({t, snap.lattice, snap.changed_mask});
    }
    return frames;
}

BimodalitySummary bimodality_summary(std::span<const double> activities,
                                     double lo, double hi) {
    if (activities.empty()) {
        throw std::invalid_argument("bimodality_summary: no activities");
    }
    std::size_t below = 0;
    std::size_t above = 0;
    for (const double a : activities) {
        if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
            throw std::invalid_argument(
                "bimodality_summary: activity outside [0,1]");
        }
        if (a < lo) {
            ++below;
        } else if (a >= hi) {
            ++above;
        }
    }
    const auto n = static_cast<double>(activities.size());
    BimodalitySummary s;
    s.below = below / n;
    s.above = above / n;
    s.middle = (activities.size() - below - above) / n;
    return s;
}

}  // namespace cac::diag
