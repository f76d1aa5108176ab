#include "cac/features.hpp"

#include <stdexcept>

#include "cac/parallel.hpp"

namespace cac::features {

bool phase_feature(const Lattice& image, const TrainedAutomaton& automaton,
                   double theta) {
    if (theta <= 0.0 || theta >= 1.0) {
        throw std::invalid_argument("phase_feature: theta must be in (0, 1)");
    }
    const StepTable table(automaton.rule);
    return intensive_activity(pack(image), table, automaton.depth) < theta;
}

FeatureMatrix extract_feature_matrix(const mnist::Dataset& dataset,
                                     std::span<const TrainedAutomaton> ensemble,
                                     double theta,
                                     std::optional<int> depth_override) {
    if (ensemble.empty()) {
        throw std::invalid_argument("extract_feature_matrix: empty ensemble");
    }
    if (theta <= 0.0 || theta >= 1.0) {
        throw std::invalid_argument("extract_feature_matrix: theta out of range");
    }
    FeatureMatrix out;
    out.n_rows = dataset.size();
    out.n_cols = ensemble.size();
    out.theta = theta;
    out.bits.assign(out.n_rows * out.n_cols, 0);
    out.column_class.reserve(ensemble.size());

    std::vector<StepTable> tables;
    tables.reserve(ensemble.size());
    std::vector<int> depths;
    depths.reserve(ensemble.size());
    for (const auto& a : ensemble) {
        tables.emplace_back(a.rule);
        const int depth = depth_override.value_or(a.depth);
        if (depth < 1) {
            throw std::invalid_argument("extract_feature_matrix: depth < 1");
        }
        depths.push_back(depth);
        out.column_class.push_back(a.trained_class);
    }

    parallel_chunks(out.n_rows, hardware_threads(), [&](std::size_t lo,
                                                        std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            const PackedGrid grid =
                pack(mnist::binarize(dataset.images[j], dataset.side));
            for (std::size_t k = 0; k < tables.size(); ++k) {
                out.bits[j * out.n_cols + k] =
                    intensive_activity(grid, tables[k], depths[k]) < theta ? 1
                                                                           : 0;
            }
        }
    });
    return out;
}

}  // namespace cac::features
