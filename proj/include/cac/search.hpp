#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cac/lattice.hpp"
#include "cac/mnist.hpp"
#include "cac/rng.hpp"
#include "cac/stepper.hpp"

namespace cac::search {

// Mean intensive activity of images not of the target class minus the mean
// over target-class images. Lives in [-1, 1]; throws std::invalid_argument
// if either class partition is empty (the two means are undefined then).
double phi_objective(std::span<const double> activities,
                     std::span<const std::uint8_t> labels, int target_class);

// Copy of `rule` flipped in exactly k distinct positions chosen uniformly
// without replacement. Throws std::invalid_argument for k outside [1, 512].
RuleTable propose_rule_mutation(const RuleTable& rule, int k, rng::Engine& g);

// Mutation size for the given rule-proposal ordinal (1-based): odd ordinals
// use k = 1, even ordinals draw k uniformly from {1, ..., 10}.
int next_mutation_size(std::uint64_t rule_proposal_ordinal, rng::Engine& g);

// T' = T-1 or T+1 with equal likelihood. A draw to T' = 0 is returned as-is
// and rejected downstream (depth floor is 1).
int propose_depth_change(int depth, rng::Engine& g);

// Zero temperature: accept iff phi has not decreased.
inline bool metropolis_accept(double phi_old, double phi_new) {
    return phi_new >= phi_old;
}

enum class Mode { fixed_depth, variable_depth };

struct SearchConfig {
    int target_class = 0;
    Mode mode = Mode::variable_depth;
    int fixed_depth = 10;     // fixed-depth mode
    int initial_depth = 2;    // variable-depth mode
    std::uint64_t budget = 100000;
    std::uint64_t depth_cadence = 10;   // every Nth proposal is a depth move
    std::uint64_t reset_cadence = 5000; // check the reset trigger every N proposals
    int reset_trigger_depth = 1;
    std::uint64_t seed = 1;

    // minibatch spec
    std::uint32_t minibatch_size = 5000;
    std::uint64_t minibatch_seed = 1;
    mnist::Split split = mnist::Split::train;

    int initial_depth_for_mode() const {
        return mode == Mode::fixed_depth ? fixed_depth : initial_depth;
    }
};

// Binarized, packed images with labels; fixed for the lifetime of one run.
struct Minibatch {
    std::vector<PackedGrid> images;
    std::vector<std::uint8_t> labels;
    int side = 28;

    std::size_t size() const { return images.size(); }
};

Minibatch make_minibatch(const mnist::Dataset& dataset,
                         std::span<const std::uint32_t> indices);

inline Minibatch make_minibatch(const mnist::Dataset& dataset,
                                const SearchConfig& config) {
    return make_minibatch(
        dataset,
        mnist::sample_minibatch(dataset, config.minibatch_size,
                                config.minibatch_seed));
}

struct SearchState {
    RuleTable rule;
    int depth = 2;
    double phi = 0.0;
    std::uint64_t proposals_made = 0;
    std::uint64_t proposals_accepted = 0;
    std::vector<double> activities;  // a_j for the current (rule, depth)
};

enum class ProposalKind { rule_mutation, depth_change, reset };

struct TraceEntry {
    std::uint64_t n = 0;  // proposal index, 1-based; resets repeat the index
    ProposalKind kind = ProposalKind::rule_mutation;
    bool accepted = false;
    double phi = 0.0;  // chain phi after the accept/reject decision
    int depth = 0;     // chain depth after the decision
};

using SearchTrace = std::vector<TraceEntry>;
using ProgressSink = std::function<void(const TraceEntry&)>;

struct SearchResult {
    SearchState state;
    SearchTrace trace;
    std::uint64_t resets = 0;
};

// Per-image intensive activities at (rule, depth), written in index order.
void evaluate_activities(std::span<const PackedGrid> images,
                         const StepTable& table, int depth,
                         std::span<double> out);

// Zero-temperature Metropolis chain over (rule table, depth), starting from
// the identity table. Deterministic given the config.
SearchResult run_search(const SearchConfig& config, const Minibatch& minibatch,
                        const ProgressSink& sink = {});

const char* to_string(ProposalKind kind);

}  // namespace cac::search
