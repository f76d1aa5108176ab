#include "cac/search.hpp"

#include <stdexcept>
#include <utility>

#include "cac/parallel.hpp"

namespace cac::search {

double phi_objective(std::span<const double> activities,
                     std::span<const std::uint8_t> labels, int target_class) {
    if (activities.size() != labels.size()) {
        throw std::invalid_argument("phi_objective: size mismatch");
    }
    double sum_target = 0.0;
    double sum_other = 0.0;
    std::size_t n_target = 0;
    for (std::size_t j = 0; j < activities.size(); ++j) {
        if (labels[j] == target_class) {
            sum_target += activities[j];
            ++n_target;
        } else {
            sum_other += activities[j];
        }
    }
    const std::size_t n_other = activities.size() - n_target;
    if (n_target == 0 || n_other == 0) {
        throw std::invalid_argument(
            "phi_objective: minibatch must contain both target and non-target "
            "images");
    }
    return sum_other / static_cast<double>(n_other) -
           sum_target / static_cast<double>(n_target);
}

RuleTable propose_rule_mutation(const RuleTable& rule, int k, rng::Engine& g) {
    if (k < 1 || k > 512) {
        throw std::invalid_argument("propose_rule_mutation: k out of range");
    }
    RuleTable out = rule;
    const auto positions =
        rng::sample_without_replacement(g, 512, static_cast<std::uint32_t>(k));
    for (const auto pos : positions) {
        out[pos] ^= 1;
    }
    return out;
}

int next_mutation_size(std::uint64_t rule_proposal_ordinal, rng::Engine& g) {
    if (rule_proposal_ordinal % 2 == 1) {
        return 1;
    }
    return rng::uniform_int(g, 1, 10);
}

int propose_depth_change(int depth, rng::Engine& g) {
    return depth + (rng::coin(g) ? 1 : -1);
}

Minibatch make_minibatch(const mnist::Dataset& dataset,
                         std::span<const std::uint32_t> indices) {
    Minibatch mb;
    mb.side = dataset.side;
    mb.images.reserve(indices.size());
    mb.labels.reserve(indices.size());
    for (const auto idx : indices) {
        const auto& img = dataset.images.at(idx);
        mb.images.push_back(pack(mnist::binarize(img, dataset.side)));
        mb.labels.push_back(img.label);
    }
    return mb;
}

void evaluate_activities(std::span<const PackedGrid> images,
                         const StepTable& table, int depth,
                         std::span<double> out) {
    const int side = images.empty() ? 0 : images.front().side;
    const double denom = static_cast<double>(side) * side * depth;
    // threading pays off only once the minibatch sweep is substantial
    const double work =
        static_cast<double>(images.size()) * depth * side * side;
    const unsigned threads = work > 1e6 ? hardware_threads() : 1;
    parallel_chunks(images.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            out[j] =
                static_cast<double>(total_activity(images[j], table, depth)) /
                denom;
        }
    });
}

const char* to_string(ProposalKind kind) {
    switch (kind) {
        case ProposalKind::rule_mutation: return "rule";
        case ProposalKind::depth_change: return "depth";
        case ProposalKind::reset: return "reset";
    }
    return "?";
}

namespace {

struct Evaluator {
    const Minibatch& minibatch;
    StepTable table;
    std::vector<double> scratch;

    explicit Evaluator(const Minibatch& mb)
        : minibatch(mb), scratch(mb.size(), 0.0) {}

    // activities + phi for a candidate (rule, depth); results stay in scratch
    double evaluate(const RuleTable& rule, int depth, int target_class) {
        table.rebuild(rule);
        evaluate_activities(minibatch.images, table, depth, scratch);
        return phi_objective(scratch, minibatch.labels, target_class);
    }
};

}  // namespace

SearchResult run_search(const SearchConfig& config, const Minibatch& minibatch,
                        const ProgressSink& sink) {
    if (minibatch.size() == 0) {
        throw std::invalid_argument("run_search: empty minibatch");
    }
    if (config.depth_cadence < 1 || config.reset_cadence < 1) {
        throw std::invalid_argument("run_search: cadences must be >= 1");
    }
    if (config.target_class < 0 || config.target_class > 9) {
        throw std::invalid_argument("run_search: target class out of range");
    }

    SearchResult result;
    SearchState& state = result.state;
    state.rule = identity_rule_table();
    state.depth = config.initial_depth_for_mode();
    state.activities.assign(minibatch.size(), 0.0);

    Evaluator eval(minibatch);
    // The identity table produces zero activity everywhere, but evaluate it
    // anyway so that phi always comes from the same code path. This also
    // validates that both class partitions are present.
    state.phi = eval.evaluate(state.rule, state.depth, config.target_class);
    state.activities = eval.scratch;

    rng::Engine chain(rng::derive_seed(config.seed, "chain"));
    const bool variable = config.mode == Mode::variable_depth;
    std::uint64_t rule_moves = 0;

    const auto record = [&](std::uint64_t n, ProposalKind kind, bool accepted) {
        result.trace.push_back({n, kind, accepted, state.phi, state.depth});
        if (sink) {
            sink(result.trace.back());
        }
    };

    for (std::uint64_t n = 1; n <= config.budget; ++n) {
        ++state.proposals_made;
        if (variable && n % config.depth_cadence == 0) {
            const int proposed = propose_depth_change(state.depth, chain);
            if (proposed < 1) {
                record(n, ProposalKind::depth_change, false);
            } else {
                const double phi_new =
                    eval.evaluate(state.rule, proposed, config.target_class);
                if (metropolis_accept(state.phi, phi_new)) {
                    state.depth = proposed;
                    state.phi = phi_new;
                    state.activities.swap(eval.scratch);
                    ++state.proposals_accepted;
                    record(n, ProposalKind::depth_change, true);
                } else {
                    record(n, ProposalKind::depth_change, false);
                }
            }
        } else {
            ++rule_moves;
            const int k = next_mutation_size(rule_moves, chain);
            RuleTable candidate = propose_rule_mutation(state.rule, k, chain);
            const double phi_new =
                eval.evaluate(candidate, state.depth, config.target_class);
            if (metropolis_accept(state.phi, phi_new)) {
                state.rule = candidate;
                state.phi = phi_new;
                state.activities.swap(eval.scratch);
                ++state.proposals_accepted;
                record(n, ProposalKind::rule_mutation, true);
            } else {
                record(n, ProposalKind::rule_mutation, false);
            }
        }

        if (variable && n % config.reset_cadence == 0 &&
            state.depth == config.reset_trigger_depth) {
            state.rule = identity_rule_table();
            state.depth = config.initial_depth;
            state.phi =
                eval.evaluate(state.rule, state.depth, config.target_class);
            state.activities = eval.scratch;
            ++result.resets;
            record(n, ProposalKind::reset, true);
        }
    }
    return result;
}

}  // namespace cac::search
