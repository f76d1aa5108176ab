#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cac/lattice.hpp"

namespace cac {

struct StepResult {
    Lattice lattice;
    int changed = 0;
    std::vector<std::uint8_t> changed_mask;  // 1 where new state != old state
};

// Synchronous update of every cell from the time-t lattice. Optimized path.
StepResult step(const Lattice& lattice, const RuleTable& rule);

// Same contract as step(), written in the most obvious scalar way with
// explicit modular indexing. Kept as the correctness oracle for the packed
// stepper; never used on hot paths.
StepResult reference_step(const Lattice& lattice, const RuleTable& rule);

struct TrajectoryResult {
    std::vector<int> per_step_activity;  // length T
    std::int64_t total_activity = 0;     // A = sum of per-step counts
    double intensive_activity = 0.0;     // a = A / (N*T)
    Lattice final_lattice;

    struct Snapshot {
        Lattice lattice;
        std::vector<std::uint8_t> changed_mask;
    };
    // Empty unless recording was requested; otherwise T+1 entries with an
    // all-false mask at index 0.
    std::vector<Snapshot> snapshots;
};

// Applies `rule` T times starting from `initial`. The initial condition
// contributes no activity. Throws std::invalid_argument if depth < 1.
TrajectoryResult run_trajectory(const Lattice& initial, const RuleTable& rule,
                                int depth, bool record_snapshots = false);

// ---------------------------------------------------------------------------
// Packed engine. Rows live in uint32 words (side <= 32); the rule table is
// expanded into a 4096-entry map that yields two adjacent output cells per
// lookup from the 3x4 window covering them.

inline constexpr int kMaxPackedSide = 32;

struct PackedGrid {
    int side = 0;
    std::array<std::uint32_t, kMaxPackedSide> rows{};

    bool operator==(const PackedGrid&) const = default;
};

PackedGrid pack(const Lattice& lattice);
Lattice unpack(const PackedGrid& grid);

struct StepTable {
    std::array<std::uint8_t, 4096> pair{};   // 12-bit window -> 2 output bits
    std::array<std::uint8_t, 512> single{};  // plain rule copy, odd-column tail

    StepTable() = default;
    explicit StepTable(const RuleTable& rule) { rebuild(rule); }
    void rebuild(const RuleTable& rule);
};

// One synchronous step on packed rows; returns the changed-cell count.
int fast_step(const PackedGrid& current, PackedGrid& next, const StepTable& table);

// Total activity A over `depth` steps. Exact: trajectories that reach a
// fixed point or a 2-cycle are closed out analytically instead of stepped.
std::int64_t total_activity(const PackedGrid& initial, const StepTable& table,
                            int depth);

inline double intensive_activity(const PackedGrid& initial, const StepTable& table,
                                 int depth) {
    const double n = static_cast<double>(initial.side) * initial.side;
    return static_cast<double>(total_activity(initial, table, depth)) / (n * depth);
}

}  // namespace cac
