#include "cac/stepper.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>
#include <utility>

namespace cac {

namespace {

// Index maps from the 12-bit 3x4 window to the 9-bit neighborhoods of the
// two cells it covers. Window bit (g*4 + j) is the cell at row offset g-1,
// column offset j-1 relative to the left output cell.
struct PairMaps {
    std::array<std::uint16_t, 4096> left{};
    std::array<std::uint16_t, 4096> right{};

    PairMaps() {
        for (unsigned w = 0; w < 4096; ++w) {
            unsigned l = 0;
            unsigned r = 0;
            for (int g = 0; g < 3; ++g) {
                for (int j = 0; j < 3; ++j) {
                    l |= ((w >> (g * 4 + j)) & 1u) << (g * 3 + j);
                    r |= ((w >> (g * 4 + j + 1)) & 1u) << (g * 3 + j);
                }
            }
            left[w] = static_cast<std::uint16_t>(l);
            right[w] = static_cast<std::uint16_t>(r);
        }
    }
};

const PairMaps& pair_maps() {
    static const PairMaps maps;
    return maps;
}

// bit c of the result = cell at column (c-1) mod L, replicated so that bit
// positions [0, L+4) are all valid reads.
inline std::uint64_t extend_shifted(std::uint32_t row, int side) {
    const std::uint32_t mask =
        side == 32 ? 0xffffffffu : ((std::uint32_t{1} << side) - 1u);
    const std::uint32_t rot = ((row << 1) | (row >> (side - 1))) & mask;
    std::uint64_t ext = 0;
    for (int s = 0; s < side + 4 && s < 64; s += side) {
        ext |= std::uint64_t{rot} << s;
    }
    return ext;
}

// kSideC > 0 lets the compiler unroll the column loop for the hot lattice
// size; kSideC == 0 is the runtime-sized fallback.
template <int kSideC>
int step_body(const PackedGrid& current, PackedGrid& next,
              const StepTable& table) {
    const int L = kSideC > 0 ? kSideC : current.side;
    next.side = L;
    std::array<std::uint64_t, kMaxPackedSide> ext;
    for (int r = 0; r < L; ++r) {
        ext[r] = extend_shifted(current.rows[r], L);
    }
    const std::uint8_t* pair = table.pair.data();
    const std::uint8_t* single = table.single.data();
    int changed = 0;
    for (int r = 0; r < L; ++r) {
        const std::uint64_t et = ext[r == 0 ? L - 1 : r - 1];
        const std::uint64_t em = ext[r];
        const std::uint64_t eb = ext[r == L - 1 ? 0 : r + 1];
        std::uint32_t out = 0;
        int c = 0;
        for (; c + 1 < L; c += 2) {
            const unsigned idx = static_cast<unsigned>((et >> c) & 15u) |
                                 (static_cast<unsigned>((em >> c) & 15u) << 4) |
                                 (static_cast<unsigned>((eb >> c) & 15u) << 8);
            out |= std::uint32_t{pair[idx]} << c;
        }
        if (c < L) {  // odd side: last column through the single-cell table
            const unsigned idx = static_cast<unsigned>((et >> c) & 7u) |
                                 (static_cast<unsigned>((em >> c) & 7u) << 3) |
                                 (static_cast<unsigned>((eb >> c) & 7u) << 6);
            out |= std::uint32_t{single[idx]} << c;
        }
        next.rows[r] = out;
        changed += std::popcount(out ^ current.rows[r]);
    }
    return changed;
}

inline std::uint64_t grid_hash(const PackedGrid& grid) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL * (std::uint64_t(grid.side) + 1);
    for (int r = 0; r < grid.side; ++r) {
        h = (h ^ grid.rows[r]) * 0x9e3779b97f4a7c15ULL;
    }
    return h ^ (h >> 29);
}

// Rolling window of recent states. Deterministic CA repeat forever once any
// state recurs, so a hit lets the caller close the trajectory analytically.
// Catches periods up to kSlots; longer cycles simply run out the clock.
struct CycleRing {
    static constexpr int kSlots = 128;  // power of two
    static constexpr int kMask = kSlots - 1;

    std::array<PackedGrid, kSlots> states;
    std::array<std::uint64_t, kSlots> hashes;
    std::array<int, kSlots> step_counts;   // changes of the producing step
    std::array<std::int64_t, kSlots> totals;  // activity after that step

    void put(int t, const PackedGrid& state, std::uint64_t hash, int count,
             std::int64_t total) {
        const int slot = t & kMask;
        states[slot] = state;
        hashes[slot] = hash;
        step_counts[slot] = count;
        totals[slot] = total;
    }

    // earliest step in [max(0, t-kSlots), t-1] holding this exact state
    int find(int t, const PackedGrid& state, std::uint64_t hash) const {
        const int lo = t >= kSlots ? t - kSlots : 0;
        for (int ts = t - 1; ts >= lo; --ts) {
            const int slot = ts & kMask;
            if (hashes[slot] == hash && states[slot] == state) {
                return ts;
            }
        }
        return -1;
    }
};

std::vector<std::uint8_t> changed_mask_of(const PackedGrid& a, const PackedGrid& b) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(a.side) * a.side, 0);
    for (int r = 0; r < a.side; ++r) {
        std::uint32_t diff = a.rows[r] ^ b.rows[r];
        while (diff != 0) {
            const int c = std::countr_zero(diff);
            mask[static_cast<std::size_t>(r) * a.side + c] = 1;
            diff &= diff - 1;
        }
    }
    return mask;
}

}  // namespace

void StepTable::rebuild(const RuleTable& rule) {
    const PairMaps& maps = pair_maps();
    for (unsigned w = 0; w < 4096; ++w) {
        pair[w] = static_cast<std::uint8_t>(rule[maps.left[w]] |
                                            (rule[maps.right[w]] << 1));
    }
    single = rule;
}

PackedGrid pack(const Lattice& lattice) {
    assert(lattice.side >= 1 && lattice.side <= kMaxPackedSide);
    PackedGrid grid;
    grid.side = lattice.side;
    for (int r = 0; r < lattice.side; ++r) {
        std::uint32_t word = 0;
        for (int c = 0; c < lattice.side; ++c) {
            word |= std::uint32_t{lattice.at(r, c)} << c;
        }
        grid.rows[r] = word;
    }
    return grid;
}

Lattice unpack(const PackedGrid& grid) {
    Lattice lattice(grid.side);
    for (int r = 0; r < grid.side; ++r) {
        for (int c = 0; c < grid.side; ++c) {
            lattice.at(r, c) = static_cast<std::uint8_t>((grid.rows[r] >> c) & 1u);
        }
    }
    return lattice;
}

int fast_step(const PackedGrid& current, PackedGrid& next, const StepTable& table) {
    return current.side == 28 ? step_body<28>(current, next, table)
                              : step_body<0>(current, next, table);
}

std::int64_t total_activity(const PackedGrid& initial, const StepTable& table,
                            int depth) {
    assert(depth >= 1);
    // reused per thread; every slot consulted at step t was written by this
    // call (steps 0..t-1), so stale contents are never read
    static thread_local CycleRing ring_storage;
    CycleRing* const ring = &ring_storage;
    PackedGrid prev = initial;
    PackedGrid cur{};
    ring->put(0, initial, grid_hash(initial), 0, 0);
    std::int64_t total = 0;
    for (int t = 1; t <= depth; ++t) {
        const int c = fast_step(prev, cur, table);
        total += c;
        if (c == 0) {
            return total;  // fixed point; the rest of the trajectory is silent
        }
        const std::uint64_t h = grid_hash(cur);
        const int ts = ring->find(t, cur, h);
        if (ts >= 0) {
            // state recurred: period p, repeat analytically to depth
            const int p = t - ts;
            const std::int64_t cycle_activity = total - ring->totals[ts & CycleRing::kMask];
            const std::int64_t remaining = depth - t;
            total += (remaining / p) * cycle_activity;
            const int rem = static_cast<int>(remaining % p);
            for (int i = 1; i <= rem; ++i) {
                total += ring->step_counts[(ts + i) & CycleRing::kMask];
            }
            return total;
        }
        ring->put(t, cur, h, c, total);
        std::swap(prev, cur);
    }
    return total;
}

StepResult step(const Lattice& lattice, const RuleTable& rule) {
    if (lattice.side > kMaxPackedSide) {
        return reference_step(lattice, rule);
    }
    const StepTable table(rule);
    const PackedGrid cur = pack(lattice);
    PackedGrid next{};
    StepResult result;
    result.changed = fast_step(cur, next, table);
    result.lattice = unpack(next);
    result.changed_mask = changed_mask_of(cur, next);
    return result;
}

StepResult reference_step(const Lattice& lattice, const RuleTable& rule) {
    StepResult result;
    result.lattice = Lattice(lattice.side);
    result.changed_mask.assign(static_cast<std::size_t>(lattice.size()), 0);
    for (int r = 0; r < lattice.side; ++r) {
        for (int c = 0; c < lattice.side; ++c) {
            const std::uint8_t next = rule[neighborhood_index(lattice, r, c)];
            result.lattice.at(r, c) = next;
            if (next != lattice.at(r, c)) {
                result.changed_mask[lattice.index(r, c)] = 1;
                ++result.changed;
            }
        }
    }
    return result;
}

namespace {

TrajectoryResult run_trajectory_generic(const Lattice& initial, const RuleTable& rule,
                                        int depth, bool record_snapshots) {
    TrajectoryResult res;
    res.per_step_activity.reserve(depth);
    if (record_snapshots) {
        res.snapshots.reserve(depth + 1);
        res.snapshots.push_back(
            {initial, std::vector<std::uint8_t>(initial.size(), 0)});
    }
    Lattice cur = initial;
    for (int t = 1; t <= depth; ++t) {
        StepResult s = reference_step(cur, rule);
        res.per_step_activity.push_back(s.changed);
        res.total_activity += s.changed;
        if (record_snapshots) {
            res.snapshots.push_back({s.lattice, std::move(s.changed_mask)});
        }
        cur = std::move(s.lattice);
    }
    res.final_lattice = std::move(cur);
    return res;
}

}  // namespace

TrajectoryResult run_trajectory(const Lattice& initial, const RuleTable& rule,
                                int depth, bool record_snapshots) {
    if (depth < 1) {
        throw std::invalid_argument("run_trajectory: depth must be >= 1");
    }
    if (initial.side > kMaxPackedSide) {
        return run_trajectory_generic(initial, rule, depth, record_snapshots);
    }

    TrajectoryResult res;
    res.per_step_activity.reserve(depth);
    const StepTable table(rule);
    const double n_cells = static_cast<double>(initial.size());

    if (record_snapshots) {
        res.snapshots.reserve(depth + 1);
        res.snapshots.push_back(
            {initial, std::vector<std::uint8_t>(initial.size(), 0)});
        PackedGrid a = pack(initial);
        PackedGrid b{};
        for (int t = 1; t <= depth; ++t) {
            const int ch = fast_step(a, b, table);
            res.per_step_activity.push_back(ch);
            res.total_activity += ch;
            res.snapshots.push_back({unpack(b), changed_mask_of(a, b)});
            std::swap(a, b);
        }
        res.final_lattice = unpack(a);
    } else {
        static thread_local CycleRing ring_storage;
        CycleRing* const ring = &ring_storage;
        PackedGrid prev = pack(initial);
        PackedGrid cur{};
        ring->put(0, prev, grid_hash(prev), 0, 0);
        bool closed = false;
        for (int t = 1; t <= depth; ++t) {
            const int ch = fast_step(prev, cur, table);
            res.per_step_activity.push_back(ch);
            res.total_activity += ch;
            if (ch == 0) {
                res.per_step_activity.insert(res.per_step_activity.end(),
                                             depth - t, 0);
                res.final_lattice = unpack(cur);
                closed = true;
                break;
            }
            const std::uint64_t h = grid_hash(cur);
            const int ts = ring->find(t, cur, h);
            if (ts >= 0) {
                const int p = t - ts;
                // steps t+1, t+2, ... replay the recorded cycle counts; the
                // count for step t itself is not in the ring yet
                for (int i = 1; i <= depth - t; ++i) {
                    const int s = ts + 1 + (i - 1) % p;
                    const int c2 =
                        s == t ? ch : ring->step_counts[s & CycleRing::kMask];
                    res.per_step_activity.push_back(c2);
                    res.total_activity += c2;
                }
                const int final_step = ts + (depth - ts) % p;
                res.final_lattice =
                    unpack(ring->states[final_step & CycleRing::kMask]);
                closed = true;
                break;
            }
            ring->put(t, cur, h, ch, res.total_activity);
            std::swap(prev, cur);
        }
        if (!closed) {
            res.final_lattice = unpack(prev);  // prev holds the last state
        }
    }

    res.intensive_activity =
        static_cast<double>(res.total_activity) / (n_cells * depth);
    return res;
}

}  // namespace cac
