#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <vector>

namespace cac {

// Binary cell state on an L x L torus, row-major. Cells are 0 or 1;
// neighbor lookups wrap modulo L in both axes.
struct Lattice {
    int side = 28;
    std::vector<std::uint8_t> cells;

    Lattice() : Lattice(28) {}
    explicit Lattice(int L) : side(L), cells(static_cast<std::size_t>(L) * L, 0) {
        assert(L >= 1);
    }

    int size() const { return side * side; }  // N = L^2

    std::uint8_t& at(int r, int c) { return cells[index(r, c)]; }
    std::uint8_t at(int r, int c) const { return cells[index(r, c)]; }

    std::size_t index(int r, int c) const {
        assert(r >= 0 && r < side && c >= 0 && c < side);
        return static_cast<std::size_t>(r) * side + c;
    }

    int wrap(int x) const {
        x %= side;
        return x < 0 ? x + side : x;
    }

    bool operator==(const Lattice&) const = default;
};

// 512-entry lookup from a Moore-neighborhood bit pattern to the next
// center-cell state. Entries are 0 or 1.
using RuleTable = std::array<std::uint8_t, 512>;

// Bit order of the neighborhood index: row-major over the 3x3 block,
// (-1,-1) = bit 0, (-1,0) = bit 1, ..., (0,0) = bit 4, ..., (+1,+1) = bit 8.
inline int neighborhood_index(const Lattice& lat, int row, int col) {
    assert(row >= 0 && row < lat.side && col >= 0 && col < lat.side);
    int idx = 0;
    int p = 0;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc, ++p) {
            idx |= int(lat.at(lat.wrap(row + dr), lat.wrap(col + dc))) << p;
        }
    }
    return idx;
}

// Identity table: entry i maps to the center bit of i, so one step leaves
// any lattice unchanged.
inline RuleTable identity_rule_table() {
    RuleTable t;
    for (int i = 0; i < 512; ++i) {
        t[i] = static_cast<std::uint8_t>((i >> 4) & 1);
    }
    return t;
}

}  // namespace cac
