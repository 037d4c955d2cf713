#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "overgaze/gridworld/types.hpp"

namespace og::gridworld {

// A kitchen grid. Tile characters: 'X' counter, ' ' floor, 'O' onion
// dispenser, 'D' dish dispenser, 'P' pot, 'S' serving window, '1'/'2'
// spawn points (floor).
class Layout {
public:
    std::string name;
    int rows = 0;
    int cols = 0;
    std::vector<TileKind> tiles;  // row-major
    std::array<Coord, 2> spawns{};

    TileKind at(Coord p) const { return tiles[static_cast<size_t>(p.r) * cols + p.c]; }
    bool in_bounds(Coord p) const { return p.r >= 0 && p.r < rows && p.c >= 0 && p.c < cols; }
    bool is_floor(Coord p) const { return in_bounds(p) && at(p) == TileKind::Floor; }

    std::vector<Coord> tiles_of(TileKind k) const;
};

// Parses and validates: rectangular, fully enclosed by non-floor tiles,
// exactly two spawns, and from each spawn at least one dispenser of each
// kind, one pot and one serving window adjacent to reachable floor.
Layout parse_layout(const std::string& text, const std::string& name);

Layout load_layout_file(const std::filesystem::path& path);

// The three bundled layouts: asymmetric_advantages, coordination_ring,
// counter_circuit. Throws ConfigError for unknown names.
const Layout& builtin_layout(const std::string& name);
std::vector<std::string> builtin_layout_names();

// The ASCII text of a bundled layout (same bytes as data/layouts/*.layout).
const std::string& builtin_layout_text(const std::string& name);

}  // namespace og::gridworld
