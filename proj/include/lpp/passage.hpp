#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lpp/field.hpp"

namespace lpp {

enum class Geometry { WeakWeak, StrictX, StrictY, StrictStrict };
enum class Convention { IncludeEndpoint, ExcludeEndpoint };

const char* geometry_name(Geometry g);
const char* convention_name(Convention c);

using LatticePoint = std::pair<std::int64_t, std::int64_t>;

struct PassageResult {
    double value = 0.0;
    LatticePoint target{0, 0};
    Geometry geometry = Geometry::WeakWeak;
    Convention convention = Convention::ExcludeEndpoint;
    std::optional<std::vector<LatticePoint>> path;
};

// Last-passage value to (m, n) from the origin.  Memory is one rolling
// frontier; weights are re-read from the counter-based field, never stored.
PassageResult last_passage(const WeightField& field, Geometry geometry,
                           std::int64_t m, std::int64_t n,
                           Convention convention = Convention::ExcludeEndpoint);

// As above but also reconstructs one optimal path (full-table DP; intended
// for small targets).  Ties prefer the horizontal predecessor.
PassageResult last_passage_with_path(const WeightField& field, Geometry geometry,
                                     std::int64_t m, std::int64_t n,
                                     Convention convention);

// Last-passage between two lattice points (weak-weak geometry), endpoint
// handling as in the origin version.
double last_passage_between(const WeightField& field, LatticePoint from,
                            LatticePoint to, Convention convention);

// Exhaustive-enumeration oracle on an explicit weight grid; grid[i][j] is
// the weight at column i, row j.  Refuses instances with more than
// `max_paths` admissible paths.
double brute_force_last_passage(const std::vector<std::vector<double>>& grid,
                                Geometry geometry, std::int64_t m,
                                std::int64_t n, Convention convention,
                                std::size_t max_paths = 1000000);

// Rolling-frontier DP on an explicit grid (reference implementation used in
// tests against both the oracle and the field version).
double grid_last_passage(const std::vector<std::vector<double>>& grid,
                         Geometry geometry, std::int64_t m, std::int64_t n,
                         Convention convention);

// T(floor(nx), floor(ny)) / n.
double scaled_estimate(const WeightField& field, Geometry geometry, double x,
                       double y, std::int64_t n,
                       Convention convention = Convention::ExcludeEndpoint);

}  // namespace lpp
