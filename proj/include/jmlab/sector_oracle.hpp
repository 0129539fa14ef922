#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "jmlab/sector_optics.hpp"

namespace jmlab {

// Brute-force shortest paths in the sector metric on a polar grid graph.
//
// Grid: rings uniform in rho up to rho_max (the ring count is rounded up
// so that rho = 1 lands exactly on a ring when rho_max = 1.5), `resolution`
// angles uniform in [0, opening], plus a single vertex node joined to the
// innermost ring by radial edges. Each node connects to every node within
// a k-ring of index offsets (k = neighbor_order), coprime offsets only;
// larger k shrinks the angular metrication error. Edge weights are exact
// sector-split weighted lengths of the straight edge.
struct OracleParams {
    int resolution = 1000;    // >= 100
    int neighbor_order = 8;   // >= 1
    double rho_max = 1.5;
};

struct OracleResult {
    double length;
    std::vector<std::array<double, 2>> path;  // developed coordinates, a to b
    bool hits_vertex;
    std::size_t expanded;  // settled nodes, for performance reporting
};

// Shortest grid path between two points of the wedge (each snapped to the
// nearest grid node). Runs A* with the admissible lower bound
// min_index * Euclidean distance, which returns exact graph distances.
// Endpoints outside the wedge or beyond rho_max are errors.
OracleResult oracle_shortest_path(const SectorMetric& metric, std::array<double, 2> a,
                                  std::array<double, 2> b, const OracleParams& params = {});

} // namespace jmlab
