#pragma once

#include <tuple>
#include <vector>

#include "lvsim/topology.hpp"

namespace lvsim::testing {

struct Edge {
    std::uint32_t a;
    std::uint32_t b;
    double pdr;
};

inline Topology make_topology(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<double> pdr(n * n, 0.0);
    for (const auto& e : edges) pdr[e.a * n + e.b] = pdr[e.b * n + e.a] = e.pdr;
    std::vector<Point> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = {10.0 * static_cast<double>(i), 0.0};
    return Topology(100.0, pos, pdr);
}

inline Link link(std::uint32_t tx, std::uint32_t rx) { return {NodeId{tx}, NodeId{rx}}; }

}  // namespace lvsim::testing
