#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lvsim/rng.hpp"

namespace lvsim {

struct NodeId {
    std::uint32_t value{};

    constexpr auto operator<=>(const NodeId&) const = default;
    constexpr std::size_t index() const { return value; }
};

inline constexpr NodeId kSink{0};

/// Directed link: `tx` transmits, `rx` receives.
struct Link {
    NodeId tx;
    NodeId rx;

    constexpr auto operator<=>(const Link&) const = default;
    constexpr bool shares_node(const Link& o) const {
        return tx == o.tx || tx == o.rx || rx == o.tx || rx == o.rx;
    }
};

using LinkIndex = std::size_t;

struct Point {
    double x{};
    double y{};
    bool operator==(const Point&) const = default;
};

/**
 * Log-distance path loss with per-link Gaussian shadowing, mapped to a PDR
 * through a piecewise-linear RSSI waterfall. Receptions below the
 * sensitivity have PDR 0.
 */
struct RadioModel {
    double tx_power_dbm = 0.0;
    double reference_loss_db = 40.05;  // free-space loss at 1 m, 2.4 GHz
    double reference_distance_m = 1.0;
    double path_loss_exponent = 2.0;
    double shadowing_sigma_db = 4.0;
    double sensitivity_dbm = -97.0;
    /// (rssi dBm, pdr) pairs with strictly increasing rssi.
    std::vector<std::pair<double, double>> waterfall = default_waterfall();

    static std::vector<std::pair<double, double>> default_waterfall();

    double rssi(double distance_m, double shadow_db) const;
    double pdr_from_rssi(double rssi_dbm) const;
    double pdr(double distance_m, double shadow_db) const {
        return pdr_from_rssi(rssi(distance_m, shadow_db));
    }
};

/// PDR of a link of the given length with freshly sampled shadowing.
double link_pdr_from_distance(double distance_m, Rng& rng, const RadioModel& radio = {});

class Topology {
public:
    Topology() = default;
    /// `pdr` is a dense row-major n*n matrix; it must be symmetric.
    Topology(double area_side, std::vector<Point> positions, std::vector<double> pdr);

    std::size_t size() const { return positions_.size(); }
    double area_side() const { return area_side_; }
    const std::vector<Point>& positions() const { return positions_; }
    const std::vector<double>& pdr_matrix() const { return pdr_; }

    double pdr(NodeId a, NodeId b) const { return pdr_[a.index() * size() + b.index()]; }
    bool are_neighbors(NodeId a, NodeId b) const { return a != b && pdr(a, b) > 0.0; }
    const std::vector<NodeId>& neighbors(NodeId n) const { return neighbors_[n.index()]; }
    std::size_t reliable_neighbor_count(NodeId n, double min_pdr) const;

    bool operator==(const Topology&) const = default;

private:
    double area_side_ = 0.0;
    std::vector<Point> positions_;
    std::vector<double> pdr_;
    std::vector<std::vector<NodeId>> neighbors_;
};

struct DeploymentParams {
    std::size_t n_nodes = 50;
    double area_side = 2000.0;
    std::size_t min_neighbors = 3;
    double min_pdr = 0.5;
    std::size_t max_relocations = 1000;
    RadioModel radio{};
};

/// Uniform placement with relocation until every non-sink node has
/// min(min_neighbors, n-1) neighbors at PDR >= min_pdr and the reliable
/// graph is connected. Throws std::runtime_error when the relocation budget
/// is exhausted.
Topology generate_topology(const DeploymentParams& params, std::uint64_t seed);

struct RoutingTree {
    /// Per node, parents ordered best-PDR first; empty for the sink.
    std::vector<std::vector<NodeId>> parents;
    std::vector<std::uint32_t> rank;

    NodeId preferred(NodeId n) const { return parents[n.index()].front(); }
    bool operator==(const RoutingTree&) const = default;
};

RoutingTree build_routing(const Topology& topology, std::size_t max_parents, std::uint64_t seed,
                          double min_pdr = 0.5);

/// Every child->parent link, ascending by (tx, rx).
std::vector<Link> routing_links(const RoutingTree& routing);

enum class ConflictClass : std::uint8_t { None = 0, Primary = 1, Secondary = 2 };

/// Pairwise interference classes over a fixed link table.
class ConflictSets {
public:
    struct Entry {
        LinkIndex other;
        ConflictClass cls;
    };

    ConflictSets() = default;
    ConflictSets(const Topology& topology, std::vector<Link> links);

    std::size_t link_count() const { return links_.size(); }
    const std::vector<Link>& links() const { return links_; }
    const Link& link(LinkIndex i) const { return links_[i]; }
    std::optional<LinkIndex> find(const Link& l) const;

    ConflictClass between(LinkIndex a, LinkIndex b) const {
        return static_cast<ConflictClass>(matrix_[a * links_.size() + b]);
    }
    const std::vector<Entry>& of(LinkIndex l) const { return sets_[l]; }

private:
    std::vector<Link> links_;
    std::vector<std::uint8_t> matrix_;
    std::vector<std::vector<Entry>> sets_;
};

/// Classification rule for a single pair; a == b yields None.
ConflictClass classify_conflict(const Topology& topology, const Link& a, const Link& b);

/// Conflict sets over every directed neighbor pair of the topology.
ConflictSets conflict_sets(const Topology& topology);

void to_json(nlohmann::json& j, const Topology& t);
void to_json(nlohmann::json& j, const RoutingTree& r);

struct TopologyDocument {
    Topology topology;
    std::optional<RoutingTree> routing;
};

nlohmann::json topology_document(const Topology& topology, const RoutingTree* routing);
TopologyDocument parse_topology_document(const nlohmann::json& j);
void save_topology_json(const std::string& path, const Topology& topology,
                        const RoutingTree* routing);
TopologyDocument load_topology_json(const std::string& path);

}  // namespace lvsim
