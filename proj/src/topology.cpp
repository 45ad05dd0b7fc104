#include "lvsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lvsim {

std::vector<std::pair<double, double>> RadioModel::default_waterfall() {
    // Measured 2.4 GHz PDR-vs-RSSI curve; the endpoints are anchors.
    return {{-97.0, 0.0000}, {-96.0, 0.1494}, {-95.0, 0.2340}, {-94.0, 0.4071},
            {-93.0, 0.6359}, {-92.0, 0.6866}, {-91.0, 0.7476}, {-90.0, 0.8603},
            {-89.0, 0.8702}, {-88.0, 0.9324}, {-87.0, 0.9427}, {-86.0, 0.9562},
            {-85.0, 0.9611}, {-84.0, 0.9739}, {-83.0, 0.9745}, {-82.0, 0.9844},
            {-81.0, 0.9854}, {-80.0, 0.9903}, {-79.0, 1.0000}};
}

double RadioModel::rssi(double distance_m, double shadow_db) const {
    const double d = std::max(distance_m, reference_distance_m);
    const double loss = reference_loss_db +
                        10.0 * path_loss_exponent * std::log10(d / reference_distance_m) +
                        shadow_db;
    return tx_power_dbm - loss;
}

double RadioModel::pdr_from_rssi(double rssi_dbm) const {
    if (rssi_dbm < sensitivity_dbm || waterfall.empty()) return 0.0;
    if (rssi_dbm <= waterfall.front().first) return waterfall.front().second;
    if (rssi_dbm >= waterfall.back().first) return waterfall.back().second;
    auto hi = std::upper_bound(waterfall.begin(), waterfall.end(), rssi_dbm,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = std::prev(hi);
    const double t = (rssi_dbm - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

double link_pdr_from_distance(double distance_m, Rng& rng, const RadioModel& radio) {
    if (distance_m < 0.0) throw std::invalid_argument("negative distance");
    const double shadow = radio.shadowing_sigma_db * rng.normal();
    return radio.pdr(distance_m, shadow);
}

Topology::Topology(double area_side, std::vector<Point> positions, std::vector<double> pdr)
    : area_side_(area_side), positions_(std::move(positions)), pdr_(std::move(pdr)) {
    const std::size_t n = positions_.size();
    if (pdr_.size() != n * n) throw std::invalid_argument("pdr matrix size mismatch");
    neighbors_.assign(n, {});
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            const double v = pdr_[i * n + j];
            if (v < 0.0 || v > 1.0) throw std::invalid_argument("pdr outside [0,1]");
            if (v != pdr_[j * n + i]) throw std::invalid_argument("pdr matrix not symmetric");
            if (i != j && v > 0.0) neighbors_[i].push_back(NodeId{j});
        }
    }
}

std::size_t Topology::reliable_neighbor_count(NodeId n, double min_pdr) const {
    return static_cast<std::size_t>(std::count_if(
        neighbors_[n.index()].begin(), neighbors_[n.index()].end(),
        [&](NodeId m) { return pdr(n, m) >= min_pdr; }));
}

namespace {

// Shadowing is a pure function of (seed, pair) so relocating a node does not
// disturb any other random stream.
double pair_shadow_db(std::uint64_t seed, std::size_t a, std::size_t b, double sigma) {
    if (a > b) std::swap(a, b);
    const std::uint64_t key = mix64(seed ^ mix64((static_cast<std::uint64_t>(a) << 32) | b));
    const double u1 = (static_cast<double>(mix64(key) >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(mix64(key ^ 0x5bd1e995ULL) >> 11) * 0x1.0p-53;
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

class Placement {
public:
    Placement(const DeploymentParams& p, std::uint64_t seed)
        : params_(p), shadow_seed_(derive_seed(seed, 0, "shadowing")),
          rng_(derive_seed(seed, 0, "placement")), pos_(p.n_nodes), pdr_(p.n_nodes * p.n_nodes) {}

    double link_pdr(std::size_t a, const Point& pa, std::size_t b) const {
        const double d = std::hypot(pa.x - pos_[b].x, pa.y - pos_[b].y);
        return params_.radio.pdr(d, pair_shadow_db(shadow_seed_, a, b, params_.radio.shadowing_sigma_db));
    }

    Point random_point() {
        const double x = rng_.uniform(0.0, params_.area_side);
        const double y = rng_.uniform(0.0, params_.area_side);
        return {x, y};
    }

    void put(std::size_t v, const Point& p, std::size_t placed) {
        const std::size_t n = params_.n_nodes;
        pos_[v] = p;
        for (std::size_t u = 0; u < placed; ++u) {
            if (u == v) continue;
            const double q = link_pdr(v, p, u);
            pdr_[v * n + u] = q;
            pdr_[u * n + v] = q;
        }
        pdr_[v * n + v] = 0.0;
    }

    std::size_t reliable_count(std::size_t v, std::size_t placed) const {
        std::size_t c = 0;
        for (std::size_t u = 0; u < placed; ++u)
            if (u != v && pdr_[v * params_.n_nodes + u] >= params_.min_pdr) ++c;
        return c;
    }

    bool connected() const {
        const std::size_t n = params_.n_nodes;
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> frontier{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!frontier.empty()) {
            const std::size_t u = frontier.front();
            frontier.pop_front();
            for (std::size_t v = 0; v < n; ++v) {
                if (!seen[v] && v != u && pdr_[u * n + v] >= params_.min_pdr) {
                    seen[v] = true;
                    ++count;
                    frontier.push_back(v);
                }
            }
        }
        return count == n;
    }

    void place_all() {
        const std::size_t n = params_.n_nodes;
        put(0, random_point(), 0);
        for (std::size_t v = 1; v < n; ++v) {
            const std::size_t need = std::min(params_.min_neighbors, v);
            bool ok = false;
            for (std::size_t attempt = 0; attempt < params_.max_relocations && !ok; ++attempt) {
                put(v, random_point(), v);
                ok = reliable_count(v, v) >= need;
            }
            if (!ok) fail(v);
        }
        repair();
    }

    Topology finish() { return Topology(params_.area_side, std::move(pos_), std::move(pdr_)); }

private:
    // Early nodes were placed against fewer predecessors; move any that are
    // still short of neighbors without breaking the others.
    void repair() {
        const std::size_t n = params_.n_nodes;
        const std::size_t target = std::min(params_.min_neighbors, n - 1);
        for (std::size_t pass = 0; pass <= n; ++pass) {
            bool clean = true;
            for (std::size_t v = 1; v < n; ++v) {
                if (reliable_count(v, n) >= target) continue;
                clean = false;
                std::vector<bool> satisfied(n);
                for (std::size_t u = 1; u < n; ++u) satisfied[u] = reliable_count(u, n) >= target;
                const Point old = pos_[v];
                bool moved = false;
                for (std::size_t attempt = 0; attempt < params_.max_relocations; ++attempt) {
                    put(v, random_point(), n);
                    if (reliable_count(v, n) < target) continue;
                    bool breaks = false;
                    for (std::size_t u = 1; u < n && !breaks; ++u)
                        breaks = satisfied[u] && reliable_count(u, n) < target;
                    if (!breaks && connected()) {
                        moved = true;
                        break;
                    }
                }
                if (!moved) {
                    put(v, old, n);
                    fail(v);
                }
            }
            if (clean && connected()) return;
        }
        throw std::runtime_error("topology generation: deployment constraint did not converge");
    }

    [[noreturn]] void fail(std::size_t v) const {
        std::ostringstream os;
        os << "topology generation: node " << v << " could not reach " << params_.min_neighbors
           << " neighbors with PDR >= " << params_.min_pdr << " within "
           << params_.max_relocations << " relocations (area side " << params_.area_side << " m)";
        throw std::runtime_error(os.str());
    }

    const DeploymentParams& params_;
    std::uint64_t shadow_seed_;
    Rng rng_;
    std::vector<Point> pos_;
    std::vector<double> pdr_;
};

}  // namespace

Topology generate_topology(const DeploymentParams& params, std::uint64_t seed) {
    if (params.n_nodes < 2) throw std::invalid_argument("need at least two nodes");
    if (!(params.min_pdr > 0.0 && params.min_pdr <= 1.0))
        throw std::invalid_argument("min_pdr must be in (0, 1]");
    if (params.area_side <= 0.0) throw std::invalid_argument("area side must be positive");
    Placement placement(params, seed);
    placement.place_all();
    return placement.finish();
}

RoutingTree build_routing(const Topology& topology, std::size_t max_parents, std::uint64_t seed,
                          double min_pdr) {
    if (max_parents == 0) throw std::invalid_argument("max_parents must be positive");
    const std::size_t n = topology.size();
    constexpr auto kUnranked = std::numeric_limits<std::uint32_t>::max();
    RoutingTree tree;
    tree.rank.assign(n, kUnranked);
    tree.parents.assign(n, {});
    tree.rank[0] = 0;
    std::deque<NodeId> frontier{kSink};
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId v : topology.neighbors(u)) {
            if (tree.rank[v.index()] == kUnranked && topology.pdr(u, v) >= min_pdr) {
                tree.rank[v.index()] = tree.rank[u.index()] + 1;
                frontier.push_back(v);
            }
        }
    }

    Rng rng(derive_seed(seed, 0, "routing"));
    for (std::uint32_t i = 1; i < n; ++i) {
        const NodeId v{i};
        if (tree.rank[i] == kUnranked) {
            throw std::runtime_error("routing: node " + std::to_string(i) +
                                     " is not connected to the sink over reliable links");
        }
        std::vector<NodeId> candidates;
        for (NodeId u : topology.neighbors(v))
            if (tree.rank[u.index()] < tree.rank[i] && topology.pdr(u, v) >= min_pdr)
                candidates.push_back(u);
        // Seeded shuffle then stable sort: equal-PDR ties depend on the seed only.
        for (std::size_t k = candidates.size(); k > 1; --k)
            std::swap(candidates[k - 1], candidates[rng.below(k)]);
        std::stable_sort(candidates.begin(), candidates.end(), [&](NodeId a, NodeId b) {
            return topology.pdr(v, a) > topology.pdr(v, b);
        });
        if (candidates.size() > max_parents) candidates.resize(max_parents);
        tree.parents[i] = std::move(candidates);
    }
    return tree;
}

std::vector<Link> routing_links(const RoutingTree& routing) {
    std::vector<Link> links;
    for (std::uint32_t i = 0; i < routing.parents.size(); ++i)
        for (NodeId p : routing.parents[i]) links.push_back({NodeId{i}, p});
    std::sort(links.begin(), links.end());
    return links;
}

ConflictClass classify_conflict(const Topology& topology, const Link& a, const Link& b) {
    if (a == b) return ConflictClass::None;
    if (a.shares_node(b)) return ConflictClass::Primary;
    // b interferes with a iff b's receiver hears a's sender or a's receiver hears b's sender.
    if (topology.are_neighbors(b.rx, a.tx) || topology.are_neighbors(b.tx, a.rx))
        return ConflictClass::Secondary;
    return ConflictClass::None;
}

ConflictSets::ConflictSets(const Topology& topology, std::vector<Link> links)
    : links_(std::move(links)) {
    const std::size_t n = links_.size();
    matrix_.assign(n * n, 0);
    sets_.assign(n, {});
    for (LinkIndex a = 0; a < n; ++a) {
        for (LinkIndex b = 0; b < n; ++b) {
            const ConflictClass c = classify_conflict(topology, links_[a], links_[b]);
            matrix_[a * n + b] = static_cast<std::uint8_t>(c);
            if (c != ConflictClass::None) sets_[a].push_back({b, c});
        }
    }
}

std::optional<LinkIndex> ConflictSets::find(const Link& l) const {
    for (LinkIndex i = 0; i < links_.size(); ++i)
        if (links_[i] == l) return i;
    return std::nullopt;
}

ConflictSets conflict_sets(const Topology& topology) {
    std::vector<Link> links;
    for (std::uint32_t i = 0; i < topology.size(); ++i)
        for (NodeId j : topology.neighbors(NodeId{i})) links.push_back({NodeId{i}, j});
    return ConflictSets(topology, std::move(links));
}

void to_json(nlohmann::json& j, const Topology& t) {
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& p : t.positions()) pos.push_back({p.x, p.y});
    nlohmann::json pdr = nlohmann::json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < t.size(); ++k) row.push_back(t.pdr_matrix()[i * t.size() + k]);
        pdr.push_back(std::move(row));
    }
    j = {{"area_side", t.area_side()}, {"positions", pos}, {"pdr", pdr}};
}

void to_json(nlohmann::json& j, const RoutingTree& r) {
    nlohmann::json parents = nlohmann::json::array();
    for (const auto& ps : r.parents) {
        nlohmann::json row = nlohmann::json::array();
        for (NodeId p : ps) row.push_back(p.value);
        parents.push_back(std::move(row));
    }
    j = parents;
}

nlohmann::json topology_document(const Topology& topology, const RoutingTree* routing) {
    nlohmann::json j = topology;
    if (routing != nullptr) j["parents"] = *routing;
    return j;
}

TopologyDocument parse_topology_document(const nlohmann::json& j) {
    std::vector<Point> pos;
    for (const auto& p : j.at("positions")) pos.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    const std::size_t n = pos.size();
    const auto& rows = j.at("pdr");
    if (rows.size() != n) throw std::runtime_error("topology json: pdr has wrong row count");
    std::vector<double> pdr;
    pdr.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw std::runtime_error("topology json: pdr has wrong column count");
        for (const auto& v : row) pdr.push_back(v.get<double>());
    }
    TopologyDocument doc{Topology(j.at("area_side").get<double>(), std::move(pos), std::move(pdr)),
                         std::nullopt};
    if (j.contains("parents")) {
        RoutingTree r;
        const auto& ps = j.at("parents");
        if (ps.size() != n) throw std::runtime_error("topology json: parents has wrong length");
        r.parents.resize(n);
        r.rank.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& p : ps[i]) {
                const NodeId parent{p.get<std::uint32_t>()};
                if (parent.index() >= n || !doc.topology.are_neighbors(NodeId{static_cast<std::uint32_t>(i)}, parent))
                    throw std::runtime_error("topology json: parent is not a neighbor");
                r.parents[i].push_back(parent);
            }
            if (i != 0 && r.parents[i].empty())
                throw std::runtime_error("topology json: node without parent");
        }
        // rank = 1 + max parent rank; anything left unranked sits on a cycle.
        constexpr auto kUnranked = std::numeric_limits<std::uint32_t>::max();
        std::fill(r.rank.begin() + 1, r.rank.end(), kUnranked);
        for (std::size_t round = 0; round < n; ++round) {
            for (std::size_t i = 1; i < n; ++i) {
                std::uint32_t worst = 0;
                for (NodeId p : r.parents[i]) worst = std::max(worst, r.rank[p.index()]);
                if (worst != kUnranked) r.rank[i] = worst + 1;
            }
        }
        if (std::find(r.rank.begin(), r.rank.end(), kUnranked) != r.rank.end())
            throw std::runtime_error("topology json: routing parents contain a cycle");
        doc.routing = std::move(r);
    }
    return doc;
}

void save_topology_json(const std::string& path, const Topology& topology,
                        const RoutingTree* routing) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << topology_document(topology, routing).dump(1) << '\n';
}

TopologyDocument load_topology_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return parse_topology_document(nlohmann::json::parse(in));
}

}  // namespace lvsim
