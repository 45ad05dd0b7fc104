#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <deque>
#include <string>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "lvsim/topology.hpp"

using namespace lvsim;
using namespace lvsim::testing;

TEST_SUITE("topology") {

TEST_CASE("path loss at the waterfall midpoint") {
    RadioModel radio;
    // rssi = -40.05 - 20 log10(d) = -90.5 dBm halfway between the -91 and -90 anchors.
    const double d = std::pow(10.0, (90.5 - 40.05) / 20.0);
    CHECK(radio.rssi(d, 0.0) == doctest::Approx(-90.5).epsilon(1e-12));
    CHECK(radio.pdr(d, 0.0) == doctest::Approx((0.7476 + 0.8603) / 2.0).epsilon(1e-12));
}

TEST_CASE("pdr below sensitivity is zero and saturates near the transmitter") {
    RadioModel radio;
    CHECK(radio.pdr_from_rssi(-97.5) == 0.0);
    CHECK(radio.pdr_from_rssi(-70.0) == 1.0);
    CHECK(radio.pdr(1.0, 0.0) == 1.0);
    CHECK(radio.pdr(5000.0, 0.0) == 0.0);
    // Shadowing adds loss.
    CHECK(radio.pdr(300.0, 6.0) < radio.pdr(300.0, 0.0));
}

TEST_CASE("sampled link pdr is deterministic per stream") {
    Rng a(9), b(9);
    for (double d : {50.0, 200.0, 350.0, 600.0})
        CHECK(link_pdr_from_distance(d, a) == link_pdr_from_distance(d, b));
    Rng c(1);
    CHECK_THROWS(link_pdr_from_distance(-1.0, c));
}

TEST_CASE("topology rejects asymmetric matrices") {
    std::vector<double> pdr{0.0, 0.5, 0.4, 0.0};
    CHECK_THROWS_AS(Topology(10.0, {{0, 0}, {1, 1}}, pdr), std::invalid_argument);
}

TEST_CASE("generated deployments meet the neighbor constraint") {
    DeploymentParams params;
    params.n_nodes = 30;
    params.area_side = 1500.0;
    for (std::uint64_t seed : {1, 2, 3}) {
        Topology t;
        try {
            t = generate_topology(params, seed);
        } catch (const std::runtime_error&) {
            continue;
        }
        REQUIRE(t.size() == 30);
        for (std::uint32_t v = 1; v < t.size(); ++v) CHECK(t.reliable_neighbor_count(NodeId{v}, 0.5) >= 3);
        for (const auto& p : t.positions()) {
            CHECK(p.x >= 0.0);
            CHECK(p.x <= 1500.0);
            CHECK(p.y >= 0.0);
            CHECK(p.y <= 1500.0);
        }
        CHECK(generate_topology(params, seed) == t);
        const RoutingTree r = build_routing(t, 3, seed);
        for (std::uint32_t v = 1; v < t.size(); ++v) {
            const auto& ps = r.parents[v];
            REQUIRE(!ps.empty());
            CHECK(ps.size() <= 3);
            for (std::size_t k = 0; k < ps.size(); ++k) {
                CHECK(r.rank[ps[k].index()] < r.rank[v]);
                CHECK(t.pdr(NodeId{v}, ps[k]) >= 0.5);
                if (k > 0) CHECK(t.pdr(NodeId{v}, ps[k - 1]) >= t.pdr(NodeId{v}, ps[k]));
            }
        }
    }
}

TEST_CASE("impossible deployment reports failure") {
    DeploymentParams params;
    params.n_nodes = 10;
    params.area_side = 1.0e6;
    params.max_relocations = 20;
    CHECK_THROWS_AS(generate_topology(params, 5), std::runtime_error);
}

TEST_CASE("routing ranks are hop counts over reliable links") {
    // 0 - 1 - 3, 0 - 2 - 3, 3 - 4; the 0-4 link is too weak to route over.
    const Topology t = make_topology(5, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 0.9}, {2, 3, 0.8}, {3, 4, 1.0},
                                         {0, 4, 0.3}});
    const RoutingTree r = build_routing(t, 3, 1);
    CHECK(r.rank == std::vector<std::uint32_t>{0, 1, 1, 2, 3});
    CHECK(r.parents[3] == std::vector<NodeId>{NodeId{1}, NodeId{2}});
    CHECK(r.preferred(NodeId{4}) == NodeId{3});
    CHECK(routing_links(r) ==
          std::vector<Link>{link(1, 0), link(2, 0), link(3, 1), link(3, 2), link(4, 3)});
    CHECK(build_routing(t, 1, 1).parents[3].size() == 1);
}

TEST_CASE("equal-pdr parent ties are broken by the seed only") {
    const Topology t = make_topology(4, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 0.9}, {2, 3, 0.9}});
    CHECK(build_routing(t, 3, 77) == build_routing(t, 3, 77));
    bool saw_one = false, saw_two = false;
    for (std::uint64_t s = 0; s < 32; ++s) {
        const NodeId p = build_routing(t, 3, s).preferred(NodeId{3});
        saw_one = saw_one || p == NodeId{1};
        saw_two = saw_two || p == NodeId{2};
    }
    CHECK(saw_one);
    CHECK(saw_two);
}

TEST_CASE("conflict classes") {
    // 0 sink; 1,2 its children; 3 under 1, 4 under 2, 5 under 3. 3 and 4 hear each other.
    const Topology t = make_topology(6, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 4, 1}, {3, 5, 1}, {3, 4, 0.2}});
    // Shared endpoint.
    CHECK(classify_conflict(t, link(3, 1), link(5, 3)) == ConflictClass::Primary);
    CHECK(classify_conflict(t, link(1, 0), link(2, 0)) == ConflictClass::Primary);
    // Node-disjoint: 4 (sender of 4>2) is a neighbor of 3 (receiver of 5>3).
    CHECK(classify_conflict(t, link(5, 3), link(4, 2)) == ConflictClass::Secondary);
    CHECK(classify_conflict(t, link(4, 2), link(5, 3)) == ConflictClass::Secondary);
    // 1 does not hear 4, and 2 does not hear 3.
    CHECK(classify_conflict(t, link(3, 1), link(4, 2)) == ConflictClass::None);
    CHECK(classify_conflict(t, link(5, 3), link(2, 0)) == ConflictClass::None);
    CHECK(classify_conflict(t, link(1, 0), link(1, 0)) == ConflictClass::None);

    const ConflictSets cs(t, {link(1, 0), link(2, 0), link(3, 1), link(4, 2), link(5, 3)});
    CHECK(cs.find(link(4, 2)) == 3);
    CHECK(!cs.find(link(0, 1)));
    for (LinkIndex a = 0; a < cs.link_count(); ++a)
        for (LinkIndex b = 0; b < cs.link_count(); ++b) CHECK(cs.between(a, b) == cs.between(b, a));
    CHECK(cs.of(0).size() == 3);  // 2>0 and 3>1 share a node; 5>3 ends at 3, a neighbor of 1
}

TEST_CASE("all-neighbor conflict table covers both directions of every edge") {
    const Topology t = make_topology(3, {{0, 1, 1}, {1, 2, 1}});
    const ConflictSets cs = conflict_sets(t);
    CHECK(cs.link_count() == 4);
    CHECK(cs.find(link(2, 1)).has_value());
    CHECK(cs.find(link(1, 2)).has_value());
}

TEST_CASE("topology json round trip") {
    DeploymentParams params;
    params.n_nodes = 8;
    params.area_side = 600.0;
    const Topology t = generate_topology(params, 4);
    const RoutingTree r = build_routing(t, 3, 4);
    const std::string path = std::string(LVSIM_TEST_TMP) + "/topo_roundtrip.json";
    save_topology_json(path, t, &r);
    const TopologyDocument back = load_topology_json(path);
    CHECK(back.topology == t);
    REQUIRE(back.routing.has_value());
    CHECK(*back.routing == r);
    std::remove(path.c_str());

    const auto bare = parse_topology_document(topology_document(t, nullptr));
    CHECK(bare.topology == t);
    CHECK(!bare.routing);
}

TEST_CASE("topology json rejects routing cycles") {
    auto doc = topology_document(make_topology(3, {{0, 1, 1}, {1, 2, 1}}), nullptr);
    doc["parents"] = nlohmann::json::array(
        {nlohmann::json::array(), nlohmann::json::array({2}), nlohmann::json::array({1})});
    CHECK_THROWS(parse_topology_document(doc));
}

}
