#include <doctest.h>

#include "helpers.hpp"
#include "lv_oracle.hpp"
#include "lvsim/schedule.hpp"
#include "lvsim/scheduling.hpp"

using namespace lvsim;
using namespace lvsim::testing;

TEST_SUITE("scheduling") {

TEST_CASE("weights") {
    CHECK(lv_weight(link(1, 0), link(2, 0), 16) == Weight{1, 1});
    CHECK(lv_weight(link(3, 1), link(4, 2), 16) == Weight{1, 16});
    CHECK(lv_weight(link(3, 1), link(4, 2), 5).value() == doctest::Approx(0.2));
}

TEST_CASE("hand-evaluated neighborhood: 14*15 / (14 + 52 + 45/5) = 2.8 -> 3") {
    const NeighborhoodView view{{1, 20, 0, ConflictClass::Primary},
                                {2, 32, 0, ConflictClass::Primary},
                                {3, 45, 0, ConflictClass::Secondary}};
    CHECK(lv_delta(14, 0, 0, 15, 5, view, false) == 3);
    CHECK(lv_delta(14, 0, 1, 15, 5, view, false) == 2);
    CHECK(lv_delta(14, 0, 5, 15, 5, view, false) == -2);
    CHECK(lv_target(14, 0, 15, 5, view, false) == 3);
    // Fully honored, every link of the neighborhood sees (75 / 15) - 1 = 4.
    CHECK(lv_projected_load(14, 0, 15, 5, view, false) == doctest::Approx(4.0));
}

TEST_CASE("empty queue releases everything; lone link takes the frame") {
    CHECK(lv_delta(0, 0, 7, 101, 16, {}, false) == -7);
    CHECK(lv_delta(0, 9, 7, 101, 16, {}, false) == -7);
    CHECK(lv_delta(0, 9, 7, 101, 16, {}, true) == 101 - 7);
    CHECK(lv_delta(5, 0, 0, 101, 16, {}, false) == 101);
}

TEST_CASE("ties round away from zero") {
    // 1 * 5 / (1 + 1) = 2.5 -> 3
    const NeighborhoodView view{{1, 1, 0, ConflictClass::Primary}};
    CHECK(lv_target(1, 0, 5, 4, view, false) == 3);
}

TEST_CASE("randomized instances match the fraction oracle exactly") {
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const auto S = static_cast<std::uint32_t>(1 + rng.below(200));
        const auto M = static_cast<std::uint32_t>(1 + rng.below(16));
        const std::uint64_t q = rng.below(4) == 0 ? 0 : rng.below(300);
        const std::uint64_t z = rng.below(50);
        const auto p = static_cast<std::uint32_t>(rng.below(S + 1));
        const bool use_z = rng.bernoulli(0.5);
        NeighborhoodView view;
        const std::size_t k = rng.below(12);
        for (std::size_t j = 0; j < k; ++j)
            view.push_back({j + 1, rng.below(300), rng.below(50),
                            rng.bernoulli(0.5) ? ConflictClass::Primary : ConflictClass::Secondary});
        INFO("instance " << i);
        REQUIRE(lv_delta(q, z, p, S, M, view, use_z) == oracle_delta(q, z, p, S, M, view, use_z));
    }
}

TEST_CASE("published views carry the neighbors' state") {
    const Topology t = make_topology(4, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}});
    const ConflictSets cs(t, {link(1, 0), link(2, 0), link(3, 1)});
    const std::vector<LinkSnapshot> snap{{4, 1, 0, 1.0}, {7, 2, 0, 1.0}, {9, 3, 0, 1.0}};
    const auto views = publish_views(snap, cs);
    REQUIRE(views[0].size() == 2);
    CHECK(views[0][0].link == 1);
    CHECK(views[0][0].q == 7);
    CHECK(views[0][0].z == 2);
    CHECK(views[0][0].cls == ConflictClass::Primary);
    REQUIRE(views[2].size() == 1);  // 2>0 is out of range of 3>1
}

TEST_CASE("OTF rule") {
    CHECK(otf_rule(5, 0, 4) == 9);
    CHECK(otf_rule(5, 5, 4) == 0);
    CHECK(otf_rule(5, 13, 4) == 0);   // inside the band
    CHECK(otf_rule(5, 14, 4) == -5);  // back down to required + threshold
    CHECK(otf_rule(0, 8, 4) == 0);
    CHECK(otf_rule(0, 9, 4) == -5);
    CHECK(otf_required(2.0) == 2);
    CHECK(otf_required(2.01) == 3);
    CHECK(otf_required(0.0) == 0);
}

TEST_CASE("OTF hysteresis keeps allocations stable under steady demand") {
    // Once inside the band, a constant requirement never triggers changes.
    for (std::int64_t req = 0; req < 20; ++req)
        for (std::uint32_t p = 0; p < 60; ++p) {
            const std::int64_t u = otf_rule(req, p, 4);
            const auto next = static_cast<std::uint32_t>(static_cast<std::int64_t>(p) + u);
            CHECK(otf_rule(req, next, 4) == 0);
        }
}

TEST_CASE("E-OTF scaling and backlog terms") {
    CHECK(eotf_required(3.0, 0.5, 0, 1) == 2 * otf_required(3.0));
    CHECK(eotf_required(3.0, 1.0, 0, 1) == otf_required(3.0));
    CHECK(eotf_required(3.0, 1.0, 50, 1) == 53);
    CHECK(eotf_required(3.0, 1.0, 50, 4) == 3 + 13);
    CHECK_THROWS(eotf_required(1.0, 0.0, 0, 1));
}

TEST_CASE("OTF follows the smoothed arrival rate") {
    const Topology t = make_topology(2, {{0, 1, 0.5}});
    const ConflictSets cs(t, {link(1, 0)});
    Otf otf;
    Eotf eotf;
    std::vector<LinkSnapshot> snap{{0, 6, 0, 0.5}};
    const auto views = publish_views(snap, cs);
    const FrameInputs in{snap, cs, views, 101, 16};
    const auto a = otf.decide(in);
    REQUIRE(a.size() == 1);
    CHECK(otf.estimate(0) == doctest::Approx(3.0));  // 0.5 * 6
    CHECK(a[0].delta == 3 + 4);
    const auto b = eotf.decide(in);
    REQUIRE(b.size() == 1);
    CHECK(b[0].delta == 6 + 4);

    // Standing backlog: E-OTF asks for more than OTF on the same inputs.
    snap[0] = {50, 6, 7, 0.5};
    Otf otf2;
    Eotf eotf2;
    const auto c = otf2.decide(in);
    const auto d = eotf2.decide(in);
    const auto delta_of = [](const std::vector<CellDelta>& v) { return v.empty() ? 0 : v[0].delta; };
    CHECK(delta_of(d) > delta_of(c));
}

TEST_CASE("apply_deltas releases before adding and reports grants") {
    // Two links into the sink compete for one usable slot.
    const Topology t = make_topology(3, {{0, 1, 1}, {0, 2, 1}});
    const ConflictSets cs(t, {link(1, 0), link(2, 0)});
    Slotframe f(2, 2, cs);
    Rng rng(1);
    REQUIRE(f.add_cells(0, 1, rng).size() == 1);
    const std::vector<CellDelta> wanted{{0, -1}, {1, 3}};
    const auto granted = apply_deltas(f, wanted, rng);
    CHECK(granted == std::vector<CellDelta>{{0, -1}, {1, 1}});
    CHECK(f.allocation_count(0) == 0);
    CHECK(f.allocation_count(1) == 1);
}

TEST_CASE("local voting step hands cells to the backlogged link") {
    const Topology t = make_topology(3, {{0, 1, 1}, {0, 2, 1}});
    const ConflictSets cs(t, {link(1, 0), link(2, 0)});
    Slotframe f(11, 2, cs);
    Rng rng(2);
    const std::vector<LinkSnapshot> snap{{30, 0, 0, 1.0}, {10, 0, 0, 1.0}};
    const auto views = publish_views(snap, cs);
    lv_step(f, snap, views, false, rng);
    CHECK(f.allocation_count(0) == 8);  // round(30 * 11 / 40) = round(8.25)
    CHECK(f.allocation_count(1) == 2);  // only 2 slots remain of the 10 usable
    CHECK(find_violations(f, t).empty());
}

TEST_CASE("algorithm names") {
    CHECK(parse_algorithm("lv") == Algorithm::LocalVoting);
    CHECK(parse_algorithm("local_voting_z") == Algorithm::LocalVotingZ);
    CHECK(parse_algorithm("e-otf") == Algorithm::Eotf);
    CHECK(to_string(Algorithm::Otf) == "otf");
    CHECK_THROWS_AS(parse_algorithm("sf0"), std::invalid_argument);
    CHECK(make_scheduling_function(Algorithm::LocalVotingZ, {})->name() == "local_voting_z");
}

}
