#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "sos/contours.hpp"
#include "sos/lattice.hpp"

using namespace sos;

namespace {

HeightConfig spike(int h) {
    HeightConfig c(Region::box(2), BoundaryCondition::zero());
    c.set({0, 0}, h);
    return c;
}

// Brute-force list of level-h boundary dual bonds, independent of the tracer.
std::set<DualBond> boundary_bonds_oracle(const HeightConfig& c, int h) {
    const Region& r = c.region();
    std::set<DualBond> out;
    for (int x = r.xmin() - 1; x <= r.xmax() + 1; ++x)
        for (int y = r.ymin() - 1; y <= r.ymax() + 1; ++y) {
            Site s{x, y};
            bool hs = c.height(s) >= h;
            if ((c.height({x + 1, y}) >= h) != hs) out.insert(DualBond{{x + 1, y}, true});
            if ((c.height({x, y + 1}) >= h) != hs) out.insert(DualBond{{x, y + 1}, false});
        }
    return out;
}

std::multiset<DualBond> bond_multiset(const std::vector<Contour>& cs) {
    std::multiset<DualBond> m;
    for (const Contour& g : cs)
        for (const DualBond& b : g.bonds) m.insert(b);
    return m;
}

HeightConfig random_config(Region r, std::mt19937_64& rng, int lo, int hi) {
    HeightConfig c(std::move(r), BoundaryCondition::zero());
    std::uniform_int_distribution<int> hdist(lo, hi);
    for (int i = 0; i < c.region().size(); ++i) c.set_by_index(i, hdist(rng));
    return c;
}

}  // namespace

TEST_CASE("elementary contour around a single spike") {
    HeightConfig c = spike(1);
    auto cs = trace_level(c, 1);
    REQUIRE(cs.size() == 1);
    const Contour& g = cs.front();
    CHECK(g.length() == 4);
    CHECK(g.closed);
    CHECK(g.high_inside);
    CHECK(g.interior == std::vector<Site>{{0, 0}});
    CHECK(g.delta_plus == std::vector<Site>{{0, 0}});
    // Delta-: the four neighbors plus the NE and SW diagonals
    std::set<Site> dm(g.delta_minus.begin(), g.delta_minus.end());
    std::set<Site> expect{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
    CHECK(dm == expect);

    CHECK(is_h_contour(c, g, 1));
    CHECK_FALSE(is_h_contour(c, g, 2));
}

TEST_CASE("flat configuration has no contours") {
    HeightConfig c(Region::box(2), BoundaryCondition::zero());
    for (int h = 1; h <= 3; ++h) CHECK(trace_level(c, h).empty());
    CHECK(all_contours(c).contours.empty());
}

TEST_CASE("2x2 block at height 1") {
    HeightConfig c(Region::box(2), BoundaryCondition::zero());
    for (Site s : {Site{0, 0}, Site{1, 0}, Site{0, 1}, Site{1, 1}}) c.set(s, 1);
    auto cs = trace_level(c, 1);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].length() == 8);
    CHECK(cs[0].interior_area() == 4);
    CHECK(is_h_contour(c, cs[0], 1));
}

TEST_CASE("single site at height 2: one 1-contour and one 2-contour") {
    HeightConfig c = spike(2);
    auto report = all_contours(c);
    REQUIRE(report.contours.size() == 2);
    CHECK(report.contours[0].level == 1);
    CHECK(report.contours[1].level == 2);
    CHECK(report.contours[0].bonds.size() == 4);
    // the same geometric square is simultaneously a 1- and a 2-contour
    std::set<DualBond> b1(report.contours[0].bonds.begin(), report.contours[0].bonds.end());
    std::set<DualBond> b2(report.contours[1].bonds.begin(), report.contours[1].bonds.end());
    CHECK(b1 == b2);
    CHECK(is_h_contour(c, report.contours[0], 1));
    CHECK(is_h_contour(c, report.contours[0], 2));
    // nesting forest: the 2-contour hangs below the 1-contour
    CHECK(report.parent[0] == -1);
    CHECK(report.parent[1] == 0);
}

TEST_CASE("nested plateaus") {
    HeightConfig c(Region::box(3), BoundaryCondition::zero());
    for (int x = -2; x <= 2; ++x)
        for (int y = -2; y <= 2; ++y) c.set({x, y}, 1);
    c.set({0, 0}, 2);
    auto report = all_contours(c);
    REQUIRE(report.contours.size() == 2);
    const Contour& outer = report.contours[0];
    const Contour& inner = report.contours[1];
    CHECK(outer.level == 1);
    CHECK(inner.level == 2);
    CHECK(outer.interior_area() == 25);
    CHECK(inner.interior_area() == 1);
    CHECK(report.parent[1] == 0);
    for (Site s : inner.interior) CHECK(outer.contains_site(s));
}

TEST_CASE("saddle rule: NE-SW high diagonal merges, NW-SE splits") {
    // eta = 1 on (0,0) and (1,1): the linked-pair rule joins the two unit
    // squares into a single staircase contour of length 8.
    HeightConfig merge(Region::box(2), BoundaryCondition::zero());
    merge.set({0, 0}, 1);
    merge.set({1, 1}, 1);
    auto cs = trace_level(merge, 1);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].length() == 8);
    CHECK(cs[0].interior_area() == 2);
    CHECK(is_h_contour(merge, cs[0], 1));

    // eta = 1 on (1,0) and (0,1): two separate elementary contours.
    HeightConfig split(Region::box(2), BoundaryCondition::zero());
    split.set({1, 0}, 1);
    split.set({0, 1}, 1);
    auto cs2 = trace_level(split, 1);
    REQUIRE(cs2.size() == 2);
    CHECK(cs2[0].length() == 4);
    CHECK(cs2[1].length() == 4);
    for (const auto& g : cs2) CHECK(is_h_contour(split, g, 1));
}

TEST_CASE("negative levels trace the low side") {
    HeightConfig c(Region::box(2), BoundaryCondition::zero());
    c.set({0, 0}, -2);
    auto report = all_contours(c);
    // levels -1 and 0 both produce the unit square around the well
    REQUIRE(report.contours.size() == 2);
    for (const auto& g : report.contours) {
        CHECK(g.length() == 4);
        CHECK_FALSE(g.high_inside);
        CHECK(g.interior == std::vector<Site>{{0, 0}});
    }
}

TEST_CASE("crossing_count") {
    HeightConfig flat(Region::box(1), BoundaryCondition::zero());
    CHECK(crossing_count(flat, DualBond{{0, 0}, true}) == 0);
    HeightConfig c = spike(3);
    CHECK(crossing_count(c, DualBond{{0, 0}, true}) == 3);   // across (-1,0)|(0,0)
    CHECK(crossing_count(c, DualBond{{1, 0}, true}) == 3);   // across (0,0)|(1,0)
    CHECK(crossing_count(c, DualBond{{0, 1}, false}) == 3);  // across (0,0)|(0,1)
}

TEST_CASE("multiplicity, energy and nesting identities on random configs") {
    std::mt19937_64 rng(21);
    Region r = Region::box(4);  // 9x9
    for (int trial = 0; trial < 100; ++trial) {
        HeightConfig c = random_config(r, rng, -2, 2);
        auto report = all_contours(c);

        // multiplicity: every dual bond is covered |eta(x)-eta(y)| times
        std::map<DualBond, int> mult;
        for (const Contour& g : report.contours)
            for (const DualBond& b : g.bonds) mult[b]++;
        std::int64_t total_len = 0;
        for (const Contour& g : report.contours) total_len += g.length();
        for (const auto& [b, m] : mult) CHECK(m == crossing_count(c, b));
        std::int64_t covered = 0;
        for (const auto& [b, m] : mult) covered += m;
        CHECK(covered == total_len);

        // energy identity
        CHECK(total_len == energy(c));

        // nesting: interiors pairwise nested or disjoint
        for (std::size_t i = 0; i < report.contours.size(); ++i)
            for (std::size_t j = i + 1; j < report.contours.size(); ++j) {
                const auto& a = report.contours[i].interior;
                const auto& b2 = report.contours[j].interior;
                std::vector<Site> inter;
                std::set_intersection(a.begin(), a.end(), b2.begin(), b2.end(), std::back_inserter(inter),
                                      [](Site u, Site v) { return u.x2 != v.x2 ? u.x2 < v.x2 : u.x1 < v.x1; });
                bool disjoint = inter.empty();
                bool nested = inter.size() == a.size() || inter.size() == b2.size();
                CHECK((disjoint || nested));
            }

        // every emitted high-inside contour passes the h-contour test
        for (const Contour& g : report.contours)
            if (g.high_inside) CHECK(is_h_contour(c, g, g.level));
    }
}

TEST_CASE("traced bonds match the brute-force boundary oracle") {
    std::mt19937_64 rng(22);
    Region r = Region::box(3);
    for (int trial = 0; trial < 50; ++trial) {
        HeightConfig c = random_config(r, rng, -1, 2);
        for (int h = -1; h <= 2; ++h) {
            auto cs = trace_level(c, h);
            auto m = bond_multiset(cs);
            std::set<DualBond> traced(m.begin(), m.end());
            CHECK(traced.size() == m.size());  // no bond in two contours of one level
            CHECK(traced == boundary_bonds_oracle(c, h));
        }
    }
}

TEST_CASE("tracing is deterministic") {
    std::mt19937_64 rng(23);
    HeightConfig c = random_config(Region::box(3), rng, -2, 2);
    auto r1 = all_contours(c);
    auto r2 = all_contours(c);
    REQUIRE(r1.contours.size() == r2.contours.size());
    for (std::size_t i = 0; i < r1.contours.size(); ++i) {
        CHECK(r1.contours[i].bonds == r2.contours[i].bonds);
        CHECK(r1.contours[i].level == r2.contours[i].level);
    }
    CHECK(r1.parent == r2.parent);
}

TEST_CASE("is_h_contour rejects foreign circuits") {
    // a 2x1 rectangle circuit over a config whose level set is only (0,0)
    HeightConfig c = spike(1);
    std::vector<DualBond> rect = {
        DualBond{{0, 0}, false}, DualBond{{1, 0}, false},  // bottom
        DualBond{{2, 0}, true},                            // right
        DualBond{{1, 1}, false}, DualBond{{0, 1}, false},  // top
        DualBond{{0, 0}, true},                            // left
    };
    Contour g = make_closed_contour(rect);
    CHECK(g.interior_area() == 2);
    for (int h = 1; h <= 2; ++h) CHECK_FALSE(is_h_contour(c, g, h));
}

TEST_CASE("non-constant boundary conditions are rejected") {
    HeightConfig c(Region::box(2), BoundaryCondition::xi_step());
    CHECK_THROWS_AS(trace_level(c, 1), std::invalid_argument);
    CHECK_THROWS_AS(all_contours(c), std::invalid_argument);
}

TEST_CASE("entropic_height") {
    CHECK(entropic_height(1, 1.0) == 0);
    CHECK(entropic_height(256, 0.75) == 1);  // log(256)/3 = 1.848...
    CHECK(entropic_height(64, 0.25) == 4);   // log(64) = 4.158...
    CHECK_THROWS_AS(entropic_height(0, 1.0), std::invalid_argument);
}

TEST_CASE("detect_high_circuit") {
    const int L = 16;
    const double beta = 0.25;  // H(16) = floor(log 16 / 1) = 2
    REQUIRE(entropic_height(L, beta) == 2);
    const double delta = 0.5;
    const int K = 0;

    // flat at H(L) - K everywhere: trivially true
    HeightConfig hi(Region::box(L), BoundaryCondition::zero(), 2);
    CHECK(detect_high_circuit(hi, delta, K, beta, L));

    // flat zero with threshold >= 1: false
    HeightConfig lo(Region::box(L), BoundaryCondition::zero(), 0);
    CHECK_FALSE(detect_high_circuit(lo, delta, K, beta, L));

    // a single square ring at radius (1 - delta/2) L = 12, zero elsewhere
    HeightConfig ring(Region::box(L), BoundaryCondition::zero(), 0);
    const int rad = static_cast<int>((1.0 - delta / 2) * L);
    for (int x = -L; x <= L; ++x)
        for (int y = -L; y <= L; ++y)
            if (std::max(std::abs(x), std::abs(y)) == rad) ring.set({x, y}, 2);
    CHECK(detect_high_circuit(ring, delta, K, beta, L));

    // breaking the ring at one site destroys the circuit
    ring.set({rad, 0}, 1);
    CHECK_FALSE(detect_high_circuit(ring, delta, K, beta, L));

    CHECK_THROWS_AS(detect_high_circuit(lo, 1.5, K, beta, L), std::invalid_argument);
    HeightConfig tiny(Region::box(1), BoundaryCondition::zero(), 0);
    CHECK_THROWS_AS(detect_high_circuit(tiny, 0.5, 0, beta, 2), std::invalid_argument);
}

TEST_CASE("report serialization") {
    HeightConfig c = spike(2);
    auto report = all_contours(c);
    auto json = report_to_json(report, true);
    CHECK(json.find("\"levels\"") != std::string::npos);
    CHECK(json.find("\"bonds\"") != std::string::npos);
    auto json2 = report_to_json(report, false);
    CHECK(json2.find("\"bonds\"") == std::string::npos);
    auto csv = report_to_csv(report);
    CHECK(csv == "level,count,total_length,max_length\n1,1,4,4\n2,1,4,4\n");
}
