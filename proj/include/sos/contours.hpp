#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sos/lattice.hpp"

namespace sos {

/// Vertex of the dual lattice Z^2 + (1/2,1/2); (i,j) stands for the point
/// (i - 1/2, j - 1/2), so the four dual vertices around site (i,j) are
/// (i,j), (i+1,j), (i,j+1), (i+1,j+1).
struct DualVertex {
    int i = 0;
    int j = 0;
    friend bool operator==(const DualVertex&, const DualVertex&) = default;
    friend auto operator<=>(const DualVertex&, const DualVertex&) = default;
};

struct DualVertexHash {
    std::size_t operator()(const DualVertex& v) const noexcept {
        return SiteHash{}(Site{v.i, v.j});
    }
};

/// A dual bond in canonical form: from `v` one unit east (horizontal = true
/// means the bond is horizontal as a segment? No: `vertical` below) --
/// we store the base vertex and the axis. vertical means the segment runs
/// from v north to v+(0,1): it separates sites (v.i-1, v.j) and (v.i, v.j).
/// A horizontal bond runs east to v+(1,0) and separates (v.i, v.j-1) and
/// (v.i, v.j).
struct DualBond {
    DualVertex v;
    bool vertical = false;

    DualVertex other_end() const { return vertical ? DualVertex{v.i, v.j + 1} : DualVertex{v.i + 1, v.j}; }
    /// The two lattice sites at distance 1/2 from the bond.
    std::pair<Site, Site> separated_sites() const {
        if (vertical) return {Site{v.i - 1, v.j}, Site{v.i, v.j}};
        return {Site{v.i, v.j - 1}, Site{v.i, v.j}};
    }
    friend bool operator==(const DualBond&, const DualBond&) = default;
    friend auto operator<=>(const DualBond&, const DualBond&) = default;
};

/// Geometric contour (Definition: closed circuit of dual bonds with linked
/// pairs at four-fold vertices). Open contours carry no interior and are kept
/// only as instrumentation for the staircase ensemble.
struct Contour {
    std::vector<DualBond> bonds;  // cyclic for closed contours
    bool closed = true;
    int level = 0;            // h of the level set this contour was traced at
    bool high_inside = true;  // heights >= level on the bounded side
    std::vector<Site> interior;     // Lambda_gamma, sorted raster order (closed only)
    std::vector<Site> delta_plus;   // Delta+ = Delta ∩ Lambda_gamma, sorted
    std::vector<Site> delta_minus;  // Delta- = Delta \ Delta+, sorted

    int length() const { return static_cast<int>(bonds.size()); }
    std::int64_t interior_area() const { return static_cast<std::int64_t>(interior.size()); }
    bool contains_site(Site s) const;
};

/// Computes interior and Delta+/- for a closed bond cycle; length and bond
/// list are taken as given. Throws if the cycle is not closed/even-degree.
Contour make_closed_contour(std::vector<DualBond> cycle_bonds);

struct LevelLineReport {
    std::vector<Contour> contours;  // sorted by (area desc, level asc, bonds)
    std::vector<int> parent;        // nesting forest; -1 = root

    std::map<int, int> per_level_counts() const;
    std::map<int, int> per_level_total_length() const;
};

/// Closed contours of the level-h set {x : eta(x) >= h}. Requires a constant
/// boundary condition (all level sets bounded). For h <= bc the bounded
/// components lie on the low side; such contours are reported with
/// high_inside = false.
std::vector<Contour> trace_level(const HeightConfig& config, int h);

/// Union of trace_level over every level between min and max height,
/// with the nesting forest populated.
LevelLineReport all_contours(const HeightConfig& config);

/// Event C_{gamma,h}: eta <= h-1 on Delta- and eta >= h on Delta+.
bool is_h_contour(const HeightConfig& config, const Contour& gamma, int h);

/// |eta(x) - eta(y)| across a dual bond.
int crossing_count(const HeightConfig& config, const DualBond& e);

/// Entropic-repulsion height H(L) = floor(log(L) / (4 beta)), natural log.
int entropic_height(int L, double beta);

/// Event A(delta,K): a nearest-neighbor circuit of sites surrounding
/// Lambda_{(1-delta)L} with eta >= H(L) - K everywhere on it. Detected via
/// connectivity in the annulus Lambda_L \ Lambda_{(1-delta)L}.
bool detect_high_circuit(const HeightConfig& config, double delta, int K, double beta, int L);

std::string report_to_json(const LevelLineReport& report, bool include_bonds = false);
std::string report_to_csv(const LevelLineReport& report);

}  // namespace sos
