#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sos {

/// A site x = (x1, x2) of the square lattice Z^2.
struct Site {
    int x1 = 0;
    int x2 = 0;

    friend bool operator==(const Site&, const Site&) = default;
    friend auto operator<=>(const Site&, const Site&) = default;
};

struct SiteHash {
    std::size_t operator()(const Site& s) const noexcept {
        // 2D -> 1D mix, good enough for the small coordinate ranges used here
        std::uint64_t a = static_cast<std::uint32_t>(s.x1);
        std::uint64_t b = static_cast<std::uint32_t>(s.x2);
        std::uint64_t z = (a << 32) ^ b;
        z ^= z >> 33;
        z *= 0xff51afd7ed558ccdULL;
        z ^= z >> 33;
        return static_cast<std::size_t>(z);
    }
};

/// Unordered nearest-neighbor bond e = xy; stored with a <= b in (x1,x2) order.
struct Bond {
    Site a, b;

    Bond() = default;
    Bond(Site x, Site y) {
        if (y < x) std::swap(x, y);
        a = x;
        b = y;
    }
    friend bool operator==(const Bond&, const Bond&) = default;
    friend auto operator<=>(const Bond&, const Bond&) = default;
};

inline const std::array<Site, 4> kNeighborSteps = {Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}};

inline Site operator+(Site a, Site b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Site operator-(Site a, Site b) { return {a.x1 - b.x1, a.x2 - b.x2}; }

enum class RegionKind { box, rectangle, strip, custom };

/// A finite region Lambda of Z^2.
///
/// Sites are stored both as a dense list in raster order (row-major from the
/// bottom-left corner) and as a bounding-box index grid for O(1) membership.
/// box(L) is [-L,L]^2, rectangle(L,M) is [-L,L]x[-M,M]. strip(L,M) has the
/// same site set as rectangle(L,M) but records that it stands for a finite
/// truncation of the strip [-L,L] x Z.
class Region {
public:
    static Region box(int L);
    static Region rectangle(int L, int M);
    static Region strip(int L, int M);
    static Region custom(std::vector<Site> sites);

    RegionKind kind() const { return kind_; }
    int L() const { return L_; }
    int M() const { return M_; }

    const std::vector<Site>& sites() const { return sites_; }
    int size() const { return static_cast<int>(sites_.size()); }

    bool contains(Site s) const { return index_of(s) >= 0; }
    /// Dense raster index of a site, or -1 if outside the region.
    int index_of(Site s) const {
        if (s.x1 < xmin_ || s.x1 > xmax_ || s.x2 < ymin_ || s.x2 > ymax_) return -1;
        return grid_[static_cast<std::size_t>(s.x2 - ymin_) * gw_ + static_cast<std::size_t>(s.x1 - xmin_)];
    }
    Site site_at(int index) const { return sites_[static_cast<std::size_t>(index)]; }

    bool is_rectangular() const;

    int xmin() const { return xmin_; }
    int xmax() const { return xmax_; }
    int ymin() const { return ymin_; }
    int ymax() const { return ymax_; }

private:
    Region() = default;
    static Region rectangle_impl(RegionKind kind, int L, int M);
    void build_index();

    RegionKind kind_ = RegionKind::custom;
    int L_ = 0, M_ = 0;
    std::vector<Site> sites_;
    int xmin_ = 0, xmax_ = -1, ymin_ = 0, ymax_ = -1;
    std::size_t gw_ = 0;
    std::vector<int> grid_;
};

enum class BcKind { zero, constant, staircase, xi_step, custom };

/// Staircase boundary data: height climbs 0 -> n along the side walls of
/// rectangle(L,M), jumping at a_i on the left wall and b_i on the right wall.
struct StaircaseSpec {
    std::vector<int> a;
    std::vector<int> b;
    int L = 0;
    int M = 0;

    int n() const { return static_cast<int>(a.size()); }
};

/// Boundary condition tau: heights on Lambda^c. Reads outside the declared
/// support resolve to 0 (a warning counter is bumped; see warning_count()).
class BoundaryCondition {
public:
    static BoundaryCondition zero();
    static BoundaryCondition constant(int h);
    static BoundaryCondition staircase(std::vector<int> a, std::vector<int> b, int L, int M);
    /// xi of Definition 1.1: 1 on {x2 >= 0}, 0 elsewhere.
    static BoundaryCondition xi_step();
    static BoundaryCondition custom(std::map<Site, int> values);

    BcKind kind() const { return kind_; }
    int value_at(Site s) const;

    /// Smallest closed interval containing every value the bc can take.
    std::pair<int, int> value_range() const;

    bool is_constant() const { return kind_ == BcKind::zero || kind_ == BcKind::constant; }
    int constant_value() const { return constant_; }
    const StaircaseSpec& stair() const { return stair_; }

    /// bc + c (same kind where possible; staircase/xi promote to custom-free
    /// shift recorded in offset_).
    BoundaryCondition shifted(int c) const;

    static std::uint64_t warning_count();
    static void reset_warning_count();

    std::string describe() const;

private:
    BoundaryCondition() = default;

    BcKind kind_ = BcKind::zero;
    int constant_ = 0;
    int offset_ = 0;
    StaircaseSpec stair_;
    std::map<Site, int> values_;
};

struct InverseTemperature {
    double beta = 1.0;
    explicit InverseTemperature(double b) : beta(b) {
        if (!(b > 0)) throw std::invalid_argument("beta must be positive");
    }
};

/// An integer height field eta over a region, reading tau outside.
class HeightConfig {
public:
    HeightConfig(Region region, BoundaryCondition bc, int fill = 0);

    const Region& region() const { return region_; }
    const BoundaryCondition& bc() const { return bc_; }

    int height(Site s) const {
        int i = region_.index_of(s);
        return i >= 0 ? heights_[static_cast<std::size_t>(i)] : bc_.value_at(s);
    }
    int height_by_index(int i) const { return heights_[static_cast<std::size_t>(i)]; }
    void set(Site s, int h);
    void set_by_index(int i, int h) { heights_[static_cast<std::size_t>(i)] = h; }

    const std::vector<int>& heights() const { return heights_; }
    std::vector<int>& heights() { return heights_; }

    int min_height() const;
    int max_height() const;

private:
    Region region_;
    BoundaryCondition bc_;
    std::vector<int> heights_;
};

/// All bonds e = xy with x in Lambda and y in Lambda u dLambda, each once.
std::vector<Bond> bonds(const Region& region);

struct Boundaries {
    std::vector<Site> external;  // dLambda
    std::vector<Site> inner;     // d_* Lambda
};

/// dLambda = sites of Lambda^c adjacent to Lambda; d_*Lambda = sites of
/// Lambda at distance 1 from dLambda or at distance sqrt(2) from dLambda in
/// the SW or NE diagonal direction.
Boundaries boundaries(const Region& region);

/// H(eta) = sum over bonds of |eta(x) - eta(y)|, exact integer arithmetic.
std::int64_t energy(const HeightConfig& config);

/// energy(config with site set to new_height) - energy(config), touching only
/// the site's four incident bonds.
std::int64_t energy_delta(const HeightConfig& config, Site site, int new_height);

// --- Height-field text format ---
// Line 1: "W H hoff"; then H rows of W integers, row 1 = top row.
// Stored value + hoff = height. The grid maps onto the sites
// [x0, x0+W-1] x [y0, y0+H-1] with x0 = -((W-1)/2), y0 chosen so the top row
// is at y = (H-1)/2 (the centered rectangle for odd W, H).
void write_height_field(std::ostream& out, const HeightConfig& config, int hoff = 0);
HeightConfig read_height_field(std::istream& in, BoundaryCondition bc = BoundaryCondition::zero());

}  // namespace sos
