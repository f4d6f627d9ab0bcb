#include "sos/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace sos {

namespace {
std::atomic<std::uint64_t> g_bc_warnings{0};
}

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

Region Region::box(int L) {
    if (L < 0) throw std::invalid_argument("box: L must be >= 0");
    return rectangle_impl(RegionKind::box, L, L);
}

Region Region::rectangle(int L, int M) {
    if (L < 0 || M < 0) throw std::invalid_argument("rectangle: L, M must be >= 0");
    return rectangle_impl(RegionKind::rectangle, L, M);
}

Region Region::strip(int L, int M) {
    if (L < 0 || M < 0) throw std::invalid_argument("strip: L, M must be >= 0");
    return rectangle_impl(RegionKind::strip, L, M);
}

Region Region::custom(std::vector<Site> sites) {
    if (sites.empty()) throw std::invalid_argument("custom region must be nonempty");
    std::sort(sites.begin(), sites.end(), [](Site a, Site b) {
        return a.x2 != b.x2 ? a.x2 < b.x2 : a.x1 < b.x1;  // raster order
    });
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    Region r;
    r.kind_ = RegionKind::custom;
    r.sites_ = std::move(sites);
    r.build_index();
    return r;
}

void Region::build_index() {
    xmin_ = std::numeric_limits<int>::max();
    xmax_ = std::numeric_limits<int>::min();
    ymin_ = xmin_;
    ymax_ = xmax_;
    for (Site s : sites_) {
        xmin_ = std::min(xmin_, s.x1);
        xmax_ = std::max(xmax_, s.x1);
        ymin_ = std::min(ymin_, s.x2);
        ymax_ = std::max(ymax_, s.x2);
    }
    gw_ = static_cast<std::size_t>(xmax_ - xmin_ + 1);
    std::size_t gh = static_cast<std::size_t>(ymax_ - ymin_ + 1);
    grid_.assign(gw_ * gh, -1);
    for (int i = 0; i < static_cast<int>(sites_.size()); ++i) {
        Site s = sites_[static_cast<std::size_t>(i)];
        grid_[static_cast<std::size_t>(s.x2 - ymin_) * gw_ + static_cast<std::size_t>(s.x1 - xmin_)] = i;
    }
}

bool Region::is_rectangular() const {
    return static_cast<std::size_t>(size()) ==
           gw_ * static_cast<std::size_t>(ymax_ - ymin_ + 1);
}

Region Region::rectangle_impl(RegionKind kind, int L, int M) {
    Region r;
    r.kind_ = kind;
    r.L_ = L;
    r.M_ = M;
    r.sites_.reserve(static_cast<std::size_t>(2 * L + 1) * static_cast<std::size_t>(2 * M + 1));
    for (int y = -M; y <= M; ++y)
        for (int x = -L; x <= L; ++x) r.sites_.push_back({x, y});
    r.build_index();
    return r;
}

// ---------------------------------------------------------------------------
// BoundaryCondition
// ---------------------------------------------------------------------------

BoundaryCondition BoundaryCondition::zero() { return BoundaryCondition(); }

BoundaryCondition BoundaryCondition::constant(int h) {
    BoundaryCondition bc;
    bc.kind_ = BcKind::constant;
    bc.constant_ = h;
    return bc;
}

BoundaryCondition BoundaryCondition::staircase(std::vector<int> a, std::vector<int> b, int L, int M) {
    if (a.size() != b.size()) throw std::invalid_argument("staircase: a and b must have equal length");
    auto sorted_in_range = [M](const std::vector<int>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < -M || v[i] > M) return false;
            if (i > 0 && v[i] < v[i - 1]) return false;
        }
        return true;
    };
    if (!sorted_in_range(a) || !sorted_in_range(b))
        throw std::invalid_argument("invalid staircase: jumps must be sorted within [-M, M]");
    BoundaryCondition bc;
    bc.kind_ = BcKind::staircase;
    bc.stair_ = StaircaseSpec{std::move(a), std::move(b), L, M};
    return bc;
}

BoundaryCondition BoundaryCondition::xi_step() {
    BoundaryCondition bc;
    bc.kind_ = BcKind::xi_step;
    return bc;
}

BoundaryCondition BoundaryCondition::custom(std::map<Site, int> values) {
    BoundaryCondition bc;
    bc.kind_ = BcKind::custom;
    bc.values_ = std::move(values);
    return bc;
}

namespace {
// Index i in 0..n with jumps[i] <= v < jumps[i+1], where the jump list is
// read as extended by -(M+1) below and M+1 above.
int stair_level(const std::vector<int>& jumps, int v) {
    int i = 0;
    while (i < static_cast<int>(jumps.size()) && v >= jumps[static_cast<std::size_t>(i)]) ++i;
    return i;
}
}  // namespace

int BoundaryCondition::value_at(Site s) const {
    switch (kind_) {
        case BcKind::zero:
            return offset_;
        case BcKind::constant:
            return constant_ + offset_;
        case BcKind::xi_step:
            return (s.x2 >= 0 ? 1 : 0) + offset_;
        case BcKind::staircase: {
            const auto& st = stair_;
            if (s.x1 == -st.L - 1 && s.x2 >= -st.M - 1 && s.x2 <= st.M + 1)
                return stair_level(st.a, s.x2) + offset_;
            if (s.x1 == st.L + 1 && s.x2 >= -st.M - 1 && s.x2 <= st.M + 1)
                return stair_level(st.b, s.x2) + offset_;
            if (s.x1 >= -st.L && s.x1 <= st.L && s.x2 == -st.M - 1) return offset_;
            if (s.x1 >= -st.L && s.x1 <= st.L && s.x2 == st.M + 1) return st.n() + offset_;
            g_bc_warnings.fetch_add(1, std::memory_order_relaxed);
            return offset_;
        }
        case BcKind::custom: {
            auto it = values_.find(s);
            if (it != values_.end()) return it->second + offset_;
            g_bc_warnings.fetch_add(1, std::memory_order_relaxed);
            return offset_;
        }
    }
    return 0;
}

std::pair<int, int> BoundaryCondition::value_range() const {
    switch (kind_) {
        case BcKind::zero:
            return {offset_, offset_};
        case BcKind::constant:
            return {constant_ + offset_, constant_ + offset_};
        case BcKind::xi_step:
            return {offset_, 1 + offset_};
        case BcKind::staircase:
            return {offset_, stair_.n() + offset_};
        case BcKind::custom: {
            int lo = 0, hi = 0;  // default reads are 0
            for (const auto& [s, v] : values_) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            return {lo + offset_, hi + offset_};
        }
    }
    return {0, 0};
}

BoundaryCondition BoundaryCondition::shifted(int c) const {
    BoundaryCondition bc = *this;
    if (bc.kind_ == BcKind::zero && c != 0) {
        bc.kind_ = BcKind::constant;
        bc.constant_ = 0;
    }
    if (bc.kind_ == BcKind::constant)
        bc.constant_ += c;
    else
        bc.offset_ += c;
    return bc;
}

std::uint64_t BoundaryCondition::warning_count() { return g_bc_warnings.load(); }
void BoundaryCondition::reset_warning_count() { g_bc_warnings.store(0); }

std::string BoundaryCondition::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case BcKind::zero: os << "zero"; break;
        case BcKind::constant: os << "constant(" << constant_ << ")"; break;
        case BcKind::xi_step: os << "xi_step"; break;
        case BcKind::staircase: {
            os << "staircase(a=";
            for (int v : stair_.a) os << v << ",";
            os << " b=";
            for (int v : stair_.b) os << v << ",";
            os << " L=" << stair_.L << " M=" << stair_.M << ")";
            break;
        }
        case BcKind::custom: os << "custom(" << values_.size() << " sites)"; break;
    }
    if (offset_ != 0) os << "+" << offset_;
    return os.str();
}

// ---------------------------------------------------------------------------
// HeightConfig
// ---------------------------------------------------------------------------

HeightConfig::HeightConfig(Region region, BoundaryCondition bc, int fill)
    : region_(std::move(region)), bc_(std::move(bc)) {
    heights_.assign(static_cast<std::size_t>(region_.size()), fill);
}

void HeightConfig::set(Site s, int h) {
    int i = region_.index_of(s);
    if (i < 0) throw std::out_of_range("HeightConfig::set: site outside region");
    heights_[static_cast<std::size_t>(i)] = h;
}

int HeightConfig::min_height() const { return *std::min_element(heights_.begin(), heights_.end()); }
int HeightConfig::max_height() const { return *std::max_element(heights_.begin(), heights_.end()); }

// ---------------------------------------------------------------------------
// Geometry operations
// ---------------------------------------------------------------------------

std::vector<Bond> bonds(const Region& region) {
    std::vector<Bond> out;
    out.reserve(static_cast<std::size_t>(region.size()) * 2 + 16);
    for (Site x : region.sites()) {
        for (Site d : kNeighborSteps) {
            Site y = x + d;
            // internal bonds once (from the smaller endpoint), boundary bonds always
            if (region.contains(y)) {
                if (x < y) out.emplace_back(x, y);
            } else {
                out.emplace_back(x, y);
            }
        }
    }
    return out;
}

Boundaries boundaries(const Region& region) {
    Boundaries b;
    std::unordered_set<Site, SiteHash> ext;
    for (Site x : region.sites())
        for (Site d : kNeighborSteps) {
            Site y = x + d;
            if (!region.contains(y)) ext.insert(y);
        }
    b.external.assign(ext.begin(), ext.end());
    std::sort(b.external.begin(), b.external.end());

    const Site ne{1, 1}, sw{-1, -1};
    for (Site x : region.sites()) {
        bool near = false;
        for (Site d : kNeighborSteps)
            if (ext.count(x + d)) { near = true; break; }
        if (!near && (ext.count(x + ne) || ext.count(x + sw))) near = true;
        if (near) b.inner.push_back(x);
    }
    std::sort(b.inner.begin(), b.inner.end());
    return b;
}

std::int64_t energy(const HeightConfig& config) {
    const Region& r = config.region();
    std::int64_t e = 0;
    for (int i = 0; i < r.size(); ++i) {
        Site x = r.site_at(i);
        std::int64_t hx = config.height_by_index(i);
        for (Site d : kNeighborSteps) {
            Site y = x + d;
            int j = r.index_of(y);
            if (j >= 0) {
                if (x < y) e += std::abs(hx - static_cast<std::int64_t>(config.height_by_index(j)));
            } else {
                e += std::abs(hx - static_cast<std::int64_t>(config.bc().value_at(y)));
            }
        }
    }
    return e;
}

std::int64_t energy_delta(const HeightConfig& config, Site site, int new_height) {
    const Region& r = config.region();
    int i = r.index_of(site);
    if (i < 0) throw std::out_of_range("energy_delta: site outside region");
    std::int64_t h_old = config.height_by_index(i);
    std::int64_t h_new = new_height;
    std::int64_t d = 0;
    for (Site step : kNeighborSteps) {
        Site y = site + step;
        int j = r.index_of(y);
        std::int64_t hy = j >= 0 ? config.height_by_index(j) : config.bc().value_at(y);
        d += std::abs(h_new - hy) - std::abs(h_old - hy);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Height-field text format
// ---------------------------------------------------------------------------

void write_height_field(std::ostream& out, const HeightConfig& config, int hoff) {
    const Region& r = config.region();
    if (!r.is_rectangular())
        throw std::invalid_argument("write_height_field: region must fill its bounding rectangle");
    int W = r.xmax() - r.xmin() + 1;
    int H = r.ymax() - r.ymin() + 1;
    if (r.xmin() != -((W - 1) / 2) || r.ymax() != (H - 1) / 2)
        throw std::invalid_argument("write_height_field: region must be the centered rectangle");
    out << W << " " << H << " " << hoff << "\n";
    for (int y = r.ymax(); y >= r.ymin(); --y) {
        for (int x = r.xmin(); x <= r.xmax(); ++x) {
            if (x > r.xmin()) out << " ";
            out << (config.height({x, y}) - hoff);
        }
        out << "\n";
    }
}

HeightConfig read_height_field(std::istream& in, BoundaryCondition bc) {
    int W = 0, H = 0, hoff = 0;
    if (!(in >> W >> H >> hoff) || W <= 0 || H <= 0)
        throw std::runtime_error("read_height_field: bad header");
    int x0 = -((W - 1) / 2);
    int ytop = (H - 1) / 2;
    std::vector<Site> sites;
    sites.reserve(static_cast<std::size_t>(W) * static_cast<std::size_t>(H));
    for (int y = ytop - H + 1; y <= ytop; ++y)
        for (int x = x0; x < x0 + W; ++x) sites.push_back({x, y});
    Region region = Region::custom(std::move(sites));
    HeightConfig cfg(region, std::move(bc));
    for (int y = ytop; y > ytop - H; --y)
        for (int x = x0; x < x0 + W; ++x) {
            int v = 0;
            if (!(in >> v)) throw std::runtime_error("read_height_field: truncated grid");
            cfg.set({x, y}, v + hoff);
        }
    return cfg;
}

}  // namespace sos
