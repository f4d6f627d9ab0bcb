#include "sos/contours.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace sos {

namespace {

// Slots a bond can occupy around a dual vertex.
enum Slot : int { kE = 0, kN = 1, kW = 2, kS = 3 };

// Linked pairs per the contour definition: {E,S} and {W,N}, the two bonds on
// the same side of the 45-degree NE-SW line through the vertex.
inline int linked_partner(int slot) { return slot ^ 3; }

inline DualBond bond_at(DualVertex q, int slot) {
    switch (slot) {
        case kE: return DualBond{q, false};
        case kN: return DualBond{q, true};
        case kW: return DualBond{DualVertex{q.i - 1, q.j}, false};
        default: return DualBond{DualVertex{q.i, q.j - 1}, true};
    }
}

// Slot the bond occupies at the given endpoint.
inline int slot_at(const DualBond& b, DualVertex q) {
    if (b.vertical) return b.v == q ? kN : kS;
    return b.v == q ? kE : kW;
}

struct DualBondHash {
    std::size_t operator()(const DualBond& b) const noexcept {
        return DualVertexHash{}(b.v) * 2u + (b.vertical ? 1u : 0u);
    }
};

using VertexMask = std::unordered_map<DualVertex, unsigned, DualVertexHash>;

VertexMask vertex_masks(const std::vector<DualBond>& bonds) {
    VertexMask mask;
    for (const DualBond& b : bonds) {
        mask[b.v] |= 1u << slot_at(b, b.v);
        DualVertex w = b.other_end();
        mask[w] |= 1u << slot_at(b, w);
    }
    return mask;
}

// Walks the closed circuit through `start`, resolving four-fold vertices by
// the linked-pair rule. Marks bonds visited.
std::vector<DualBond> walk_cycle(const DualBond& start, const VertexMask& mask,
                                 std::unordered_set<DualBond, DualBondHash>& unvisited) {
    std::vector<DualBond> cycle;
    DualBond b = start;
    DualVertex q = start.other_end();
    for (;;) {
        cycle.push_back(b);
        unvisited.erase(b);
        unsigned m = mask.at(q);
        int deg = __builtin_popcount(m);
        int arrive = slot_at(b, q);
        int depart;
        if (deg == 2) {
            depart = __builtin_ctz(m & ~(1u << arrive));
        } else if (deg == 4) {
            depart = linked_partner(arrive);
        } else {
            throw std::runtime_error("malformed level line: odd bond degree at a dual vertex");
        }
        DualBond nb = bond_at(q, depart);
        if (nb == start) break;
        q = (nb.v == q) ? nb.other_end() : nb.v;
        b = nb;
    }
    return cycle;
}

// Even-odd interior of a closed circuit via row scans over vertical bonds.
std::vector<Site> interior_sites(const std::vector<DualBond>& cycle) {
    std::unordered_map<int, std::vector<int>> verticals_by_row;
    for (const DualBond& b : cycle)
        if (b.vertical) verticals_by_row[b.v.j].push_back(b.v.i);
    std::vector<Site> interior;
    for (auto& [row, xs] : verticals_by_row) {
        std::sort(xs.begin(), xs.end());
        for (std::size_t t = 0; t + 1 < xs.size(); t += 2)
            for (int x = xs[t]; x < xs[t + 1]; ++x) interior.push_back({x, row});
    }
    std::sort(interior.begin(), interior.end(), [](Site a, Site b) {
        return a.x2 != b.x2 ? a.x2 < b.x2 : a.x1 < b.x1;
    });
    return interior;
}

bool site_in(const std::vector<Site>& sorted_raster, Site s) {
    return std::binary_search(sorted_raster.begin(), sorted_raster.end(), s,
                              [](Site a, Site b) { return a.x2 != b.x2 ? a.x2 < b.x2 : a.x1 < b.x1; });
}

}  // namespace

bool Contour::contains_site(Site s) const { return site_in(interior, s); }

Contour make_closed_contour(std::vector<DualBond> cycle_bonds) {
    if (cycle_bonds.size() < 4) throw std::invalid_argument("closed contour needs at least 4 bonds");
    for (std::size_t k = 0; k < cycle_bonds.size(); ++k) {
        const DualBond& a = cycle_bonds[k];
        const DualBond& b = cycle_bonds[(k + 1) % cycle_bonds.size()];
        DualVertex a0 = a.v, a1 = a.other_end(), b0 = b.v, b1 = b.other_end();
        if (!(a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1))
            throw std::invalid_argument("contour bonds are not consecutive");
    }
    {
        std::vector<DualBond> sorted = cycle_bonds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("contour repeats a dual bond");
    }
    Contour c;
    c.bonds = std::move(cycle_bonds);
    c.closed = true;
    c.interior = interior_sites(c.bonds);

    // Delta_gamma: sites adjacent to a bond, plus the four sites around every
    // vertex where two non-linked bonds of gamma meet ({E,N} or {W,S} there).
    std::vector<Site> delta;
    for (const DualBond& b : c.bonds) {
        auto [s1, s2] = b.separated_sites();
        delta.push_back(s1);
        delta.push_back(s2);
    }
    for (const auto& [v, m] : vertex_masks(c.bonds)) {
        bool nonlinked = ((m >> kE) & 1u && (m >> kN) & 1u) || ((m >> kW) & 1u && (m >> kS) & 1u);
        if (nonlinked)
            for (Site s : {Site{v.i - 1, v.j - 1}, Site{v.i, v.j - 1}, Site{v.i - 1, v.j}, Site{v.i, v.j}})
                delta.push_back(s);
    }
    auto raster_less = [](Site a, Site b) { return a.x2 != b.x2 ? a.x2 < b.x2 : a.x1 < b.x1; };
    std::sort(delta.begin(), delta.end(), raster_less);
    delta.erase(std::unique(delta.begin(), delta.end()), delta.end());
    for (Site s : delta) {
        if (site_in(c.interior, s))
            c.delta_plus.push_back(s);
        else
            c.delta_minus.push_back(s);
    }
    return c;
}

std::vector<Contour> trace_level(const HeightConfig& config, int h) {
    const Region& region = config.region();
    const BoundaryCondition& bc = config.bc();
    if (!bc.is_constant())
        throw std::invalid_argument("trace_level: level sets are bounded only for constant boundary conditions");
    const int c = bc.constant_value();

    auto high = [&](Site s) {
        int i = region.index_of(s);
        return (i >= 0 ? config.height_by_index(i) : c) >= h;
    };

    std::vector<DualBond> boundary;
    for (Site x : region.sites()) {
        bool hx = high(x);
        // east and north pairs always; west and south only when the neighbor
        // is outside the region (otherwise the pair is seen from that side)
        if (hx != high({x.x1 + 1, x.x2})) boundary.push_back(DualBond{{x.x1 + 1, x.x2}, true});
        if (hx != high({x.x1, x.x2 + 1})) boundary.push_back(DualBond{{x.x1, x.x2 + 1}, false});
        if (!region.contains({x.x1 - 1, x.x2}) && hx != high({x.x1 - 1, x.x2}))
            boundary.push_back(DualBond{{x.x1, x.x2}, true});
        if (!region.contains({x.x1, x.x2 - 1}) && hx != high({x.x1, x.x2 - 1}))
            boundary.push_back(DualBond{{x.x1, x.x2}, false});
    }
    std::sort(boundary.begin(), boundary.end());
    boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());

    VertexMask mask = vertex_masks(boundary);
    std::unordered_set<DualBond, DualBondHash> unvisited(boundary.begin(), boundary.end());

    std::vector<Contour> out;
    for (const DualBond& b : boundary) {
        if (!unvisited.count(b)) continue;
        Contour c2 = make_closed_contour(walk_cycle(b, mask, unvisited));
        c2.level = h;
        if (!c2.interior.empty()) {
            auto [s1, s2] = c2.bonds.front().separated_sites();
            Site inside = site_in(c2.interior, s1) ? s1 : s2;
            c2.high_inside = high(inside);
        }
        out.push_back(std::move(c2));
    }
    return out;
}

LevelLineReport all_contours(const HeightConfig& config) {
    const BoundaryCondition& bc = config.bc();
    if (!bc.is_constant())
        throw std::invalid_argument("all_contours: constant boundary condition required");
    const int c = bc.constant_value();
    int lo = std::min(config.min_height(), c) + 1;
    int hi = std::max(config.max_height(), c);

    LevelLineReport report;
    for (int h = lo; h <= hi; ++h) {
        auto cs = trace_level(config, h);
        for (auto& g : cs) report.contours.push_back(std::move(g));
    }
    std::sort(report.contours.begin(), report.contours.end(), [](const Contour& a, const Contour& b) {
        if (a.interior.size() != b.interior.size()) return a.interior.size() > b.interior.size();
        if (a.level != b.level) return a.level < b.level;
        return a.bonds < b.bonds;
    });
    report.parent.assign(report.contours.size(), -1);
    for (std::size_t k = 0; k < report.contours.size(); ++k) {
        if (report.contours[k].interior.empty()) continue;
        Site rep = report.contours[k].interior.front();
        for (std::size_t j = k; j-- > 0;) {
            if (report.contours[j].contains_site(rep)) {
                report.parent[k] = static_cast<int>(j);
                break;
            }
        }
    }
    return report;
}

bool is_h_contour(const HeightConfig& config, const Contour& gamma, int h) {
    if (!gamma.closed) throw std::invalid_argument("is_h_contour: open contour");
    const Region& r = config.region();
    for (const DualBond& b : gamma.bonds) {
        if (b.v.i < r.xmin() - 1 || b.v.i > r.xmax() + 2 || b.v.j < r.ymin() - 1 || b.v.j > r.ymax() + 2)
            throw std::out_of_range("is_h_contour: contour not inside region");
    }
    const Contour* g = &gamma;
    Contour rebuilt;
    if (gamma.delta_plus.empty() && gamma.delta_minus.empty()) {
        rebuilt = make_closed_contour(gamma.bonds);
        g = &rebuilt;
    }
    for (Site s : g->delta_minus)
        if (config.height(s) > h - 1) return false;
    for (Site s : g->delta_plus)
        if (config.height(s) < h) return false;
    return true;
}

int crossing_count(const HeightConfig& config, const DualBond& e) {
    auto [x, y] = e.separated_sites();
    return std::abs(config.height(x) - config.height(y));
}

int entropic_height(int L, double beta) {
    if (L < 1) throw std::invalid_argument("entropic_height: L must be >= 1");
    return static_cast<int>(std::floor(std::log(static_cast<double>(L)) / (4.0 * beta)));
}

bool detect_high_circuit(const HeightConfig& config, double delta, int K, double beta, int L) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("detect_high_circuit: delta in (0,1)");
    if (K < 0) throw std::invalid_argument("detect_high_circuit: K >= 0");
    const Region& r = config.region();
    if (!(r.contains({L, L}) && r.contains({-L, -L})))
        throw std::invalid_argument("detect_high_circuit: region must contain Lambda_L");
    int Lp = static_cast<int>(std::floor((1.0 - delta) * L));
    if (Lp >= L) throw std::invalid_argument("detect_high_circuit: annulus is empty at this L");
    const int t = entropic_height(L, beta) - K;

    auto linf = [](Site s) { return std::max(std::abs(s.x1), std::abs(s.x2)); };
    auto in_annulus = [&](Site s) {
        int d = linf(s);
        return d > Lp && d <= L;
    };
    auto blocked = [&](Site s) { return config.height(s) >= t; };

    // A 4-connected circuit of {eta >= t} sites around Lambda' exists iff the
    // complement does not 8-connect the inner rim to the outer rim.
    std::unordered_set<Site, SiteHash> seen;
    std::deque<Site> queue;
    for (int x = -Lp - 1; x <= Lp + 1; ++x)
        for (int y : {-Lp - 1, Lp + 1})
            for (Site s : {Site{x, y}, Site{y, x}})
                if (in_annulus(s) && !blocked(s) && seen.insert(s).second) queue.push_back(s);
    while (!queue.empty()) {
        Site s = queue.front();
        queue.pop_front();
        if (linf(s) == L) return false;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                if (dx == 0 && dy == 0) continue;
                Site w{s.x1 + dx, s.x2 + dy};
                if (in_annulus(w) && !blocked(w) && seen.insert(w).second) queue.push_back(w);
            }
    }
    return true;
}

std::map<int, int> LevelLineReport::per_level_counts() const {
    std::map<int, int> m;
    for (const Contour& c : contours) m[c.level]++;
    return m;
}

std::map<int, int> LevelLineReport::per_level_total_length() const {
    std::map<int, int> m;
    for (const Contour& c : contours) m[c.level] += c.length();
    return m;
}

std::string report_to_json(const LevelLineReport& report, bool include_bonds) {
    nlohmann::json levels = nlohmann::json::object();
    for (std::size_t k = 0; k < report.contours.size(); ++k) {
        const Contour& c = report.contours[k];
        nlohmann::json entry{{"id", k},
                             {"length", c.length()},
                             {"interior_area", c.interior_area()},
                             {"high_inside", c.high_inside},
                             {"parent", report.parent[k]}};
        if (include_bonds) {
            nlohmann::json bonds = nlohmann::json::array();
            for (const DualBond& b : c.bonds) bonds.push_back({b.v.i, b.v.j, b.vertical});
            entry["bonds"] = std::move(bonds);
        }
        levels[std::to_string(c.level)].push_back(std::move(entry));
    }
    nlohmann::json j{{"levels", std::move(levels)}};
    return j.dump(2);
}

std::string report_to_csv(const LevelLineReport& report) {
    std::map<int, std::pair<int, int>> count_total;  // level -> (count, total length)
    std::map<int, int> max_len;
    for (const Contour& c : report.contours) {
        auto& ct = count_total[c.level];
        ct.first++;
        ct.second += c.length();
        max_len[c.level] = std::max(max_len[c.level], c.length());
    }
    std::string out = "level,count,total_length,max_length\n";
    char buf[128];
    for (const auto& [level, ct] : count_total) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d\n", level, ct.first, ct.second, max_len[level]);
        out += buf;
    }
    return out;
}

}  // namespace sos
