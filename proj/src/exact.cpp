#include "sos/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace sos {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct NeighborRef {
    int index = -1;  // >= 0: region index; -1: fixed bc value
    int bc_value = 0;
};

// For each region site, its four neighbors resolved against region or bc.
std::vector<std::array<NeighborRef, 4>> neighbor_table(const Region& r, const BoundaryCondition& bc) {
    std::vector<std::array<NeighborRef, 4>> t(static_cast<std::size_t>(r.size()));
    for (int i = 0; i < r.size(); ++i) {
        Site x = r.site_at(i);
        for (int k = 0; k < 4; ++k) {
            Site y = x + kNeighborSteps[static_cast<std::size_t>(k)];
            int j = r.index_of(y);
            if (j >= 0)
                t[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = {j, 0};
            else
                t[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = {-1, bc.value_at(y)};
        }
    }
    return t;
}

std::int64_t total_energy(const std::vector<int>& h, const std::vector<std::array<NeighborRef, 4>>& nbr) {
    std::int64_t e = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        for (const NeighborRef& n : nbr[i]) {
            if (n.index >= 0) {
                if (static_cast<std::size_t>(n.index) > i)
                    e += std::abs(static_cast<std::int64_t>(h[i]) - h[static_cast<std::size_t>(n.index)]);
            } else {
                e += std::abs(static_cast<std::int64_t>(h[i]) - n.bc_value);
            }
        }
    }
    return e;
}

// Energy change when site i moves from h[i] to nh, with the rest of h fixed.
std::int64_t site_delta(const std::vector<int>& h, const std::vector<std::array<NeighborRef, 4>>& nbr,
                        std::size_t i, int nh) {
    std::int64_t d = 0;
    for (const NeighborRef& n : nbr[i]) {
        std::int64_t hn = n.index >= 0 ? h[static_cast<std::size_t>(n.index)] : n.bc_value;
        d += std::abs(nh - hn) - std::abs(h[i] - hn);
    }
    return d;
}

// Streaming log-sum-exp of exp(-beta (E - m)) with integer min-energy shift.
struct LogAccumulator {
    double beta;
    std::int64_t m = 0;
    double acc = 0.0;
    bool any = false;

    void add(std::int64_t e) {
        if (!any) {
            m = e;
            acc = 1.0;
            any = true;
            return;
        }
        if (e >= m) {
            acc += std::exp(-beta * static_cast<double>(e - m));
        } else {
            acc = acc * std::exp(-beta * static_cast<double>(m - e)) + 1.0;
            m = e;
        }
    }
    double log_value() const { return any && acc > 0 ? -beta * static_cast<double>(m) + std::log(acc) : kNegInf; }
};

// Odometer over per-site digit ranges, applying f(heights, energy) per state.
// Ranges are inclusive [lo_i, hi_i]; energies maintained incrementally.
template <typename F>
void enumerate_states(const std::vector<int>& lo, const std::vector<int>& hi,
                      const std::vector<std::array<NeighborRef, 4>>& nbr, F&& f) {
    const std::size_t n = lo.size();
    std::vector<int> h(lo);
    std::int64_t e = total_energy(h, nbr);
    for (;;) {
        f(h, e);
        std::size_t i = 0;
        while (i < n) {
            if (h[i] < hi[i]) {
                e += site_delta(h, nbr, i, h[i] + 1);
                h[i] += 1;
                break;
            }
            e += site_delta(h, nbr, i, lo[i]);
            h[i] = lo[i];
            ++i;
        }
        if (i == n) break;
    }
}

std::string window_str(const HeightWindow& w) {
    std::ostringstream os;
    os << "[" << w.hmin << "," << w.hmax << "]";
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// HeightWindow / Constraints
// ---------------------------------------------------------------------------

HeightWindow HeightWindow::around(const BoundaryCondition& bc, int margin) {
    if (margin < 0) throw std::invalid_argument("window margin must be >= 0");
    auto [lo, hi] = bc.value_range();
    return {lo - margin, hi + margin};
}

int HeightWindow::default_margin(double beta) {
    if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
    return std::max(2, static_cast<int>(std::ceil(4.0 / beta)));
}

void Constraints::add_floor(Site s, int v) {
    auto it = floors.find(s);
    if (it == floors.end())
        floors[s] = v;
    else
        it->second = std::max(it->second, v);
}

void Constraints::add_ceiling(Site s, int v) {
    auto it = ceilings.find(s);
    if (it == ceilings.end())
        ceilings[s] = v;
    else
        it->second = std::min(it->second, v);
}

void Constraints::add_u_plus(const std::vector<Site>& sites) {
    for (Site s : sites) add_floor(s, 0);
}

void Constraints::add_u_minus(const std::vector<Site>& sites) {
    for (Site s : sites) add_ceiling(s, 0);
}

std::pair<int, int> Constraints::bounds(Site s, const HeightWindow& w) const {
    int lo = w.hmin, hi = w.hmax;
    if (global_floor) lo = std::max(lo, *global_floor);
    if (auto it = floors.find(s); it != floors.end()) lo = std::max(lo, it->second);
    if (auto it = ceilings.find(s); it != ceilings.end()) hi = std::min(hi, it->second);
    return {lo, hi};
}

std::string Constraints::digest() const {
    std::ostringstream os;
    if (empty()) return "none";
    if (global_floor) os << "floor_all>=" << *global_floor << ";";
    os << "site_floors=" << floors.size() << ";site_ceilings=" << ceilings.size();
    return os.str();
}

// ---------------------------------------------------------------------------
// Brute enumeration
// ---------------------------------------------------------------------------

namespace {

struct BruteSetup {
    std::vector<int> lo, hi;
    std::vector<std::array<NeighborRef, 4>> nbr;
    double states = 1.0;
    bool infeasible = false;
};

BruteSetup brute_setup(const Region& region, const BoundaryCondition& bc, const HeightWindow& window,
                       const Constraints& constraints, const Guards& guards) {
    BruteSetup s;
    s.nbr = neighbor_table(region, bc);
    s.lo.resize(static_cast<std::size_t>(region.size()));
    s.hi.resize(static_cast<std::size_t>(region.size()));
    for (int i = 0; i < region.size(); ++i) {
        auto [lo, hi] = constraints.bounds(region.site_at(i), window);
        s.lo[static_cast<std::size_t>(i)] = lo;
        s.hi[static_cast<std::size_t>(i)] = hi;
        if (lo > hi) s.infeasible = true;
        s.states *= static_cast<double>(std::max(0, hi - lo + 1));
    }
    if (!s.infeasible && s.states > guards.max_brute_states)
        throw GuardExceeded("brute state space " + std::to_string(s.states) + " exceeds guard");
    return s;
}

}  // namespace

PartitionResult partition_brute(const Region& region, const BoundaryCondition& bc, double beta,
                                const HeightWindow& window, const Constraints& constraints,
                                const Guards& guards) {
    PartitionResult res;
    res.window = window;
    res.beta = beta;
    res.constraint_digest = constraints.digest();
    res.method = PartitionMethod::brute;

    BruteSetup s = brute_setup(region, bc, window, constraints, guards);
    if (s.infeasible) {
        res.infeasible = true;
        res.log_z = kNegInf;
        return res;
    }
    LogAccumulator acc{beta};
    enumerate_states(s.lo, s.hi, s.nbr, [&](const std::vector<int>&, std::int64_t e) { acc.add(e); });
    res.log_z = acc.log_value();
    return res;
}

double event_probability(const Region& region, const BoundaryCondition& bc, double beta,
                         const HeightWindow& window,
                         const std::function<bool(const HeightConfig&)>& predicate,
                         const Guards& guards) {
    BruteSetup s = brute_setup(region, bc, window, {}, guards);
    HeightConfig scratch(region, bc);
    LogAccumulator all{beta}, hit{beta};
    enumerate_states(s.lo, s.hi, s.nbr, [&](const std::vector<int>& h, std::int64_t e) {
        all.add(e);
        std::copy(h.begin(), h.end(), scratch.heights().begin());
        if (predicate(scratch)) {
            hit.add(e);
            hit.match_shift(all);
        }
    });
    if (!hit.any || hit.acc <= 0) return 0.0;
    return std::exp(hit.log_value() - all.log_value());
}

double event_probability_constrained(const Region& region, const BoundaryCondition& bc, double beta,
                                     const HeightWindow& window, const Constraints& event,
                                     const Guards& guards) {
    const bool transferable = region.is_rectangular();
    auto run = [&](const Constraints& c) {
        return transferable ? partition_transfer(region, bc, beta, window, c, guards)
                            : partition_brute(region, bc, beta, window, c, guards);
    };
    PartitionResult num = run(event);
    if (num.infeasible) return 0.0;
    PartitionResult den = run({});
    return std::exp(num.log_z - den.log_z);
}

// ---------------------------------------------------------------------------
// Transfer matrix over rows
// ---------------------------------------------------------------------------

PartitionResult partition_transfer(const Region& region, const BoundaryCondition& bc, double beta,
                                   const HeightWindow& window, const Constraints& constraints,
                                   const Guards& guards) {
    if (!region.is_rectangular())
        throw std::invalid_argument("partition_transfer: region must be a full rectangle");
    PartitionResult res;
    res.window = window;
    res.beta = beta;
    res.constraint_digest = constraints.digest();
    res.method = PartitionMethod::transfer;

    const int W = region.xmax() - region.xmin() + 1;
    const int K = window.size();
    double states_d = std::pow(static_cast<double>(K), W);
    if (states_d > guards.max_row_states)
        throw GuardExceeded("transfer row states " + std::to_string(states_d) + " exceed guard");
    if (states_d > 6.7e7) throw GuardExceeded("transfer row state vector would not fit in memory");
    const std::size_t S = static_cast<std::size_t>(states_d + 0.5);
    const std::size_t SW1 = S / static_cast<std::size_t>(K);  // K^(W-1)

    const double q = std::exp(-beta);

    // horizontal in-row bond cost, reused every row
    std::vector<double> rowbase(S);
    {
        std::vector<int> d(static_cast<std::size_t>(W), 0);
        int hcost = 0;
        for (std::size_t s = 0;; ++s) {
            rowbase[s] = std::exp(-beta * hcost);
            std::size_t c = 0;
            while (c < static_cast<std::size_t>(W)) {
                auto cost_at = [&](std::size_t cc) {
                    int x = 0;
                    if (cc > 0) x += std::abs(d[cc] - d[cc - 1]);
                    if (cc + 1 < static_cast<std::size_t>(W)) x += std::abs(d[cc] - d[cc + 1]);
                    return x;
                };
                if (d[c] < K - 1) {
                    hcost -= cost_at(c);
                    d[c] += 1;
                    hcost += cost_at(c);
                    break;
                }
                hcost -= cost_at(c);
                d[c] = 0;
                hcost += cost_at(c);
                ++c;
            }
            if (c == static_cast<std::size_t>(W)) break;
        }
    }

    // per-column multiply v[s] *= f[digit_c(s)]
    auto apply_column = [&](std::vector<double>& v, int c, const std::vector<double>& f) {
        std::size_t stride = 1;
        for (int t = 0; t < c; ++t) stride *= static_cast<std::size_t>(K);
        const std::size_t block = stride * static_cast<std::size_t>(K);
        for (std::size_t base0 = 0; base0 < S; base0 += block)
            for (std::size_t t = 0; t < static_cast<std::size_t>(K); ++t) {
                const double fk = f[t];
                double* p = v.data() + base0 + t * stride;
                for (std::size_t lo = 0; lo < stride; ++lo) p[lo] *= fk;
            }
    };

    // vertical |h - h'| kernel applied factorwise with the two-pass
    // geometric recursion
    std::vector<double> fiber(static_cast<std::size_t>(K));
    std::vector<double> pref(static_cast<std::size_t>(K));
    auto apply_vertical = [&](std::vector<double>& v) {
        std::size_t stride = 1;
        for (int c = 0; c < W; ++c) {
            const std::size_t block = stride * static_cast<std::size_t>(K);
            for (std::size_t base0 = 0; base0 < S; base0 += block)
                for (std::size_t lo = 0; lo < stride; ++lo) {
                    double* p = v.data() + base0 + lo;
                    for (std::size_t t = 0; t < static_cast<std::size_t>(K); ++t) fiber[t] = p[t * stride];
                    double run = 0.0;
                    for (std::size_t t = 0; t < static_cast<std::size_t>(K); ++t) {
                        run = fiber[t] + q * run;
                        pref[t] = run;
                    }
                    run = 0.0;
                    for (std::size_t t = static_cast<std::size_t>(K); t-- > 0;) {
                        run = fiber[t] + q * run;
                        p[t * stride] = pref[t] + run - fiber[t];
                    }
                }
            stride = block;
        }
    };

    auto wall_weights = [&](int y) {
        std::vector<double> wl(static_cast<std::size_t>(K)), wr(static_cast<std::size_t>(K));
        int bl = bc.value_at({region.xmin() - 1, y});
        int br = bc.value_at({region.xmax() + 1, y});
        for (int k = 0; k < K; ++k) {
            int h = window.hmin + k;
            wl[static_cast<std::size_t>(k)] = std::exp(-beta * std::abs(h - bl));
            wr[static_cast<std::size_t>(k)] = std::exp(-beta * std::abs(h - br));
        }
        return std::pair(wl, wr);
    };

    // returns false if the whole row is forbidden
    auto apply_row_constraints = [&](std::vector<double>& v, int y) {
        if (constraints.empty()) return true;
        for (int c = 0; c < W; ++c) {
            Site s{region.xmin() + c, y};
            auto [lo, hi] = constraints.bounds(s, window);
            if (lo > hi) return false;
            if (lo <= window.hmin && hi >= window.hmax) continue;
            std::vector<double> mask(static_cast<std::size_t>(K), 0.0);
            for (int k = 0; k < K; ++k)
                if (window.contains(window.hmin + k) && window.hmin + k >= lo && window.hmin + k <= hi)
                    mask[static_cast<std::size_t>(k)] = 1.0;
            apply_column(v, c, mask);
        }
        return true;
    };

    std::vector<double> v = rowbase;
    double log_scale = 0.0;
    bool dead = false;

    auto rescale = [&]() {
        double m = *std::max_element(v.begin(), v.end());
        if (!(m > 0)) {
            dead = true;
            return;
        }
        if (m < 1e-150 || m > 1e150) {
            for (double& x : v) x /= m;
            log_scale += std::log(m);
        }
    };

    // bottom boundary bonds
    for (int c = 0; c < W && !dead; ++c) {
        int bb = bc.value_at({region.xmin() + c, region.ymin() - 1});
        std::vector<double> f(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) f[static_cast<std::size_t>(k)] = std::exp(-beta * std::abs(window.hmin + k - bb));
        apply_column(v, c, f);
    }
    for (int y = region.ymin(); y <= region.ymax() && !dead; ++y) {
        if (y > region.ymin()) {
            apply_vertical(v);
            for (std::size_t s = 0; s < S; ++s) v[s] *= rowbase[s];
        }
        auto [wl, wr] = wall_weights(y);
        for (std::size_t s = 0; s < S; ++s) v[s] *= wl[s % static_cast<std::size_t>(K)] * wr[s / SW1];
        if (!apply_row_constraints(v, y)) {
            dead = true;
            break;
        }
        rescale();
    }
    if (!dead) {
        for (int c = 0; c < W; ++c) {
            int tb = bc.value_at({region.xmin() + c, region.ymax() + 1});
            std::vector<double> f(static_cast<std::size_t>(K));
            for (int k = 0; k < K; ++k)
                f[static_cast<std::size_t>(k)] = std::exp(-beta * std::abs(window.hmin + k - tb));
            apply_column(v, c, f);
        }
    }
    double total = dead ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0);
    if (!(total > 0)) {
        res.infeasible = true;
        res.log_z = kNegInf;
        return res;
    }
    res.log_z = std::log(total) + log_scale;
    return res;
}

// ---------------------------------------------------------------------------
// FKG lattice condition
// ---------------------------------------------------------------------------

FkgReport verify_fkg(const Region& region, const BoundaryCondition& bc, double beta,
                     const HeightWindow& window, const Guards& guards) {
    (void)beta;  // the lattice condition reduces to an integer energy inequality
    BruteSetup s = brute_setup(region, bc, window, {}, guards);
    if (s.states * s.states > guards.max_fkg_pairs)
        throw GuardExceeded("fkg pair count exceeds guard");

    std::vector<std::vector<int>> configs;
    configs.reserve(static_cast<std::size_t>(s.states));
    enumerate_states(s.lo, s.hi, s.nbr,
                     [&](const std::vector<int>& h, std::int64_t) { configs.push_back(h); });

    const std::size_t n = static_cast<std::size_t>(region.size());
    std::vector<std::int64_t> energies(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) energies[i] = total_energy(configs[i], s.nbr);

    FkgReport report;
    report.max_slack = std::numeric_limits<std::int64_t>::min();
    std::vector<int> hi_cfg(n), lo_cfg(n);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        for (std::size_t j = i + 1; j < configs.size(); ++j) {
            int diff = 0;
            for (std::size_t k = 0; k < n && diff < 2; ++k) diff += configs[i][k] != configs[j][k];
            if (diff < 2) {
                report.pairs_pruned++;
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                hi_cfg[k] = std::max(configs[i][k], configs[j][k]);
                lo_cfg[k] = std::min(configs[i][k], configs[j][k]);
            }
            std::int64_t slack = total_energy(hi_cfg, s.nbr) + total_energy(lo_cfg, s.nbr) -
                                 energies[i] - energies[j];
            report.pairs_checked++;
            report.max_slack = std::max(report.max_slack, slack);
            if (slack > 0) report.violations.push_back({configs[i], configs[j], slack});
        }
    }
    if (report.pairs_checked == 0) report.max_slack = 0;
    return report;
}

// ---------------------------------------------------------------------------
// Cluster-expansion potentials via Moebius inversion
// ---------------------------------------------------------------------------

namespace {

std::vector<Site> canonical_shape(std::vector<Site> v) {
    int mx = v.front().x1, my = v.front().x2;
    for (Site s : v) {
        mx = std::min(mx, s.x1);
        my = std::min(my, s.x2);
    }
    for (Site& s : v) s = {s.x1 - mx, s.x2 - my};
    std::sort(v.begin(), v.end(), [](Site a, Site b) { return a.x2 != b.x2 ? a.x2 < b.x2 : a.x1 < b.x1; });
    return v;
}

bool bond_connected(const std::vector<Site>& v) {
    if (v.size() <= 1) return true;
    std::unordered_set<Site, SiteHash> all(v.begin(), v.end());
    std::unordered_set<Site, SiteHash> seen{v.front()};
    std::deque<Site> q{v.front()};
    while (!q.empty()) {
        Site s = q.front();
        q.pop_front();
        for (Site d : kNeighborSteps) {
            Site y = s + d;
            if (all.count(y) && seen.insert(y).second) q.push_back(y);
        }
    }
    return seen.size() == v.size();
}

struct ShapeKeyHash {
    std::size_t operator()(const std::vector<Site>& v) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (Site s : v) h = (h ^ SiteHash{}(s)) * 1099511628211ull;
        return h;
    }
};

}  // namespace

const PotentialEntry* PotentialTable::find(const std::vector<Site>& canonical) const {
    for (const auto& e : entries)
        if (e.shape == canonical) return &e;
    return nullptr;
}

double PotentialTable::fitted_decay_rate() const {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& e : entries) {
        if (!e.connected || e.size < 2) continue;
        double y = std::log(std::max(std::abs(e.phi), 1e-300));
        double x = e.d_proxy;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    double den = n * sxx - sx * sx;
    return den != 0 ? (n * sxy - sx * sy) / den : 0.0;
}

PotentialTable extract_potentials(int max_sites, const HeightWindow& window, double beta,
                                  const Region& bounding, const Guards& guards) {
    if (max_sites < 1 || max_sites > guards.max_potential_sites)
        throw GuardExceeded("extract_potentials: max_sites outside the guarded range");

    const auto& sites = bounding.sites();
    const int N = bounding.size();
    if (N > 20) throw GuardExceeded("extract_potentials: bounding region too large");

    // every nonempty subset of the bounding region with <= max_sites sites
    std::vector<std::vector<int>> subsets;
    std::vector<int> pick;
    auto rec = [&](auto&& self, int start) -> void {
        if (!pick.empty()) subsets.push_back(pick);
        if (static_cast<int>(pick.size()) == max_sites) return;
        for (int i = start; i < N; ++i) {
            pick.push_back(i);
            self(self, i + 1);
            pick.pop_back();
        }
    };
    rec(rec, 0);

    // log Z with zero bc for each subset, keyed by its index list
    auto subset_key = [&](const std::vector<int>& ix) {
        std::uint64_t k = 0;
        for (int i : ix) k |= (1ull << i);
        return k;
    };
    std::unordered_map<std::uint64_t, double> logz;
    std::unordered_map<std::uint64_t, double> phi;
    for (const auto& ix : subsets) {
        std::vector<Site> v;
        for (int i : ix) v.push_back(sites[static_cast<std::size_t>(i)]);
        PartitionResult pr =
            partition_brute(Region::custom(v), BoundaryCondition::zero(), beta, window, {}, guards);
        logz[subset_key(ix)] = pr.log_z;
    }

    // Moebius inversion over the subset lattice
    PotentialTable table;
    table.window = window;
    table.beta = beta;
    table.max_sites = max_sites;
    for (const auto& ix : subsets) {
        const int n = static_cast<int>(ix.size());
        double p = 0.0;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::uint64_t key = 0;
            int bits = 0;
            for (int t = 0; t < n; ++t)
                if (mask & (1u << t)) {
                    key |= 1ull << ix[static_cast<std::size_t>(t)];
                    ++bits;
                }
            double term = logz.at(key);
            p += ((n - bits) % 2 == 0 ? term : -term);
        }
        phi[subset_key(ix)] = p;
    }

    // reconstruction identity: sum of phi over subsets of Lambda == log Z_Lambda
    for (const auto& ix : subsets) {
        const int n = static_cast<int>(ix.size());
        double recon = 0.0;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::uint64_t key = 0;
            for (int t = 0; t < n; ++t)
                if (mask & (1u << t)) key |= 1ull << ix[static_cast<std::size_t>(t)];
            recon += phi.at(key);
        }
        table.max_reconstruction_error =
            std::max(table.max_reconstruction_error, std::abs(recon - logz.at(subset_key(ix))));
    }

    // group placements by canonical shape
    std::unordered_map<std::vector<Site>, std::vector<std::pair<std::vector<Site>, double>>, ShapeKeyHash>
        groups;
    for (const auto& ix : subsets) {
        std::vector<Site> v;
        for (int i : ix) v.push_back(sites[static_cast<std::size_t>(i)]);
        std::sort(v.begin(), v.end(), [](Site a, Site b) { return a.x2 != b.x2 ? a.x2 < b.x2 : a.x1 < b.x1; });
        groups[canonical_shape(v)].push_back({v, phi.at(subset_key(ix))});
    }
    for (auto& [shape, placements] : groups) {
        std::sort(placements.begin(), placements.end());
        double lo = placements.front().second, hi = placements.front().second;
        for (const auto& [v, p] : placements) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        table.max_shift_invariance_gap = std::max(table.max_shift_invariance_gap, hi - lo);
        PotentialEntry e;
        e.shape = shape;
        e.phi = placements.front().second;  // lexicographically least placement
        e.size = static_cast<int>(shape.size());
        int dx = 0, dy = 0, diam = 0;
        for (Site s : shape)
            for (Site t : shape) {
                dx = std::max(dx, std::abs(s.x1 - t.x1));
                dy = std::max(dy, std::abs(s.x2 - t.x2));
                diam = std::max(diam, std::max(std::abs(s.x1 - t.x1), std::abs(s.x2 - t.x2)));
            }
        e.diameter = diam;
        e.d_proxy = 2 * ((dx + 1) + (dy + 1));
        e.connected = bond_connected(shape);
        if (!e.connected)
            table.max_disconnected_abs_phi = std::max(table.max_disconnected_abs_phi, std::abs(e.phi));
        table.entries.push_back(std::move(e));
    }
    std::sort(table.entries.begin(), table.entries.end(), [](const PotentialEntry& a, const PotentialEntry& b) {
        if (a.size != b.size) return a.size < b.size;
        return a.shape < b.shape;
    });
    return table;
}

// ---------------------------------------------------------------------------
// Staircase ensembles, monotonicity, step free energy
// ---------------------------------------------------------------------------

double staircase_ratio(const std::vector<int>& a, const std::vector<int>& b, int L, int M,
                       double beta, const HeightWindow& window, const Guards& guards) {
    auto stair = BoundaryCondition::staircase(a, b, L, M);  // validates eq. constraints
    const int n = static_cast<int>(a.size());
    if (!(window.hmin <= 0 && window.hmax >= n))
        throw std::invalid_argument("staircase_ratio: window must contain [0, n]");
    Region r = Region::rectangle(L, M);
    PartitionResult num = partition_transfer(r, stair, beta, window, {}, guards);
    PartitionResult den = partition_transfer(r, BoundaryCondition::zero(), beta, window, {}, guards);
    return num.log_z - den.log_z;
}

MonotonicityReport check_monotonicity(const std::vector<int>& a, const std::vector<int>& b, int L,
                                      const std::vector<int>& M_list, double beta,
                                      const HeightWindow& window, const Guards& guards) {
    if (a.empty() || a.size() != b.size())
        throw std::invalid_argument("check_monotonicity: need n >= 1 jumps on both walls");
    MonotonicityReport rep;
    rep.M_list = M_list;
    std::vector<int> a_shift = a, b_shift = b;
    a_shift.back() += 1;
    b_shift.back() += 1;
    for (int M : M_list) {
        double joint = staircase_ratio(a, b, L, M, beta, window, guards);
        double singles = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            singles += staircase_ratio({a[i]}, {b[i]}, L, M, beta, window, guards);
        rep.joint.push_back(joint);
        rep.singles_sum.push_back(singles);
        rep.delta.push_back(joint - singles);
        rep.shift_diff.push_back(joint - staircase_ratio(a_shift, b_shift, L, M, beta, window, guards));
    }
    rep.delta_nonpositive_at_largest_M = !rep.delta.empty() && rep.delta.back() <= 0.0;
    rep.delta_nonincreasing = true;
    for (std::size_t i = 0; i + 1 < rep.delta.size(); ++i)
        if (rep.delta[i + 1] > rep.delta[i] + 1e-12) rep.delta_nonincreasing = false;
    return rep;
}

double tau_zero_exact(int L, double beta, const HeightWindow& window, const Guards& guards) {
    if (L < 1) throw std::invalid_argument("tau_zero_exact: L >= 1");
    if (!(window.hmin <= 0 && window.hmax >= 1))
        throw std::invalid_argument("tau_zero_exact: window must contain [0, 1]");
    Region r = Region::box(L);
    PartitionResult zx = partition_transfer(r, BoundaryCondition::xi_step(), beta, window, {}, guards);
    PartitionResult z0 = partition_transfer(r, BoundaryCondition::zero(), beta, window, {}, guards);
    return -(zx.log_z - z0.log_z) / (2.0 * beta * (L + 0.5));
}

}  // namespace sos
