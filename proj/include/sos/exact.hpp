#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sos/lattice.hpp"

namespace sos {

/// Thrown when a state-space guard would be exceeded.
struct GuardExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite height range standing in for Z in exact computations.
struct HeightWindow {
    int hmin = 0;
    int hmax = 0;

    HeightWindow() = default;
    HeightWindow(int lo, int hi) : hmin(lo), hmax(hi) {
        if (lo > hi) throw std::invalid_argument("HeightWindow: hmin > hmax");
    }
    int size() const { return hmax - hmin + 1; }
    bool contains(int h) const { return h >= hmin && h <= hmax; }
    HeightWindow shifted(int c) const { return {hmin + c, hmax + c}; }

    /// [min bc - margin, max bc + margin].
    static HeightWindow around(const BoundaryCondition& bc, int margin);
    /// Default margin max(2, ceil(4/beta)); single-site tails decay like
    /// exp(-4 beta w).
    static int default_margin(double beta);
};

/// Optional per-site floors/ceilings plus the U+/U- sign constraints and a
/// global floor. Infeasible combinations (floor > ceiling somewhere) yield a
/// flagged -inf partition value, not an error.
struct Constraints {
    std::map<Site, int> floors;    // eta(x) >= v
    std::map<Site, int> ceilings;  // eta(x) <= v
    std::optional<int> global_floor;

    void add_floor(Site s, int v);
    void add_ceiling(Site s, int v);
    void add_u_plus(const std::vector<Site>& sites);   // eta >= 0 on U+
    void add_u_minus(const std::vector<Site>& sites);  // eta <= 0 on U-

    bool empty() const { return floors.empty() && ceilings.empty() && !global_floor; }
    /// Inclusive height bounds for one site inside the window.
    std::pair<int, int> bounds(Site s, const HeightWindow& w) const;
    std::string digest() const;
};

struct Guards {
    double max_brute_states = 1e8;
    double max_row_states = 1e6;
    double max_fkg_pairs = 1e8;
    int max_potential_sites = 6;
};

enum class PartitionMethod { brute, transfer };

struct PartitionResult {
    double log_z = 0.0;  // natural log; -inf when infeasible
    HeightWindow window;
    double beta = 0.0;
    std::string constraint_digest;
    PartitionMethod method = PartitionMethod::brute;
    bool infeasible = false;
};

/// log Z by direct enumeration of window^|Lambda| states, log-domain
/// accumulation with integer-energy max shift.
PartitionResult partition_brute(const Region& region, const BoundaryCondition& bc, double beta,
                                const HeightWindow& window, const Constraints& constraints = {},
                                const Guards& guards = {});

/// Same value contract as partition_brute, for rectangular regions, via a
/// row-to-row transfer with the |h - h'| kernel applied factorwise.
PartitionResult partition_transfer(const Region& region, const BoundaryCondition& bc, double beta,
                                   const HeightWindow& window, const Constraints& constraints = {},
                                   const Guards& guards = {});

/// P(predicate) under the window-truncated Gibbs measure, by enumeration.
double event_probability(const Region& region, const BoundaryCondition& bc, double beta,
                         const HeightWindow& window,
                         const std::function<bool(const HeightConfig&)>& predicate,
                         const Guards& guards = {});

/// P(event) for an event expressible as per-site constraints; uses the
/// transfer method on rectangles, enumeration otherwise.
double event_probability_constrained(const Region& region, const BoundaryCondition& bc, double beta,
                                     const HeightWindow& window, const Constraints& event,
                                     const Guards& guards = {});

struct FkgReport {
    struct Violation {
        std::vector<int> eta, eta_prime;
        std::int64_t amount;  // H(max)+H(min) - H(eta) - H(eta'), > 0
    };
    std::vector<Violation> violations;
    std::int64_t max_slack = 0;  // max over checked pairs; <= 0 iff FKG holds
    std::uint64_t pairs_checked = 0;
    std::uint64_t pairs_pruned = 0;  // pairs differing at < 2 sites
};

/// Exhaustive check of the FKG lattice condition
/// H(eta v eta') + H(eta ^ eta') <= H(eta) + H(eta') in integer arithmetic.
FkgReport verify_fkg(const Region& region, const BoundaryCondition& bc, double beta,
                     const HeightWindow& window, const Guards& guards = {});

struct PotentialEntry {
    std::vector<Site> shape;  // canonical: min corner shifted to (0,0)
    double phi = 0.0;
    int size = 0;
    int diameter = 0;  // Chebyshev diameter
    int d_proxy = 0;   // perimeter of the smallest bounding rectangle
    bool connected = false;
};

struct PotentialTable {
    std::vector<PotentialEntry> entries;
    HeightWindow window;
    double beta = 0.0;
    int max_sites = 0;
    double max_reconstruction_error = 0.0;   // |sum_{V in Lambda} phi(V) - log Z_Lambda|
    double max_shift_invariance_gap = 0.0;   // spread over translates of a shape
    double max_disconnected_abs_phi = 0.0;   // should vanish

    const PotentialEntry* find(const std::vector<Site>& canonical_shape) const;
    /// Least-squares slope of log|phi| against d_proxy over connected shapes.
    double fitted_decay_rate() const;
};

/// Moebius extraction phi(V) = sum_{W subset V} (-1)^{|V \ W|} log Z_W with
/// zero bc, over every subset of `bounding` with at most max_sites sites.
PotentialTable extract_potentials(int max_sites, const HeightWindow& window, double beta,
                                  const Region& bounding, const Guards& guards = {});

/// log Z(a;b;L,M) - log Z_Lambda via two transfer runs sharing the window.
double staircase_ratio(const std::vector<int>& a, const std::vector<int>& b, int L, int M,
                       double beta, const HeightWindow& window, const Guards& guards = {});

struct MonotonicityReport {
    std::vector<int> M_list;
    std::vector<double> joint;        // log-ratio of the n-step staircase
    std::vector<double> singles_sum;  // sum of single-step log-ratios
    std::vector<double> delta;        // joint - singles_sum
    std::vector<double> shift_diff;   // log-ratio(a,b) - log-ratio(a_n+1, b_n+1)
    bool delta_nonpositive_at_largest_M = false;
    bool delta_nonincreasing = false;
};

/// Finite-M proxies for the product inequality and the single-step shift
/// inequality; the statements hold at M -> infinity, so trends are reported.
MonotonicityReport check_monotonicity(const std::vector<int>& a, const std::vector<int>& b, int L,
                                      const std::vector<int>& M_list, double beta,
                                      const HeightWindow& window, const Guards& guards = {});

/// Finite-L step free energy: -(log Z^xi - log Z) / (2 beta (L + 1/2)) on
/// the box Lambda_L, both runs sharing the window. The normalization is the
/// crossing length 2L+1, so the beta -> infinity value is exactly 1 at any L.
double tau_zero_exact(int L, double beta, const HeightWindow& window, const Guards& guards = {});

}  // namespace sos
