#pragma once

// Strength groups and per-group hash costs.
//
// A grouping splits the descending-probability set list into tau contiguous
// runs of approximately balanced probability mass; every password in group j
// is at least as likely as every password in group j+1. A cost vector
// attaches one hash cost per group under a server budget: the amortized cost
// of verifying a legitimate login is sum_j k_j * m_j, which must stay within
// C_max while every k_j stays at or above the floor k_min.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dahash/corpus.hpp"

namespace dahash {

// Contiguous partition of a distribution's sets into tau strength groups.
// ends[j] is the index one past the last set of group j, for j < tau-1; the
// last group always ends at the set count.
struct Grouping {
    std::uint32_t tau = 1;
    std::vector<std::size_t> ends;    // tau - 1 cut points, strictly increasing
    std::vector<double> masses;       // per-group probability mass, size tau

    std::size_t group_begin(std::size_t j) const { return j == 0 ? 0 : ends[j - 1]; }
    std::size_t group_end(std::size_t j, std::size_t set_count) const {
        return j + 1 == tau ? set_count : ends[j];
    }
    // Group index owning the set at `set_index`.
    std::size_t group_of(std::size_t set_index) const {
        std::size_t j = 0;
        while (j < ends.size() && set_index >= ends[j]) ++j;
        return j;
    }
};

// Per-group hash costs under a budget.
struct CostVector {
    std::vector<double> costs;  // one per group, each >= min_cost
    double budget = 0.0;        // C_max
    double min_cost = 0.0;      // k_min
};

// Distribution as the attacker sees it: every set carries its group's cost.
struct CostedSet {
    std::uint64_t count = 0;
    double prob = 0.0;
    double cost = 0.0;
};

struct CostedDistribution {
    std::vector<CostedSet> sets;
};

// Greedy mass-balancing sweep. The j-th boundary lands where cumulative mass
// first reaches j/tau of the total; the straddling set goes to whichever
// side leaves the cumulative mass closer to that target (ties keep it in the
// earlier group). Boundaries are clamped so that every group keeps at least
// one set. Deterministic: same distribution, same boundaries.
inline Grouping partition_by_mass(const Distribution& dist, std::uint32_t tau) {
    const std::size_t n = dist.sets.size();
    if (tau < 1 || tau > n)
        throw std::invalid_argument("partition_by_mass: tau must be in [1, set count]");

    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        cum[i + 1] = cum[i] + static_cast<double>(dist.sets[i].count) * dist.sets[i].prob;

    Grouping g;
    g.tau = tau;
    std::size_t prev = 0;
    for (std::uint32_t j = 1; j < tau; ++j) {
        const double target = cum[n] * static_cast<double>(j) / static_cast<double>(tau);
        const std::size_t lo = prev + 1;          // group j must keep >= 1 set
        const std::size_t hi = n - (tau - j);     // leave >= 1 set per later group
        std::size_t i = lo;
        while (i < hi && cum[i] < target) ++i;
        std::size_t pick = i;
        if (cum[i] >= target && i > lo &&
            std::abs(cum[i - 1] - target) < std::abs(cum[i] - target))
            pick = i - 1;
        g.ends.push_back(pick);
        prev = pick;
    }
    g.masses.reserve(tau);
    for (std::uint32_t j = 0; j < tau; ++j) {
        const std::size_t b = g.group_begin(j);
        const std::size_t e = g.group_end(j, n);
        g.masses.push_back(cum[e] - cum[b]);
    }
    return g;
}

inline CostedDistribution assign_costs(const Distribution& dist, const Grouping& grouping,
                                       const CostVector& costs) {
    if (costs.costs.size() != grouping.tau)
        throw std::invalid_argument("assign_costs: cost count does not match group count");
    CostedDistribution out;
    out.sets.reserve(dist.sets.size());
    for (std::size_t i = 0; i < dist.sets.size(); ++i)
        out.sets.push_back(CostedSet{dist.sets[i].count, dist.sets[i].prob,
                                     costs.costs[grouping.group_of(i)]});
    return out;
}

// Amortized server cost of verifying a legitimate login: sum_j k_j * m_j.
inline double server_cost(const Distribution& dist, const Grouping& grouping,
                          const CostVector& costs) {
    if (costs.costs.size() != grouping.tau)
        throw std::invalid_argument("server_cost: cost count does not match group count");
    if (!grouping.ends.empty() && grouping.ends.back() >= dist.sets.size())
        throw std::invalid_argument("server_cost: grouping does not fit the distribution");
    double total = 0.0;
    for (std::size_t j = 0; j < grouping.tau; ++j) total += costs.costs[j] * grouping.masses[j];
    return total;
}

}  // namespace dahash
