#pragma once

// The rational offline attacker.
//
// A strategy is an ordering over equivalence sets plus a stopping budget B
// counted in individual password guesses. Guessing the next password costs
// its hash cost, paid only if no earlier guess already cracked the account
// (probability 1 - lambda of still being uncracked); success wins value v.
// The optimal ordering checks sets by descending bang-for-buck ratio
// prob/cost, and the optimal stopping point always lands on a set boundary,
// so the best response reduces to a single left-to-right scan over ratio-
// ordered sets.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dahash/strength.hpp"

namespace dahash {

// Absolute tolerance for utility comparisons: utilities closer than this are
// treated as tied, and ties resolve toward more guessing (see best_stop).
inline constexpr double kUtilityTieTol = 1e-9;

// The attacker's chosen strategy and its payoff.
struct AttackPlan {
    std::vector<std::size_t> order;      // set indices, descending prob/cost
    std::vector<std::size_t> positions;  // inverse of order: set index -> rank
    std::uint64_t guesses = 0;           // B*: individual guesses, at a set boundary
    double success = 0.0;                // lambda: probability mass cracked
    double expected_utility = 0.0;       // v * lambda - expected guessing cost
};

inline void validate_costed(const CostedDistribution& costed) {
    if (costed.sets.empty()) throw std::invalid_argument("adversary: no equivalence sets");
    for (const auto& s : costed.sets) {
        if (!(s.cost > 0.0)) throw std::invalid_argument("adversary: non-positive cost");
        if (s.count == 0 || !(s.prob > 0.0))
            throw std::invalid_argument("adversary: invalid equivalence set");
    }
}

// Sets sorted by prob/cost descending; ties broken by higher prob first,
// then by original index, so the order is a deterministic total order.
inline std::vector<std::size_t> order_by_ratio(const CostedDistribution& costed) {
    validate_costed(costed);
    std::vector<std::size_t> order(costed.sets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ra = costed.sets[a].prob / costed.sets[a].cost;
        const double rb = costed.sets[b].prob / costed.sets[b].cost;
        if (ra != rb) return ra > rb;
        if (costed.sets[a].prob != costed.sets[b].prob)
            return costed.sets[a].prob > costed.sets[b].prob;
        return a < b;
    });
    return order;
}

namespace detail {
// Walks `order` and returns the index one past the last whole set inside the
// first B guesses; throws unless B lands exactly on a set boundary.
inline std::size_t boundary_prefix(const CostedDistribution& costed,
                                   const std::vector<std::size_t>& order, std::uint64_t B) {
    std::uint64_t taken = 0;
    std::size_t i = 0;
    while (taken < B) {
        if (i == order.size()) throw std::out_of_range("adversary: B exceeds password count");
        taken += costed.sets[order[i]].count;
        ++i;
    }
    if (taken != B) throw std::invalid_argument("adversary: B is not at a set boundary");
    return i;
}
}  // namespace detail

// lambda(order, B): probability mass of the first B passwords. B must land
// on a set boundary.
inline double success_rate(const CostedDistribution& costed, const std::vector<std::size_t>& order,
                           std::uint64_t B) {
    const std::size_t sets = detail::boundary_prefix(costed, order, B);
    double lambda = 0.0;
    for (std::size_t i = 0; i < sets; ++i)
        lambda += static_cast<double>(costed.sets[order[i]].count) * costed.sets[order[i]].prob;
    return lambda;
}

// Per-guess variant: B may split an equivalence set.
inline double success_rate_per_guess(const CostedDistribution& costed,
                                     const std::vector<std::size_t>& order, std::uint64_t B) {
    double lambda = 0.0;
    std::uint64_t left = B;
    for (std::size_t i = 0; i < order.size() && left > 0; ++i) {
        const auto& s = costed.sets[order[i]];
        const std::uint64_t take = std::min(left, s.count);
        lambda += static_cast<double>(take) * s.prob;
        left -= take;
    }
    if (left > 0) throw std::out_of_range("adversary: B exceeds password count");
    return lambda;
}

// Expected attacker utility of checking the first B passwords of `order`:
// v * lambda(B) minus the expected guessing cost, where guess i costs its
// hash cost times the probability (1 - lambda at i-1) that the account
// survived all earlier guesses. Evaluated set-by-set: checking a whole set
// (count c, prob p, cost k) starting from cracked mass L adds
//   v*c*p - k*c*(1 - L) + k*p*c*(c-1)/2
// (the summed survival probabilities within the set form an arithmetic
// series). B must land on a set boundary.
inline double utility(double v, const CostedDistribution& costed,
                      const std::vector<std::size_t>& order, std::uint64_t B) {
    if (v < 0.0) throw std::invalid_argument("adversary: negative value");
    const std::size_t sets = detail::boundary_prefix(costed, order, B);
    double lambda = 0.0, total = 0.0;
    for (std::size_t i = 0; i < sets; ++i) {
        const auto& s = costed.sets[order[i]];
        const double c = static_cast<double>(s.count);
        total += v * c * s.prob - s.cost * c * (1.0 - lambda) +
                 s.cost * s.prob * c * (c - 1.0) / 2.0;
        lambda += c * s.prob;
    }
    return total;
}

// Literal guess-by-guess evaluation; reference implementation for the closed
// form above and the variant that accepts any B.
inline double utility_per_guess(double v, const CostedDistribution& costed,
                                const std::vector<std::size_t>& order, std::uint64_t B) {
    if (v < 0.0) throw std::invalid_argument("adversary: negative value");
    double lambda = 0.0, total = 0.0;
    std::uint64_t left = B;
    for (std::size_t i = 0; i < order.size() && left > 0; ++i) {
        const auto& s = costed.sets[order[i]];
        for (std::uint64_t g = 0; g < s.count && left > 0; ++g, --left) {
            total += v * s.prob - s.cost * (1.0 - lambda);
            lambda += s.prob;
        }
    }
    if (left > 0) throw std::out_of_range("adversary: B exceeds password count");
    return total;
}

namespace detail {
struct BestStop {
    std::uint64_t guesses = 0;
    double success = 0.0;
    double utility = 0.0;
};

// Single scan along `order` maximizing utility over the n'+1 boundary stops.
// Utilities within kUtilityTieTol of the running maximum count as ties, and
// ties resolve to the largest B: an attacker indifferent at the margin keeps
// guessing, which is the pessimistic assumption for the defender.
inline BestStop best_stop(double v, const CostedDistribution& costed,
                          const std::vector<std::size_t>& order) {
    BestStop best;  // B = 0: never guess, utility 0 — always available
    double best_seen = 0.0;
    double lambda = 0.0, total = 0.0;
    std::uint64_t guesses = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& s = costed.sets[order[i]];
        const double c = static_cast<double>(s.count);
        total += v * c * s.prob - s.cost * c * (1.0 - lambda) +
                 s.cost * s.prob * c * (c - 1.0) / 2.0;
        lambda += c * s.prob;
        guesses += s.count;
        if (total >= best_seen - kUtilityTieTol) {
            best = BestStop{guesses, lambda, total};
            if (total > best_seen) best_seen = total;
        }
    }
    return best;
}
}  // namespace detail

// The attacker's optimal strategy: ratio order, best boundary stop.
inline AttackPlan best_response(double v, const CostedDistribution& costed) {
    if (v < 0.0) throw std::invalid_argument("adversary: negative value");
    AttackPlan plan;
    plan.order = order_by_ratio(costed);
    const auto stop = detail::best_stop(v, costed, plan.order);
    plan.guesses = stop.guesses;
    plan.success = stop.success;
    plan.expected_utility = stop.utility;
    plan.positions.resize(plan.order.size());
    for (std::size_t rank = 0; rank < plan.order.size(); ++rank)
        plan.positions[plan.order[rank]] = rank;
    return plan;
}

}  // namespace dahash
