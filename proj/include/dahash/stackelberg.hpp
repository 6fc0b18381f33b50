#pragma once

// The defender's optimizer.
//
// The server moves first: it commits to a per-group cost vector k under the
// budget sum_j k_j * m_j <= C_max with every k_j >= k_min. The attacker then
// plays its best response, cracking a lambda fraction of accounts. The
// defender searches the feasible region for the vector minimizing that
// lambda. Candidates are non-negative weight vectors projected onto the
// budget plane, searched by differential evolution over log-scale weights;
// spending the whole budget is without loss because the attacker's success
// never increases when any single cost is raised.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dahash/adversary.hpp"
#include "dahash/corpus.hpp"
#include "dahash/rng.hpp"
#include "dahash/strength.hpp"

namespace dahash {

struct FeasibleRegion {
    std::vector<double> masses;  // per-group probability mass, all > 0
    double budget = 0.0;         // C_max
    double min_cost = 0.0;       // k_min
};

inline bool is_feasible(const FeasibleRegion& region) {
    double mass = 0.0;
    for (double m : region.masses) mass += m;
    return region.min_cost * mass <= region.budget;
}

// Maps a non-negative weight vector onto the budget plane: k_j = k_min +
// alpha * w_j with alpha chosen so the budget is spent exactly. All-zero
// weights mean "no preference" and are treated as all-ones (uniform costs).
inline CostVector project_feasible(const std::vector<double>& weights,
                                   const FeasibleRegion& region) {
    if (weights.size() != region.masses.size())
        throw std::invalid_argument("project_feasible: weight count does not match group count");
    if (!is_feasible(region))
        throw std::invalid_argument("project_feasible: infeasible region (k_min alone exceeds budget)");
    double weighted = 0.0, mass = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (!std::isfinite(weights[j]) || weights[j] < 0.0)
            throw std::invalid_argument("project_feasible: weights must be finite and non-negative");
        weighted += region.masses[j] * weights[j];
        mass += region.masses[j];
    }
    CostVector out;
    out.budget = region.budget;
    out.min_cost = region.min_cost;
    if (weighted == 0.0) {
        // Degenerate direction: uniform split of the slack.
        const double k = region.min_cost + (region.budget - region.min_cost * mass) / mass;
        out.costs.assign(weights.size(), k);
        return out;
    }
    const double alpha = (region.budget - region.min_cost * mass) / weighted;
    out.costs.reserve(weights.size());
    for (double w : weights) out.costs.push_back(region.min_cost + alpha * w);
    return out;
}

struct OptResult {
    CostVector best_costs;          // k*, on the budget plane
    double attacker_success = 0.0;  // p_adv: best-response lambda against k*
    double attacker_utility = 0.0;  // u_adv at that response
    AttackPlan plan;
    std::uint64_t evals = 0;        // fitness evaluations spent
    std::uint64_t seed = 0;
};

namespace detail {

// Fitness evaluation with reusable buffers. Group runs of a distribution are
// already sorted by probability, and sets within one group share a cost, so
// the global ratio order is a tau-way merge of the group runs — no per-
// evaluation sort. The comparator mirrors order_by_ratio exactly, so the
// merged order equals the sorted one.
class GroupedResponse {
  public:
    GroupedResponse(const Distribution& dist, const Grouping& grouping)
        : dist_(dist), grouping_(grouping) {
        costed_.sets.resize(dist.sets.size());
        order_.resize(dist.sets.size());
        heads_.resize(grouping.tau);
    }

    // Best-response lambda against per-group costs `k`.
    double success_against(double v, const std::vector<double>& k) {
        fill_costed(k);
        merge_order();
        return best_stop(v, costed_, order_).success;
    }

    const CostedDistribution& costed() const { return costed_; }

  private:
    void fill_costed(const std::vector<double>& k) {
        for (std::size_t j = 0; j < grouping_.tau; ++j) {
            const std::size_t e = grouping_.group_end(j, dist_.sets.size());
            for (std::size_t i = grouping_.group_begin(j); i < e; ++i)
                costed_.sets[i] = CostedSet{dist_.sets[i].count, dist_.sets[i].prob, k[j]};
        }
    }

    void merge_order() {
        const std::size_t n = dist_.sets.size();
        for (std::size_t j = 0; j < grouping_.tau; ++j) heads_[j] = grouping_.group_begin(j);
        for (std::size_t pos = 0; pos < n; ++pos) {
            std::size_t pick = grouping_.tau;  // none yet
            for (std::size_t j = 0; j < grouping_.tau; ++j) {
                if (heads_[j] == grouping_.group_end(j, n)) continue;
                if (pick == grouping_.tau || takes_precedence(heads_[j], heads_[pick]))
                    pick = j;
            }
            order_[pos] = heads_[pick]++;
        }
    }

    bool takes_precedence(std::size_t a, std::size_t b) const {
        const double ra = costed_.sets[a].prob / costed_.sets[a].cost;
        const double rb = costed_.sets[b].prob / costed_.sets[b].cost;
        if (ra != rb) return ra > rb;
        if (costed_.sets[a].prob != costed_.sets[b].prob)
            return costed_.sets[a].prob > costed_.sets[b].prob;
        return a < b;
    }

    const Distribution& dist_;
    const Grouping& grouping_;
    CostedDistribution costed_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> heads_;
};

}  // namespace detail

// Best-response evaluation of a fixed cost vector against a (possibly
// different) distribution, partitioned by the supplied grouping.
inline std::pair<double, AttackPlan> evaluate_defender(const CostVector& k, double v,
                                                       const Distribution& dist_eval,
                                                       const Grouping& grouping) {
    if (k.costs.size() != grouping.tau)
        throw std::invalid_argument("evaluate_defender: cost count does not match group count");
    const AttackPlan plan = best_response(v, assign_costs(dist_eval, grouping, k));
    return {plan.success, plan};
}

// Searches the feasible cost vectors for the one minimizing the attacker's
// best-response success rate, by differential evolution (population 32,
// mutation factor 0.7, crossover rate 0.9, greedy selection) over log-scale
// weights u in [-3, 3]^tau with w_j = 10^u_j, each candidate projected onto
// the budget plane. The uniform vector k_j = C_max / mass is always part of
// the initial population, and the best candidate ever evaluated is returned,
// so the result never loses to uniform hashing. `iters` caps the number of
// fitness evaluations; the search is deterministic per seed.
inline OptResult opt_hash_cost_vec(double v, double c_max, double k_min,
                                   const Distribution& dist_train, std::uint32_t tau,
                                   std::uint64_t iters = 10000, std::uint64_t seed = 1) {
    if (v < 0.0) throw std::invalid_argument("opt_hash_cost_vec: negative value");
    const Grouping grouping = partition_by_mass(dist_train, tau);
    const FeasibleRegion region{grouping.masses, c_max, k_min};
    if (!is_feasible(region))
        throw std::invalid_argument("opt_hash_cost_vec: infeasible region (k_min alone exceeds budget)");

    constexpr std::size_t kPopulation = 32;
    constexpr double kMutation = 0.7;
    constexpr double kCrossover = 0.9;
    constexpr double kLo = -3.0, kHi = 3.0;
    if (iters < kPopulation)
        throw std::invalid_argument("opt_hash_cost_vec: iters below population size");

    detail::GroupedResponse responder(dist_train, grouping);
    std::uint64_t evals = 0;
    std::vector<double> best_k;
    double best_fit = 0.0;
    auto evaluate = [&](const std::vector<double>& k) {
        const double fit = responder.success_against(v, k);
        ++evals;
        if (best_k.empty() || fit < best_fit) {
            best_fit = fit;
            best_k = k;
        }
        return fit;
    };

    // The uniform vector spends the budget evenly: the do-nothing baseline
    // every search must dominate. Dividing by the distribution's own mass
    // keeps this candidate bit-identical across different tau on the same
    // distribution, which makes the dominance guarantee exact.
    const std::vector<double> uniform_k(tau, c_max / dist_train.mass);
    const double uniform_fit = evaluate(uniform_k);

    if (tau > 1) {
        std::mt19937_64 gen(seed);
        std::vector<std::vector<double>> pop(kPopulation, std::vector<double>(tau, 0.0));
        std::vector<double> fit(kPopulation, 0.0);
        fit[0] = uniform_fit;  // pop[0] stays the all-zero (uniform-weight) point
        for (std::size_t i = 1; i < kPopulation; ++i) {
            for (std::size_t j = 0; j < tau; ++j) pop[i][j] = uniform_in(gen, kLo, kHi);
        }
        auto weights_of = [&](const std::vector<double>& u) {
            std::vector<double> w(tau);
            for (std::size_t j = 0; j < tau; ++j) w[j] = std::pow(10.0, u[j]);
            return w;
        };
        for (std::size_t i = 1; i < kPopulation; ++i)
            fit[i] = evaluate(project_feasible(weights_of(pop[i]), region).costs);

        std::vector<std::vector<double>> trials(kPopulation, std::vector<double>(tau, 0.0));
        while (evals + kPopulation <= iters) {
            // Generate the whole generation first: candidate construction
            // consumes the RNG stream independently of evaluation order.
            for (std::size_t i = 0; i < kPopulation; ++i) {
                std::size_t r1, r2, r3;
                do r1 = uniform_index(gen, kPopulation); while (r1 == i);
                do r2 = uniform_index(gen, kPopulation); while (r2 == i || r2 == r1);
                do r3 = uniform_index(gen, kPopulation); while (r3 == i || r3 == r1 || r3 == r2);
                const std::size_t jrand = uniform_index(gen, tau);
                for (std::size_t j = 0; j < tau; ++j) {
                    if (uniform01(gen) < kCrossover || j == jrand) {
                        const double m = pop[r1][j] + kMutation * (pop[r2][j] - pop[r3][j]);
                        trials[i][j] = std::min(kHi, std::max(kLo, m));
                    } else {
                        trials[i][j] = pop[i][j];
                    }
                }
            }
            for (std::size_t i = 0; i < kPopulation; ++i) {
                const double tfit = evaluate(project_feasible(weights_of(trials[i]), region).costs);
                if (tfit <= fit[i]) {  // greedy selection; ties move across plateaus
                    pop[i] = trials[i];
                    fit[i] = tfit;
                }
            }
        }
    }

    OptResult out;
    out.best_costs = CostVector{best_k, c_max, k_min};
    out.evals = evals;
    out.seed = seed;
    auto [p_adv, plan] = evaluate_defender(out.best_costs, v, dist_train, grouping);
    out.attacker_success = p_adv;
    out.attacker_utility = plan.expected_utility;
    out.plan = std::move(plan);
    return out;
}

}  // namespace dahash
