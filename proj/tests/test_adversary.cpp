#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "dahash/adversary.hpp"
#include "dahash/rng.hpp"
#include "oracle.hpp"

using namespace dahash;

namespace {

CostedDistribution costed_of(std::initializer_list<CostedSet> sets) {
    return CostedDistribution{std::vector<CostedSet>(sets)};
}

std::uint64_t total_guesses(const CostedDistribution& costed) {
    std::uint64_t total = 0;
    for (const auto& s : costed.sets) total += s.count;
    return total;
}

}  // namespace

TEST_CASE("order_by_ratio sorts by bang-for-buck, not by probability") {
    // Ratios 0.4/2 = 0.2 < 0.3/1, so the lower-probability set goes first.
    const auto order = order_by_ratio(costed_of({{1, 0.4, 2.0}, {1, 0.3, 1.0}}));
    REQUIRE(order == std::vector<std::size_t>{1, 0});
}

TEST_CASE("order_by_ratio under uniform costs is descending probability") {
    const auto order = order_by_ratio(costed_of({{1, 0.5, 2.0}, {2, 0.3, 2.0}, {1, 0.1, 2.0}}));
    REQUIRE(order == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("order_by_ratio breaks ratio ties by probability, then by index") {
    // 0.2/1 and 0.4/2 are the same ratio; the 0.4 set goes first.
    const auto by_prob = order_by_ratio(costed_of({{1, 0.2, 1.0}, {1, 0.4, 2.0}}));
    REQUIRE(by_prob == std::vector<std::size_t>{1, 0});
    // Fully identical sets keep their original index order.
    const auto by_index = order_by_ratio(costed_of({{1, 0.2, 1.0}, {1, 0.2, 1.0}}));
    REQUIRE(by_index == std::vector<std::size_t>{0, 1});
}

TEST_CASE("the attacker's view is validated") {
    REQUIRE_THROWS_AS(order_by_ratio(CostedDistribution{}), std::invalid_argument);
    REQUIRE_THROWS_AS(order_by_ratio(costed_of({{1, 0.5, 0.0}})), std::invalid_argument);
    REQUIRE_THROWS_AS(order_by_ratio(costed_of({{1, 0.5, -1.0}})), std::invalid_argument);
    REQUIRE_THROWS_AS(order_by_ratio(costed_of({{0, 0.5, 1.0}})), std::invalid_argument);
    REQUIRE_THROWS_AS(order_by_ratio(costed_of({{1, 0.0, 1.0}})), std::invalid_argument);
}

TEST_CASE("success_rate is the prefix probability mass") {
    const CostedDistribution costed = costed_of({{1, 0.4, 1.0}, {2, 0.3, 1.0}});
    const std::vector<std::size_t> order{0, 1};
    REQUIRE(success_rate(costed, order, 0) == 0.0);
    REQUIRE(success_rate(costed, order, 1) == 0.4);
    REQUIRE(success_rate(costed, order, 3) == 1.0);
    // B = 2 splits the second set: only the per-guess variant accepts it.
    REQUIRE_THROWS_AS(success_rate(costed, order, 2), std::invalid_argument);
    REQUIRE(success_rate_per_guess(costed, order, 2) == 0.4 + 0.3);
    REQUIRE_THROWS_AS(success_rate(costed, order, 4), std::out_of_range);
    REQUIRE_THROWS_AS(success_rate_per_guess(costed, order, 4), std::out_of_range);
}

TEST_CASE("utility of the empty strategy is zero") {
    const CostedDistribution costed = costed_of({{1, 0.4, 1.0}, {2, 0.3, 1.0}});
    const std::vector<std::size_t> order{0, 1};
    REQUIRE(utility(0.0, costed, order, 0) == 0.0);
    REQUIRE(utility(123.0, costed, order, 0) == 0.0);
}

TEST_CASE("utility matches the hand-expanded two-set example") {
    // v=2, guesses cost 1 each: U = 2*1 - (1 + 0.6 + 0.3) = 0.1.
    const CostedDistribution costed = costed_of({{1, 0.4, 1.0}, {2, 0.3, 1.0}});
    const std::vector<std::size_t> order{0, 1};
    REQUIRE(std::abs(utility(2.0, costed, order, 3) - 0.1) <= 1e-12);
    REQUIRE(std::abs(utility_per_guess(2.0, costed, order, 3) - 0.1) <= 1e-12);
}

TEST_CASE("utility matches the hand-expanded three-set example") {
    // v=10, stop after two sets: U = 10*0.7 - (1 + 4*0.8) = 2.8.
    const CostedDistribution costed =
        costed_of({{1, 0.2, 1.0}, {1, 0.5, 4.0}, {1, 0.3, 100.0}});
    const std::vector<std::size_t> order{0, 1, 2};
    REQUIRE(std::abs(utility(10.0, costed, order, 2) - 2.8) <= 1e-12);
    REQUIRE(std::abs(utility_per_guess(10.0, costed, order, 2) - 2.8) <= 1e-12);
}

TEST_CASE("utility rejects a negative value") {
    const CostedDistribution costed = costed_of({{1, 0.5, 1.0}});
    const std::vector<std::size_t> order{0};
    REQUIRE_THROWS_AS(utility(-1.0, costed, order, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(best_response(-1.0, costed), std::invalid_argument);
}

TEST_CASE("closed-form utility equals the guess-by-guess evaluation") {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 200; ++trial) {
        const CostedDistribution costed = oracle::random_instance(gen);
        std::vector<std::size_t> order(costed.sets.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        oracle::shuffle(order, gen);
        // Random boundary: the first m sets of the shuffled order.
        const std::size_t m = uniform_index(gen, costed.sets.size() + 1);
        std::uint64_t B = 0;
        for (std::size_t i = 0; i < m; ++i) B += costed.sets[order[i]].count;
        const double v = uniform_in(gen, 0.0, 20.0);
        const double closed = utility(v, costed, order, B);
        const double literal = utility_per_guess(v, costed, order, B);
        REQUIRE(std::abs(closed - literal) <= 1e-12 * std::max(1.0, std::abs(closed)));
    }
}

TEST_CASE("best_response with zero value never guesses") {
    const AttackPlan plan = best_response(0.0, costed_of({{1, 0.4, 1.0}, {2, 0.3, 1.0}}));
    REQUIRE(plan.guesses == 0);
    REQUIRE(plan.success == 0.0);
    REQUIRE(plan.expected_utility == 0.0);
}

TEST_CASE("best_response scans past a negative marginal") {
    // Utility at B=1 is -0.2; the optimum checks everything for 0.1, so a
    // scan that stops at the first negative marginal would get this wrong.
    const CostedDistribution costed = costed_of({{1, 0.4, 1.0}, {2, 0.3, 1.0}});
    REQUIRE(utility(2.0, costed, {0, 1}, 1) < 0.0);
    const AttackPlan plan = best_response(2.0, costed);
    REQUIRE(plan.guesses == 3);
    REQUIRE(plan.success == 1.0);
    REQUIRE(std::abs(plan.expected_utility - 0.1) <= 1e-12);
}

TEST_CASE("best_response reorders by ratio before stopping") {
    // The 0.2-probability set is the cheapest per unit of mass and goes
    // first; the 100-cost set is never worth checking.
    const CostedDistribution costed =
        costed_of({{1, 0.5, 4.0}, {1, 0.2, 1.0}, {1, 0.3, 100.0}});
    const AttackPlan plan = best_response(10.0, costed);
    REQUIRE(plan.order == std::vector<std::size_t>{1, 0, 2});
    REQUIRE(plan.positions == std::vector<std::size_t>{1, 0, 2});
    REQUIRE(plan.guesses == 2);
    REQUIRE(std::abs(plan.success - 0.7) <= 1e-12);
    REQUIRE(std::abs(plan.expected_utility - 2.8) <= 1e-12);
}

TEST_CASE("best_response resolves exact utility ties toward more guessing") {
    // v=2, both marginals are exactly zero: every B has utility 0, and the
    // attacker keeps guessing, cracking everything.
    const CostedDistribution costed = costed_of({{1, 0.5, 1.0}, {1, 0.25, 1.0}});
    const AttackPlan plan = best_response(2.0, costed);
    REQUIRE(plan.guesses == 2);
    REQUIRE(plan.success == 0.75);
    REQUIRE(plan.expected_utility == 0.0);
}

TEST_CASE("best_response matches exhaustive enumeration") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const CostedDistribution costed =
            oracle::random_instance(gen, oracle::InstanceParams{1, 5, 3, 1e-6});
        const double v = trial % 10 == 0 ? 0.0 : uniform_in(gen, 0.0, 20.0);
        const AttackPlan plan = best_response(v, costed);
        const oracle::Strategy best = oracle::exhaustive_best(v, costed);
        REQUIRE(std::abs(plan.expected_utility - best.utility) <= 1e-9);
        REQUIRE(std::abs(plan.success - best.lambda) <= 1e-9);
    }
}

TEST_CASE("no ordering beats the ratio order at the chosen stopping point") {
    std::mt19937_64 gen(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const CostedDistribution costed = oracle::random_instance(gen);
        const double v = uniform_in(gen, 0.0, 20.0);
        const AttackPlan plan = best_response(v, costed);
        std::vector<std::size_t> sigma = plan.order;
        oracle::shuffle(sigma, gen);
        REQUIRE(utility(v, costed, plan.order, plan.guesses) >=
                oracle::evaluate(v, costed, sigma, plan.guesses).utility - 1e-12);
    }
}

TEST_CASE("swapping a consecutive inversion never lowers utility") {
    std::mt19937_64 gen(777);
    int cases = 0;
    while (cases < 1000) {
        const CostedDistribution costed =
            oracle::random_instance(gen, oracle::InstanceParams{2, 6, 4, 1e-6});
        const double v = uniform_in(gen, 0.5, 20.0);
        std::vector<std::size_t> sigma(costed.sets.size());
        std::iota(sigma.begin(), sigma.end(), std::size_t{0});
        oracle::shuffle(sigma, gen);

        auto ratio = [&](std::size_t s) { return costed.sets[s].prob / costed.sets[s].cost; };
        std::vector<std::size_t> inversions;
        for (std::size_t b = 0; b + 1 < sigma.size(); ++b)
            if (ratio(sigma[b]) < ratio(sigma[b + 1])) inversions.push_back(b);
        if (inversions.empty()) {
            std::reverse(sigma.begin(), sigma.end());  // now every adjacent pair is inverted
            for (std::size_t b = 0; b + 1 < sigma.size(); ++b) inversions.push_back(b);
        }
        const std::size_t b = inversions[uniform_index(gen, inversions.size())];
        const std::uint64_t B = total_guesses(costed);

        const double before = utility(v, costed, sigma, B);
        std::vector<std::size_t> swapped = sigma;
        std::swap(swapped[b], swapped[b + 1]);
        const double after = utility(v, costed, swapped, B);

        const auto& x = costed.sets[sigma[b]];
        const auto& y = costed.sets[sigma[b + 1]];
        const double predicted = static_cast<double>(x.count) * static_cast<double>(y.count) *
                                 (y.prob * x.cost - x.prob * y.cost);
        REQUIRE(after - before >= -1e-12);
        REQUIRE(predicted > 0.0);  // the pair really was inverted
        REQUIRE(std::abs((after - before) - predicted) <= 1e-9);
        ++cases;
    }
}

TEST_CASE("the per-guess optimum always lands on a set boundary") {
    std::mt19937_64 gen(888);
    for (int trial = 0; trial < 50; ++trial) {
        const CostedDistribution costed = oracle::random_instance(gen);
        const double v = uniform_in(gen, 0.0, 20.0);
        const std::vector<std::size_t> order = order_by_ratio(costed);
        const std::uint64_t total = total_guesses(costed);

        double best_per_guess = 0.0;
        for (std::uint64_t B = 1; B <= total; ++B)
            best_per_guess = std::max(best_per_guess, utility_per_guess(v, costed, order, B));
        double best_boundary = 0.0;
        std::uint64_t B = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            B += costed.sets[order[i]].count;
            best_boundary = std::max(best_boundary, utility(v, costed, order, B));
        }
        REQUIRE(std::abs(best_per_guess - best_boundary) <= 1e-12);
    }
}

TEST_CASE("cracked mass never shrinks as the password value grows") {
    std::mt19937_64 gen(4321);
    for (int trial = 0; trial < 50; ++trial) {
        const CostedDistribution costed = oracle::random_instance(gen);
        double last = 0.0;
        for (double v : {0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 40.0}) {
            const double lambda = best_response(v, costed).success;
            REQUIRE(lambda >= last);
            last = lambda;
        }
    }
}

TEST_CASE("utility is linear in the password value for a fixed strategy") {
    std::mt19937_64 gen(5150);
    for (int trial = 0; trial < 50; ++trial) {
        const CostedDistribution costed = oracle::random_instance(gen);
        const std::vector<std::size_t> order = order_by_ratio(costed);
        const std::uint64_t B = total_guesses(costed);
        const double lambda = success_rate(costed, order, B);
        // U(v) = v * lambda - C: the implied guessing cost C must not depend on v.
        const double c1 = 3.0 * lambda - utility(3.0, costed, order, B);
        const double c2 = 11.0 * lambda - utility(11.0, costed, order, B);
        REQUIRE(std::abs(c1 - c2) <= 1e-9);
    }
}

TEST_CASE("scaling value and costs together rescales utility and nothing else") {
    std::mt19937_64 gen(6006);
    for (int trial = 0; trial < 50; ++trial) {
        const CostedDistribution costed = oracle::random_instance(gen);
        const double v = uniform_in(gen, 0.1, 20.0);
        const double factor = trial % 2 == 0 ? 1000.0 : 0.037;
        CostedDistribution scaled = costed;
        for (auto& s : scaled.sets) s.cost *= factor;

        const AttackPlan plan = best_response(v, costed);
        const AttackPlan splan = best_response(v * factor, scaled);
        REQUIRE(splan.order == plan.order);
        REQUIRE(splan.guesses == plan.guesses);
        REQUIRE(splan.success == plan.success);
        REQUIRE(std::abs(splan.expected_utility - factor * plan.expected_utility) <=
                1e-9 * std::max(1.0, factor * std::abs(plan.expected_utility)));
    }
}
