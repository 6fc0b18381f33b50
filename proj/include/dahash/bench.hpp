#pragma once

// Experiment harness: synthetic corpora and cracked-fraction-vs-value
// sweeps.
//
// A sweep fixes a grid of value-to-budget ratios v/C_max and a list of group
// counts tau, optimizes the cost vector at every (ratio, tau) point, and
// reports the attacker's response as CSV: success rate, stopping budget,
// per-group costs and cracked masses, plus Good-Turing uncertainty flags in
// empirical mode. All arithmetic runs in budget-normalized units (budget 1,
// value = ratio, floor = kmin_frac) and only the reported costs and utility
// are rescaled by C_max afterwards, so scaling (v, C_max, k_min) together
// changes nothing but those two columns — not even in the last bit.
//
// Sweep points are independent (each derives its own RNG seed from the
// config seed and its grid position) and rows are sorted by (ratio, tau), so
// the CSV is byte-stable for fixed inputs and seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "dahash/corpus.hpp"
#include "dahash/rng.hpp"
#include "dahash/stackelberg.hpp"
#include "dahash/strength.hpp"

namespace dahash {

// `samples` draws from P(rank r) proportional to r^(-exponent) over ranks
// 1..support, tabulated to a corpus. Deterministic per seed.
inline FrequencyCorpus gen_zipf_corpus(std::uint64_t support, double exponent,
                                       std::uint64_t samples, std::uint64_t seed) {
    if (support < 1 || samples < 1 || !(exponent > 0.0))
        throw std::invalid_argument("gen_zipf_corpus: invalid parameters");
    std::vector<double> cum(support);
    double total = 0.0;
    for (std::uint64_t r = 1; r <= support; ++r) {
        total += std::pow(static_cast<double>(r), -exponent);
        cum[r - 1] = total;
    }
    std::mt19937_64 gen(seed);
    std::vector<std::uint64_t> counts(support, 0);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const double u = uniform01(gen) * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        // u can round up to exactly `total`; clamp to the last rank.
        const std::size_t idx = std::min(static_cast<std::size_t>(it - cum.begin()),
                                         static_cast<std::size_t>(support - 1));
        ++counts[idx];
    }
    std::vector<std::uint64_t> freqs;
    for (std::uint64_t c : counts)
        if (c > 0) freqs.push_back(c);
    return make_frequency_corpus(std::move(freqs));
}

// The standard v/C_max grids: {i * 10^(2+j) : 1 <= i <= 9, 0 <= j <= 5} for
// empirical sweeps and {j * 10^i : 3 <= i <= 11, j in {2,4,6,8}} for
// Monte-Carlo sweeps.
inline std::vector<double> empirical_grid() {
    std::vector<double> g;
    for (int j = 0; j <= 5; ++j)
        for (int i = 1; i <= 9; ++i) g.push_back(i * std::pow(10.0, 2 + j));
    return g;
}

inline std::vector<double> montecarlo_grid() {
    std::vector<double> g;
    for (int i = 3; i <= 11; ++i)
        for (int j = 2; j <= 8; j += 2) g.push_back(j * std::pow(10.0, i));
    return g;
}

enum class Uncertainty { None, Yellow, Red };

inline const char* to_string(Uncertainty u) {
    switch (u) {
        case Uncertainty::Yellow: return "yellow";
        case Uncertainty::Red: return "red";
        default: return "none";
    }
}

// One (ratio, tau) sweep point. Costs and utility are in output cost units
// (already rescaled by C_max); masses and p_adv are unit-free.
struct SweepRow {
    double v_over_cmax = 0.0;
    std::uint32_t tau = 1;
    double p_adv = 0.0;
    double u_adv = 0.0;
    std::uint64_t b_star = 0;
    std::vector<double> costs;         // k_1..k_tau
    std::vector<double> group_mass;    // m_1..m_tau
    std::vector<double> cracked_mass;  // cracked probability mass per group
    std::optional<std::uint64_t> min_cracked_freq;  // empirical mode only
    Uncertainty uncertainty = Uncertainty::None;
    bool incentive_violation = false;
    std::uint64_t seed = 0;
    std::uint64_t evals = 0;
};

struct SweepConfig {
    enum class Mode { Empirical, MonteCarlo };
    Mode mode = Mode::Empirical;
    FrequencyCorpus corpus;                        // empirical mode input
    std::vector<std::uint64_t> guess_train;        // Monte-Carlo mode inputs
    std::vector<std::uint64_t> guess_eval;
    MonteCarloParams mc{};
    std::vector<std::uint32_t> taus{1, 3, 5};
    double cmax = 1.0;
    double kmin_frac = 0.1;                        // k_min = kmin_frac * C_max
    std::vector<double> ratios;                    // v/C_max grid
    std::uint64_t iters = 10000;
    std::uint64_t seed = 1;
};

namespace detail {

// Per-group cracked mass, password counts, and the smallest cracked
// frequency, given the plan's prefix of whole sets.
struct CrackedReport {
    std::vector<double> cracked_mass;
    bool incentive_violation = false;
    std::optional<std::uint64_t> min_cracked_freq;  // filled in empirical mode
};

inline CrackedReport cracked_by_group(const Distribution& dist, const Grouping& grouping,
                                      const AttackPlan& plan, std::uint64_t corpus_total) {
    CrackedReport rep;
    rep.cracked_mass.assign(grouping.tau, 0.0);
    std::vector<std::uint64_t> cracked_count(grouping.tau, 0);
    std::vector<std::uint64_t> group_count(grouping.tau, 0);
    for (std::size_t i = 0; i < dist.sets.size(); ++i)
        group_count[grouping.group_of(i)] += dist.sets[i].count;
    std::uint64_t left = plan.guesses;
    for (std::size_t rank = 0; rank < plan.order.size() && left > 0; ++rank) {
        const std::size_t i = plan.order[rank];
        const std::size_t g = grouping.group_of(i);
        const auto& s = dist.sets[i];
        left -= s.count;  // B* sits on a set boundary, so whole sets only
        rep.cracked_mass[g] += static_cast<double>(s.count) * s.prob;
        cracked_count[g] += s.count;
        if (corpus_total > 0) {
            const std::uint64_t f = static_cast<std::uint64_t>(
                std::llround(s.prob * static_cast<double>(corpus_total)));
            if (!rep.min_cracked_freq || f < *rep.min_cracked_freq) rep.min_cracked_freq = f;
        }
    }
    // Incentive check: does any stronger-group password get cracked while a
    // weaker group still has uncracked passwords?
    for (std::size_t g = 0; g + 1 < grouping.tau; ++g) {
        if (cracked_count[g] == group_count[g]) continue;
        for (std::size_t h = g + 1; h < grouping.tau; ++h)
            if (cracked_count[h] > 0) rep.incentive_violation = true;
    }
    return rep;
}

}  // namespace detail

inline std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    if (config.ratios.empty()) throw std::invalid_argument("run_sweep: empty ratio grid");
    for (double r : config.ratios)
        if (!(r >= 0.0)) throw std::invalid_argument("run_sweep: ratios must be non-negative");
    if (!(config.cmax > 0.0)) throw std::invalid_argument("run_sweep: cmax must be positive");
    if (!(config.kmin_frac > 0.0) || config.kmin_frac > 1.0)
        throw std::invalid_argument("run_sweep: kmin_frac must be in (0, 1]");
    if (config.taus.empty()) throw std::invalid_argument("run_sweep: no tau values");

    const bool empirical = config.mode == SweepConfig::Mode::Empirical;
    Distribution dist_train, dist_eval;
    std::uint64_t corpus_total = 0;
    std::uint64_t f_red = 0, f_yellow = 0;
    if (empirical) {
        dist_train = to_empirical_distribution(config.corpus);
        dist_eval = dist_train;
        corpus_total = config.corpus.total;
        const GoodTuringProfile gt = good_turing(config.corpus);
        f_red = f_epsilon(gt, 0.1);      // empirical estimate may be off by 10%
        f_yellow = f_epsilon(gt, 0.01);  // ... by 1%
    } else {
        dist_train = monte_carlo_distribution(config.guess_train, config.mc);
        dist_eval = monte_carlo_distribution(config.guess_eval, config.mc);
    }

    std::vector<double> ratios = config.ratios;
    std::sort(ratios.begin(), ratios.end());
    std::vector<std::uint32_t> taus = config.taus;
    std::sort(taus.begin(), taus.end());

    std::vector<SweepRow> rows;
    rows.reserve(ratios.size() * taus.size());
    for (std::size_t ir = 0; ir < ratios.size(); ++ir) {
        for (std::size_t it = 0; it < taus.size(); ++it) {
            const double ratio = ratios[ir];
            const std::uint32_t tau = taus[it];
            const std::uint64_t point_seed = derive_seed(config.seed, ir, it);
            // Normalized units: budget 1, value = ratio, floor = kmin_frac.
            const OptResult opt = opt_hash_cost_vec(ratio, 1.0, config.kmin_frac, dist_train,
                                                    tau, config.iters, point_seed);
            SweepRow row;
            row.v_over_cmax = ratio;
            row.tau = tau;
            row.seed = point_seed;
            row.evals = opt.evals;

            const Grouping grouping = partition_by_mass(dist_eval, tau);
            double p_adv = opt.attacker_success;
            const AttackPlan* plan = &opt.plan;
            AttackPlan eval_plan;
            if (!empirical) {
                // Train/eval split: the trained costs face the evaluation
                // distribution, re-partitioned by the same mass rule.
                std::tie(p_adv, eval_plan) =
                    evaluate_defender(opt.best_costs, ratio, dist_eval, grouping);
                plan = &eval_plan;
            }
            row.p_adv = p_adv;
            row.u_adv = plan->expected_utility * config.cmax;
            row.b_star = plan->guesses;
            row.costs.reserve(tau);
            for (double k : opt.best_costs.costs) row.costs.push_back(k * config.cmax);
            row.group_mass = grouping.masses;

            const detail::CrackedReport rep =
                detail::cracked_by_group(dist_eval, grouping, *plan, empirical ? corpus_total : 0);
            row.cracked_mass = rep.cracked_mass;
            row.incentive_violation = rep.incentive_violation;
            if (empirical && rep.min_cracked_freq) {
                row.min_cracked_freq = rep.min_cracked_freq;
                if (*rep.min_cracked_freq <= f_red)
                    row.uncertainty = Uncertainty::Red;
                else if (*rep.min_cracked_freq <= f_yellow)
                    row.uncertainty = Uncertainty::Yellow;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace detail {

// Shortest round-trip decimal form, quoted per RFC 4180 if ever needed.
inline std::string csv_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace detail

// CSV with one row per sweep point. Variable-tau columns are padded to the
// widest tau in the batch with empty cells; LF line endings.
inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    std::uint32_t max_tau = 1;
    for (const auto& r : rows) max_tau = std::max(max_tau, r.tau);
    out << "v_over_cmax,tau,p_adv,u_adv,b_star";
    for (std::uint32_t j = 1; j <= max_tau; ++j) out << ",k_" << j;
    for (std::uint32_t j = 1; j <= max_tau; ++j) out << ",group_mass_" << j;
    for (std::uint32_t j = 1; j <= max_tau; ++j) out << ",cracked_mass_" << j;
    out << ",min_cracked_freq,uncertainty,incentive_violation,seed,evals\n";
    for (const auto& r : rows) {
        out << detail::csv_double(r.v_over_cmax) << ',' << r.tau << ','
            << detail::csv_double(r.p_adv) << ',' << detail::csv_double(r.u_adv) << ','
            << r.b_star;
        for (std::uint32_t j = 0; j < max_tau; ++j)
            out << ',' << (j < r.tau ? detail::csv_double(r.costs[j]) : std::string());
        for (std::uint32_t j = 0; j < max_tau; ++j)
            out << ',' << (j < r.tau ? detail::csv_double(r.group_mass[j]) : std::string());
        for (std::uint32_t j = 0; j < max_tau; ++j)
            out << ',' << (j < r.tau ? detail::csv_double(r.cracked_mass[j]) : std::string());
        out << ',' << (r.min_cracked_freq ? std::to_string(*r.min_cracked_freq) : std::string())
            << ',' << to_string(r.uncertainty) << ','
            << (r.incentive_violation ? "true" : "false") << ',' << r.seed << ',' << r.evals
            << '\n';
    }
}

}  // namespace dahash
