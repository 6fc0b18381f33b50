#pragma once

// Password corpora and the compressed distributions derived from them.
//
// A corpus is the multiset of passwords chosen by N independent users,
// compressed to the frequency of each distinct password. All downstream
// analysis works on an even smaller object: the list of equivalence sets
// (count, prob), where one set stands for `count` distinct passwords that
// each occur with probability `prob`. Three constructions produce such a
// distribution: the empirical histogram of a corpus, a Good-Turing error
// profile alongside it, and a Monte-Carlo binning of per-sample guessing
// numbers produced by an external strength estimator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace dahash {

// `count` distinct passwords, each chosen with probability `prob`.
struct EquivalenceSet {
    std::uint64_t count = 0;
    double prob = 0.0;

    friend bool operator==(const EquivalenceSet& a, const EquivalenceSet& b) {
        return a.count == b.count && a.prob == b.prob;
    }
};

// Compressed password distribution: equivalence sets in strictly descending
// probability order, total mass within 1e-9 of 1.
struct Distribution {
    std::vector<EquivalenceSet> sets;
    double mass = 0.0;
};

// Sorts descending by probability, merges sets with exactly equal
// probability, validates each set and the total mass. Idempotent: feeding a
// distribution's sets back in reproduces it.
inline Distribution make_distribution(std::vector<EquivalenceSet> sets) {
    if (sets.empty()) throw std::invalid_argument("distribution: no equivalence sets");
    for (const auto& s : sets) {
        if (s.count == 0) throw std::invalid_argument("distribution: zero-count set");
        if (!(s.prob > 0.0) || s.prob > 1.0)
            throw std::invalid_argument("distribution: probability outside (0, 1]");
    }
    std::sort(sets.begin(), sets.end(), [](const EquivalenceSet& a, const EquivalenceSet& b) {
        return a.prob > b.prob;
    });
    std::vector<EquivalenceSet> merged;
    merged.reserve(sets.size());
    for (const auto& s : sets) {
        if (!merged.empty() && merged.back().prob == s.prob)
            merged.back().count += s.count;
        else
            merged.push_back(s);
    }
    double mass = 0.0;
    for (const auto& s : merged) mass += static_cast<double>(s.count) * s.prob;
    if (std::abs(mass - 1.0) > 1e-9)
        throw std::invalid_argument("distribution: total mass " + std::to_string(mass) +
                                    " is not 1");
    return Distribution{std::move(merged), mass};
}

// Frequency view of a corpus: one entry per distinct password, descending.
struct FrequencyCorpus {
    std::vector<std::uint64_t> freqs;  // per distinct password, each >= 1
    std::uint64_t total = 0;           // N = sum of freqs = number of users
};

inline FrequencyCorpus make_frequency_corpus(std::vector<std::uint64_t> freqs) {
    if (freqs.empty()) throw std::invalid_argument("corpus: empty");
    std::sort(freqs.begin(), freqs.end(), std::greater<>());
    if (freqs.back() == 0) throw std::invalid_argument("corpus: zero frequency");
    std::uint64_t total = std::accumulate(freqs.begin(), freqs.end(), std::uint64_t{0});
    return FrequencyCorpus{std::move(freqs), total};
}

// Reads one password per line. Empty lines are ignored (a blank line is not
// a password); a final trailing newline is optional. Errors if no password
// is found.
inline FrequencyCorpus ingest_passwords(std::istream& in) {
    std::unordered_map<std::string, std::uint64_t> counts;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++counts[line];
    }
    if (counts.empty()) throw std::runtime_error("ingest_passwords: empty corpus");
    std::vector<std::uint64_t> freqs;
    freqs.reserve(counts.size());
    for (const auto& [pw, f] : counts) freqs.push_back(f);
    return make_frequency_corpus(std::move(freqs));
}

// Reads lines of the form "<frequency> <count>": `count` distinct passwords
// occur `frequency` times each. Lines may appear in any order; repeated
// frequencies accumulate. Both integers must be positive.
inline FrequencyCorpus ingest_frequency_list(std::istream& in) {
    std::unordered_map<std::uint64_t, std::uint64_t> by_freq;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        long long f = 0, n = 0;
        std::string extra;
        if (!(ls >> f >> n) || (ls >> extra) || f <= 0 || n <= 0)
            throw std::runtime_error("ingest_frequency_list: bad pair at line " +
                                     std::to_string(lineno));
        by_freq[static_cast<std::uint64_t>(f)] += static_cast<std::uint64_t>(n);
    }
    if (by_freq.empty()) throw std::runtime_error("ingest_frequency_list: empty corpus");
    std::vector<std::uint64_t> freqs;
    for (const auto& [f, n] : by_freq)
        for (std::uint64_t i = 0; i < n; ++i) freqs.push_back(f);
    return make_frequency_corpus(std::move(freqs));
}

// Empirical distribution: one equivalence set per distinct frequency f, with
// count = number of passwords of that frequency and prob = f / N.
inline Distribution to_empirical_distribution(const FrequencyCorpus& corpus) {
    std::vector<EquivalenceSet> sets;
    const double n = static_cast<double>(corpus.total);
    std::size_t i = 0;
    while (i < corpus.freqs.size()) {
        std::size_t j = i;
        while (j < corpus.freqs.size() && corpus.freqs[j] == corpus.freqs[i]) ++j;
        sets.push_back(EquivalenceSet{j - i, static_cast<double>(corpus.freqs[i]) / n});
        i = j;
    }
    return make_distribution(std::move(sets));
}

// Good-Turing error profile of a corpus.
//
// distinct_counts[f] is the number of distinct passwords observed exactly f
// times; above_counts[f] counts those observed strictly more than f times.
// error_bounds[f] = (f+1) * distinct_counts[f+1] / N bounds how much
// probability mass the empirical estimate can misplace on the passwords
// observed at most f times; the true misplaced mass is never computed here,
// only this upper bound. error_bounds[0] is the classical missing-mass
// estimate distinct_counts[1] / N.
struct GoodTuringProfile {
    std::vector<double> error_bounds;          // index f = 0 .. fmax
    std::vector<std::uint64_t> distinct_counts;  // index f = 0 .. fmax; [0] == 0
    std::vector<std::uint64_t> above_counts;     // index f = 0 .. fmax
    std::uint64_t fmax = 0;
    std::uint64_t total = 0;
};

inline GoodTuringProfile good_turing(const FrequencyCorpus& corpus) {
    GoodTuringProfile p;
    p.total = corpus.total;
    p.fmax = corpus.freqs.front();  // freqs are descending
    p.distinct_counts.assign(p.fmax + 1, 0);
    for (std::uint64_t f : corpus.freqs) ++p.distinct_counts[f];
    p.above_counts.assign(p.fmax + 1, 0);
    for (std::uint64_t f = p.fmax; f-- > 0;)
        p.above_counts[f] = p.above_counts[f + 1] + p.distinct_counts[f + 1];
    p.error_bounds.assign(p.fmax + 1, 0.0);
    const double n = static_cast<double>(corpus.total);
    for (std::uint64_t f = 0; f < p.fmax; ++f)
        p.error_bounds[f] =
            static_cast<double>((f + 1) * p.distinct_counts[f + 1]) / n;
    // error_bounds[fmax] stays 0: no password was seen more than fmax times.
    return p;
}

// Smallest frequency f whose error bound is at most eps; passwords observed
// more than this often have empirical estimates trustworthy at level eps.
// Returns fmax + 1 when no bound qualifies.
inline std::uint64_t f_epsilon(const GoodTuringProfile& profile, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("f_epsilon: eps outside (0, 1)");
    for (std::uint64_t f = 0; f <= profile.fmax; ++f)
        if (profile.error_bounds[f] <= eps) return f;
    return profile.fmax + 1;
}

// One guessing number per line, each >= 1 (the position at which an external
// strength model cracks that sample).
inline std::vector<std::uint64_t> read_guess_numbers(std::istream& in) {
    std::vector<std::uint64_t> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        long long g = 0;
        std::string extra;
        if (!(ls >> g) || (ls >> extra) || g <= 0)
            throw std::runtime_error("read_guess_numbers: bad value at line " +
                                     std::to_string(lineno));
        out.push_back(static_cast<std::uint64_t>(g));
    }
    if (out.empty()) throw std::runtime_error("read_guess_numbers: empty input");
    return out;
}

struct MonteCarloParams {
    std::uint64_t bins = 200;
    double growth = 1.15;
    std::int64_t offset = 25;
};

// Bins guessing numbers into a distribution over password ranks.
//
// Thresholds: t_0 = 0, t_1 = 15, then t_i = t_{i-1} + round(growth^(i+offset))
// for i = 2 .. bins-1 (zero-width steps are skipped). The schedule stops
// early at the first threshold that would reach max(guess numbers); the final
// threshold is always exactly that maximum, so the last bin is closed — the
// hardest sample falls inside it and every sample lands in exactly one bin.
// A bin (t_{i-1}, t_i] holding g of the s samples stands for width = t_i -
// t_{i-1} password ranks, each with probability g / (s * width); empty bins
// are dropped and the sets are re-sorted by probability (bin density is not
// monotone in rank).
inline Distribution monte_carlo_distribution(const std::vector<std::uint64_t>& guess_numbers,
                                             const MonteCarloParams& params = {}) {
    if (guess_numbers.empty())
        throw std::invalid_argument("monte_carlo_distribution: no guessing numbers");
    for (std::uint64_t g : guess_numbers)
        if (g == 0) throw std::invalid_argument("monte_carlo_distribution: zero guessing number");
    if (params.bins < 2)
        throw std::invalid_argument("monte_carlo_distribution: bins must be at least 2");
    if (!(params.growth > 1.0))
        throw std::invalid_argument("monte_carlo_distribution: growth must exceed 1");

    const std::uint64_t max_guess = *std::max_element(guess_numbers.begin(), guess_numbers.end());

    std::vector<std::uint64_t> thresholds{0};
    if (15 < max_guess) {
        thresholds.push_back(15);
        for (std::uint64_t i = 2; i < params.bins; ++i) {
            const double step = std::round(
                std::pow(params.growth, static_cast<double>(static_cast<std::int64_t>(i) +
                                                            params.offset)));
            if (step < 1.0) continue;  // zero-width step would duplicate a threshold
            const std::uint64_t prev = thresholds.back();
            if (step >= static_cast<double>(max_guess - prev)) break;  // schedule reaches max
            thresholds.push_back(prev + static_cast<std::uint64_t>(step));
        }
    }
    thresholds.push_back(max_guess);

    // Count samples per bin: bin i covers (t_{i-1}, t_i], so a sample g lands
    // in the bin whose upper threshold is the first one >= g.
    std::vector<std::uint64_t> bin_counts(thresholds.size() - 1, 0);
    for (std::uint64_t g : guess_numbers) {
        const auto it = std::lower_bound(thresholds.begin() + 1, thresholds.end(), g);
        ++bin_counts[static_cast<std::size_t>(it - (thresholds.begin() + 1))];
    }

    const double s = static_cast<double>(guess_numbers.size());
    std::vector<EquivalenceSet> sets;
    for (std::size_t i = 0; i < bin_counts.size(); ++i) {
        if (bin_counts[i] == 0) continue;
        const std::uint64_t width = thresholds[i + 1] - thresholds[i];
        sets.push_back(EquivalenceSet{
            width, static_cast<double>(bin_counts[i]) / (s * static_cast<double>(width))});
    }
    return make_distribution(std::move(sets));
}

}  // namespace dahash
