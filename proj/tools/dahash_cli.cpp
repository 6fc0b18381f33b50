// Command-line front end: corpus sweeps, synthetic Zipf corpora, and a small
// account store demonstrating candidate-derived hash costs.
//
// Exit codes: 0 success (or accepted login), 1 rejected login, 2 any error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dahash/authkit.hpp"
#include "dahash/bench.hpp"

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::vector<std::uint32_t> parse_taus(const std::string& text) {
    std::vector<std::uint32_t> taus;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            taus.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
        } catch (const std::exception&) {
            throw std::runtime_error("--tau: bad group count '" + tok + "'");
        }
    }
    if (taus.empty()) throw std::runtime_error("--tau: empty list");
    return taus;
}

std::vector<double> parse_grid(const std::string& text) {
    if (text == "empirical") return dahash::empirical_grid();
    if (text == "montecarlo") return dahash::montecarlo_grid();
    std::vector<double> ratios;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            ratios.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::runtime_error("--grid: bad ratio '" + tok + "'");
        }
    }
    if (ratios.empty()) throw std::runtime_error("--grid: empty list");
    return ratios;
}

// Writes rows to `path`, or to stdout when the path is empty.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed on " + path);
}

struct SweepArgs {
    std::string mode = "empirical";
    std::string corpus;
    std::string corpus_format = "freq";
    std::string guess_train;
    std::string guess_eval;
    std::string tau_list = "1,3,5";
    std::string grid;  // empty: default grid for the mode
    std::string out;
    double cmax = 1.0;
    double kmin_frac = 0.1;
    std::uint64_t iters = 10000;
    std::uint64_t seed = 1;
    std::uint64_t mc_bins = 200;
    double mc_growth = 1.15;
    std::int64_t mc_offset = 25;
};

int run_sweep_command(const SweepArgs& args) {
    dahash::SweepConfig config;
    if (args.mode == "empirical") {
        config.mode = dahash::SweepConfig::Mode::Empirical;
        if (args.corpus.empty()) throw std::runtime_error("--corpus is required in empirical mode");
        std::ifstream in = open_input(args.corpus);
        config.corpus = args.corpus_format == "plain" ? dahash::ingest_passwords(in)
                                                      : dahash::ingest_frequency_list(in);
    } else {
        config.mode = dahash::SweepConfig::Mode::MonteCarlo;
        if (args.guess_train.empty())
            throw std::runtime_error("--guess-train is required in montecarlo mode");
        std::ifstream train = open_input(args.guess_train);
        config.guess_train = dahash::read_guess_numbers(train);
        if (args.guess_eval.empty()) {
            config.guess_eval = config.guess_train;  // no held-out list: evaluate in-sample
        } else {
            std::ifstream eval = open_input(args.guess_eval);
            config.guess_eval = dahash::read_guess_numbers(eval);
        }
        config.mc = dahash::MonteCarloParams{args.mc_bins, args.mc_growth, args.mc_offset};
    }
    config.taus = parse_taus(args.tau_list);
    config.ratios = parse_grid(args.grid.empty() ? args.mode : args.grid);
    config.cmax = args.cmax;
    config.kmin_frac = args.kmin_frac;
    config.iters = args.iters;
    config.seed = args.seed;

    const std::vector<dahash::SweepRow> rows = dahash::run_sweep(config);
    std::ostringstream csv;
    dahash::write_csv(csv, rows);
    write_output(args.out, csv.str());
    return 0;
}

int run_gen_zipf(std::uint64_t support, double exponent, std::uint64_t samples,
                 std::uint64_t seed, const std::string& out) {
    const dahash::FrequencyCorpus corpus =
        dahash::gen_zipf_corpus(support, exponent, samples, seed);
    // Frequency-list format: "<frequency> <distinct passwords>", descending.
    std::ostringstream text;
    std::size_t i = 0;
    while (i < corpus.freqs.size()) {
        std::size_t j = i;
        while (j < corpus.freqs.size() && corpus.freqs[j] == corpus.freqs[i]) ++j;
        text << corpus.freqs[i] << ' ' << (j - i) << '\n';
        i = j;
    }
    write_output(out, text.str());
    return 0;
}

int run_account_create(const std::string& store_path, const std::string& policy_path,
                       const std::string& user, const std::string& password,
                       std::uint64_t salt_bits) {
    const dahash::Policy policy = dahash::load_policy(policy_path);
    dahash::RecordStore store(store_path);
    dahash::create_account(store, policy, user, password,
                           static_cast<std::size_t>(salt_bits));
    std::cout << "created " << user << std::endl;
    return 0;
}

int run_account_auth(const std::string& store_path, const std::string& policy_path,
                     const std::string& user, const std::string& password,
                     std::uint64_t fixed_response_ms) {
    const dahash::Policy policy = dahash::load_policy(policy_path);
    const dahash::RecordStore store(store_path);
    dahash::AuthOptions opts;
    opts.fixed_response = std::chrono::milliseconds(fixed_response_ms);
    const bool ok = dahash::authenticate(store, policy, user, password, opts);
    std::cout << (ok ? "accept" : "reject") << std::endl;
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-differentiated password hashing: sweeps, corpora, accounts"};
    app.require_subcommand(1);

    SweepArgs sweep;
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Optimize per-group hash costs over a value grid and write CSV");
    sweep_cmd->add_option("--mode", sweep.mode, "empirical or montecarlo")
        ->check(CLI::IsMember({"empirical", "montecarlo"}))
        ->capture_default_str();
    sweep_cmd->add_option("--corpus", sweep.corpus, "corpus file (empirical mode)");
    sweep_cmd->add_option("--corpus-format", sweep.corpus_format,
                          "freq: '<frequency> <count>' lines; plain: one password per line")
        ->check(CLI::IsMember({"freq", "plain"}))
        ->capture_default_str();
    sweep_cmd->add_option("--guess-train", sweep.guess_train,
                          "guessing numbers used to fit costs (montecarlo mode)");
    sweep_cmd->add_option("--guess-eval", sweep.guess_eval,
                          "held-out guessing numbers for evaluation (montecarlo mode)");
    sweep_cmd->add_option("--tau", sweep.tau_list, "comma-separated group counts")
        ->capture_default_str();
    sweep_cmd->add_option("--grid", sweep.grid,
                          "'empirical', 'montecarlo', or comma-separated v/C_max ratios "
                          "(default: the grid matching --mode)");
    sweep_cmd->add_option("--cmax", sweep.cmax, "hash cost budget C_max")
        ->capture_default_str();
    sweep_cmd->add_option("--kmin-frac", sweep.kmin_frac, "cost floor as a fraction of C_max")
        ->capture_default_str();
    sweep_cmd->add_option("--iters", sweep.iters, "fitness evaluations per sweep point")
        ->capture_default_str();
    sweep_cmd->add_option("--seed", sweep.seed, "base RNG seed")->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out, "output CSV path (default: stdout)");
    sweep_cmd->add_option("--mc-bins", sweep.mc_bins, "guessing-number bins")
        ->capture_default_str();
    sweep_cmd->add_option("--mc-growth", sweep.mc_growth, "geometric bin growth factor")
        ->capture_default_str();
    sweep_cmd->add_option("--mc-offset", sweep.mc_offset, "bin growth exponent offset")
        ->capture_default_str();

    std::uint64_t support = 0, samples = 0, zipf_seed = 1;
    double exponent = 1.0;
    std::string zipf_out;
    CLI::App* zipf_cmd =
        app.add_subcommand("gen-zipf", "Sample a Zipf corpus and write a frequency list");
    zipf_cmd->add_option("--support", support, "number of distinct passwords")->required();
    zipf_cmd->add_option("--exponent", exponent, "Zipf exponent")->required();
    zipf_cmd->add_option("--samples", samples, "number of users to draw")->required();
    zipf_cmd->add_option("--seed", zipf_seed, "RNG seed")->capture_default_str();
    zipf_cmd->add_option("--out", zipf_out, "output path (default: stdout)");

    CLI::App* account_cmd =
        app.add_subcommand("account", "Create and authenticate accounts in a record store");
    account_cmd->require_subcommand(1);
    std::string store_path, policy_path, user, password;
    std::uint64_t salt_bits = 128, fixed_response_ms = 0;
    CLI::App* create_cmd =
        account_cmd->add_subcommand("create", "Hash a password and append the record");
    create_cmd->add_option("--store", store_path, "record store file")->required();
    create_cmd->add_option("--policy", policy_path, "policy file")->required();
    create_cmd->add_option("--user", user, "username")->required();
    create_cmd->add_option("--password", password, "password")->required();
    create_cmd->add_option("--salt-bits", salt_bits, "salt size in bits")
        ->capture_default_str();
    CLI::App* auth_cmd = account_cmd->add_subcommand(
        "auth", "Check a login; exits 0 on accept, 1 on reject");
    auth_cmd->add_option("--store", store_path, "record store file")->required();
    auth_cmd->add_option("--policy", policy_path, "policy file")->required();
    auth_cmd->add_option("--user", user, "username")->required();
    auth_cmd->add_option("--password", password, "candidate password")->required();
    auth_cmd->add_option("--fixed-response-ms", fixed_response_ms,
                         "minimum wall-clock response time")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit clean; bad usage is an error
    }

    try {
        if (sweep_cmd->parsed()) return run_sweep_command(sweep);
        if (zipf_cmd->parsed())
            return run_gen_zipf(support, exponent, samples, zipf_seed, zipf_out);
        if (create_cmd->parsed())
            return run_account_create(store_path, policy_path, user, password, salt_bits);
        if (auth_cmd->parsed())
            return run_account_auth(store_path, policy_path, user, password, fixed_response_ms);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 2;  // unreachable: require_subcommand guarantees a branch above
}
