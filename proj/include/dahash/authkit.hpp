#pragma once

// Account creation and authentication with cost-differentiated key
// stretching.
//
// The server keeps a public policy (frequency dictionary, group thresholds,
// per-group iteration counts) and a record store holding only
// (username, salt, digest). The hash cost of an account is never persisted:
// authentication re-derives it from the CANDIDATE password, so a wrong guess
// from a different strength group is hashed with the wrong cost and fails on
// the digest compare. Records and policies are plain ASCII text, lowercase
// hex, LF line endings.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "dahash/sha256.hpp"

namespace dahash {

// Chained key stretching: digest_0 = H(salt || pw), digest_i =
// H(digest_{i-1} || salt || pw); exactly k primitive invocations. If
// `invocations` is given it is set to the number of invocations performed.
inline Digest stretch(std::string_view pw, std::string_view salt, std::uint64_t k,
                      std::uint64_t* invocations = nullptr) {
    if (k == 0) throw std::invalid_argument("stretch: cost must be at least 1");
    Digest d = sha256({salt, pw});
    std::uint64_t done = 1;
    for (; done < k; ++done) {
        const std::string_view prev(reinterpret_cast<const char*>(d.data()), d.size());
        d = sha256({prev, salt, pw});
    }
    if (invocations) *invocations = done;
    return d;
}

// Hardness policy: a public frequency dictionary plus tau-1 descending
// frequency thresholds selecting one of tau iteration counts. Group 1 is the
// weakest (most frequent) and most expensive to hash; passwords absent from
// the dictionary fall in group tau, the strongest.
struct Policy {
    std::uint32_t tau = 1;
    std::vector<std::uint64_t> thresholds;  // tau - 1, strictly descending
    std::vector<std::uint64_t> costs;       // tau iteration counts, each >= 1
    std::unordered_map<std::string, std::uint64_t> dictionary;  // password -> frequency

    // Group index in [0, tau): number of thresholds the frequency fails to reach.
    std::size_t group_of(std::string_view pw) const {
        const auto it = dictionary.find(std::string(pw));
        const std::uint64_t f = it == dictionary.end() ? 0 : it->second;
        std::size_t j = 0;
        while (j < thresholds.size() && f < thresholds[j]) ++j;
        return j;
    }
    std::uint64_t cost_of(std::string_view pw) const { return costs[group_of(pw)]; }
};

// Dictionary file: lines "<frequency> <password>", where the password runs
// to the end of the line and may contain spaces.
inline std::unordered_map<std::string, std::uint64_t> load_dictionary(std::istream& in) {
    std::unordered_map<std::string, std::uint64_t> dict;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t sp = line.find(' ');
        std::uint64_t f = 0;
        try {
            if (sp == std::string::npos || sp + 1 == line.size()) throw std::invalid_argument("");
            f = std::stoull(line.substr(0, sp));
        } catch (const std::exception&) {
            throw std::runtime_error("dictionary: bad line " + std::to_string(lineno));
        }
        if (f == 0) throw std::runtime_error("dictionary: zero frequency at line " +
                                             std::to_string(lineno));
        dict[line.substr(sp + 1)] = f;
    }
    return dict;
}

// Policy file: `tau <t>`, then tau-1 `threshold <f>` lines (descending),
// then tau `cost <k>` lines, then `dict <path>` (resolved relative to the
// policy file's directory).
inline Policy load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("policy: cannot open " + path);
    Policy p;
    std::string key;
    if (!(in >> key >> p.tau) || key != "tau" || p.tau < 1)
        throw std::runtime_error("policy: expected `tau <count>` first in " + path);
    for (std::uint32_t i = 1; i < p.tau; ++i) {
        std::uint64_t t = 0;
        if (!(in >> key >> t) || key != "threshold" || t == 0)
            throw std::runtime_error("policy: expected " + std::to_string(p.tau - 1) +
                                     " `threshold <f>` lines in " + path);
        if (!p.thresholds.empty() && t >= p.thresholds.back())
            throw std::runtime_error("policy: thresholds must be strictly descending in " + path);
        p.thresholds.push_back(t);
    }
    for (std::uint32_t i = 0; i < p.tau; ++i) {
        std::uint64_t k = 0;
        if (!(in >> key >> k) || key != "cost" || k == 0)
            throw std::runtime_error("policy: expected " + std::to_string(p.tau) +
                                     " `cost <k>` lines in " + path);
        p.costs.push_back(k);
    }
    std::string dict_path;
    if (!(in >> key >> dict_path) || key != "dict")
        throw std::runtime_error("policy: expected `dict <path>` last in " + path);
    const std::filesystem::path resolved =
        std::filesystem::path(path).parent_path() / dict_path;
    std::ifstream dict_in(resolved);
    if (!dict_in) throw std::runtime_error("policy: cannot open dictionary " + resolved.string());
    p.dictionary = load_dictionary(dict_in);
    return p;
}

inline std::string to_hex(std::string_view bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char b : bytes) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0x0f]);
    }
    return out;
}

inline std::string from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw std::runtime_error("hex: odd length");
    std::string out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::runtime_error("hex: invalid digit");
        out.push_back(static_cast<char>((hi << 4) | lo));
    }
    return out;
}

struct AccountRecord {
    std::string username;
    std::string salt;  // raw bytes
    Digest digest{};

    // `v1:<username>:<salt-hex>:<digest-hex>` — note: no cost, no group.
    std::string serialize() const {
        const std::string_view digest_bytes(reinterpret_cast<const char*>(digest.data()),
                                            digest.size());
        return "v1:" + username + ":" + to_hex(salt) + ":" + to_hex(digest_bytes);
    }
};

inline AccountRecord parse_record(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ':') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    if (fields.size() != 4 || fields[0] != "v1" || fields[1].empty())
        throw std::runtime_error("record store: bad record at line " + std::to_string(lineno));
    AccountRecord rec;
    rec.username = fields[1];
    rec.salt = from_hex(fields[2]);
    const std::string digest_bytes = from_hex(fields[3]);
    if (digest_bytes.size() != rec.digest.size())
        throw std::runtime_error("record store: bad digest at line " + std::to_string(lineno));
    std::copy(digest_bytes.begin(), digest_bytes.end(), rec.digest.begin());
    return rec;
}

// Append-only record file with an in-memory index. Single writer; lookups
// are read-only and safe to run concurrently once loaded.
class RecordStore {
  public:
    explicit RecordStore(std::string path) : path_(std::move(path)) {
        std::ifstream in(path_);
        if (!in) return;  // fresh store
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            AccountRecord rec = parse_record(line, lineno);
            records_.emplace(rec.username, std::move(rec));
        }
    }

    const std::string& path() const { return path_; }
    bool contains(std::string_view username) const {
        return records_.count(std::string(username)) > 0;
    }
    const AccountRecord* find(std::string_view username) const {
        const auto it = records_.find(std::string(username));
        return it == records_.end() ? nullptr : &it->second;
    }

    void append(AccountRecord rec) {
        std::ofstream out(path_, std::ios::app | std::ios::binary);
        if (!out) throw std::runtime_error("record store: cannot open " + path_);
        out << rec.serialize() << '\n';
        out.flush();
        if (!out) throw std::runtime_error("record store: write failed on " + path_);
        records_.emplace(rec.username, std::move(rec));
    }

  private:
    std::string path_;
    std::unordered_map<std::string, AccountRecord> records_;
};

inline std::string random_salt(std::size_t bits) {
    if (bits == 0 || bits % 8 != 0)
        throw std::invalid_argument("salt length must be a positive multiple of 8 bits");
    std::random_device rd;  // platform CSPRNG (/dev/urandom or CPU source)
    std::string salt;
    salt.reserve(bits / 8);
    while (salt.size() < bits / 8) {
        const std::uint32_t word = rd();
        for (int i = 0; i < 4 && salt.size() < bits / 8; ++i)
            salt.push_back(static_cast<char>(word >> (8 * i)));
    }
    return salt;
}

inline const AccountRecord& create_account(RecordStore& store, const Policy& policy,
                                           std::string_view username, std::string_view password,
                                           std::size_t salt_bits = 128) {
    if (username.empty()) throw std::invalid_argument("create_account: empty username");
    for (char c : username)
        if (c == ':' || c == '\n' || c == '\r')
            throw std::invalid_argument("create_account: username may not contain ':' or newlines");
    if (store.contains(username))
        throw std::runtime_error("create_account: duplicate username " + std::string(username));
    AccountRecord rec;
    rec.username = std::string(username);
    rec.salt = random_salt(salt_bits);
    rec.digest = stretch(password, rec.salt, policy.cost_of(password));
    store.append(std::move(rec));
    return *store.find(username);
}

struct AuthOptions {
    // When positive, the call does not return before this much wall-clock
    // time has passed, masking the per-group cost difference.
    std::chrono::milliseconds fixed_response{0};
    std::uint64_t* invocations = nullptr;  // primitive-invocation count out-param
};

inline bool constant_time_equal(const Digest& a, const Digest& b) {
    unsigned diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned>(a[i] ^ b[i]);
    return diff == 0;
}

// Accepts iff stretching the candidate with the cost of the CANDIDATE's own
// group reproduces the stored digest. An unknown username is rejected through
// the same code path (the candidate is still stretched, against a dummy
// salt), so the API response and its cost do not reveal whether the account
// exists.
inline bool authenticate(const RecordStore& store, const Policy& policy,
                         std::string_view username, std::string_view candidate,
                         const AuthOptions& opts = {}) {
    const auto start = std::chrono::steady_clock::now();
    const AccountRecord* rec = store.find(username);
    static const std::string kDummySalt(16, '\0');
    const std::string_view salt = rec ? std::string_view(rec->salt) : std::string_view(kDummySalt);
    const Digest digest = stretch(candidate, salt, policy.cost_of(candidate), opts.invocations);
    const bool ok = rec != nullptr && constant_time_equal(digest, rec->digest);
    if (opts.fixed_response.count() > 0)
        std::this_thread::sleep_until(start + opts.fixed_response);
    return ok;
}

}  // namespace dahash
