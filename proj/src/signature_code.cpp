#include "scraloha/signature_code.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_set>

#include "scraloha/rng.hpp"

namespace scraloha {

namespace {

struct WordHasher {
    std::size_t operator()(const Word& w) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (Symbol s : w) {
            h ^= s;
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

// C(n, k) saturating at uint64 max.
std::uint64_t binomial_coefficient(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / i;
    if (r >= 1.8e19L) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(std::llround(r));
}

// Shortest L such that q^(L-1) >= C(M, j) for every j <= K: same-size
// subsets share coordinate 0 and must be told apart by the other L-1.
std::uint32_t shortest_feasible_length(std::uint32_t M, std::uint32_t K, std::uint32_t q) {
    std::uint64_t needed = 1;
    for (std::uint32_t j = 1; j <= std::min(K, M); ++j) {
        needed = std::max(needed, binomial_coefficient(M, j));
    }
    std::uint32_t L = 1;
    long double capacity = 1.0L;
    while (capacity < static_cast<long double>(needed)) {
        capacity *= q;
        ++L;
    }
    return std::max<std::uint32_t>(L, 2);
}

void add_into(Word& acc, const Word& w, std::uint32_t q) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = (acc[i] + w[i]) % q;
}

// Calls visit(subset) for every subset of {0..M-1} with size <= K, in
// lexicographic order of sorted index lists.
void for_each_subset(std::uint32_t M, std::uint32_t K,
                     const std::function<void(const UserSet&)>& visit) {
    UserSet current;
    std::function<void(std::uint32_t)> rec = [&](std::uint32_t start) {
        visit(current);
        if (current.size() == K) return;
        for (std::uint32_t i = start; i < M; ++i) {
            current.push_back(i);
            rec(i + 1);
            current.pop_back();
        }
    };
    rec(0);
}

struct PartialSum {
    Word sum;
    std::uint32_t size;
};

// One greedy pass: draw codewords one at a time, keeping a candidate only if
// none of its new subset sums collides with an existing one.
std::optional<std::vector<Word>> greedy_attempt(std::uint32_t M, std::uint32_t K, std::uint32_t q,
                                                std::uint32_t L, std::uint32_t candidates,
                                                Xoshiro256& rng) {
    std::vector<Word> words;
    std::vector<PartialSum> partial{{Word(L, 0), 0}};
    std::unordered_set<Word, WordHasher> seen{Word(L, 0)};

    Word candidate(L);
    std::vector<PartialSum> fresh;
    for (std::uint32_t m = 0; m < M; ++m) {
        bool placed = false;
        for (std::uint32_t tries = 0; tries < candidates && !placed; ++tries) {
            candidate[0] = 1;
            for (std::uint32_t i = 1; i < L; ++i) {
                candidate[i] = static_cast<Symbol>(rng() % q);
            }
            fresh.clear();
            bool ok = true;
            for (const auto& p : partial) {
                if (p.size >= K) continue;
                Word s = p.sum;
                add_into(s, candidate, q);
                if (seen.count(s)) {
                    ok = false;
                    break;
                }
                fresh.push_back({std::move(s), p.size + 1});
            }
            if (!ok) continue;
            for (auto& f : fresh) {
                seen.insert(f.sum);
                partial.push_back(std::move(f));
            }
            words.push_back(candidate);
            placed = true;
        }
        if (!placed) return std::nullopt;
    }
    return words;
}

}  // namespace

bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

double signature_length_bound_bits(std::uint32_t M, std::uint32_t K) {
    if (M < 2 || K == 0 || K >= M) return std::numeric_limits<double>::quiet_NaN();
    const double lm = std::log2(static_cast<double>(M));
    const double lk = std::log2(static_cast<double>(K));
    return lm * (K / (1.0 - lk / lm) + 1.0);
}

ConstructionReport construct_codebook(std::uint32_t M, std::uint32_t K, std::uint32_t q,
                                      const ConstructionOptions& options) {
    if (M < 2) throw std::invalid_argument("construct_codebook: M must be >= 2");
    if (K < 1) throw std::invalid_argument("construct_codebook: K must be >= 1");
    if (!is_prime(q)) throw std::invalid_argument("construct_codebook: q must be prime");
    if (q <= M) throw std::invalid_argument("construct_codebook: q must exceed M");

    const std::uint32_t shortest = shortest_feasible_length(M, K, q);
    const std::uint32_t longest = options.max_length ? options.max_length : shortest + 16;
    if (longest < shortest) {
        throw ConstructionFailure("no codebook with L <= " + std::to_string(longest) +
                                      " exists: counting requires L >= " + std::to_string(shortest),
                                  true);
    }

    ConstructionReport report;
    report.bound_bits = signature_length_bound_bits(M, K);
    report.approx_bound_bits = K * std::log2(static_cast<double>(M));

    for (std::uint32_t L = shortest; L <= longest; ++L) {
        for (std::uint32_t r = 0; r < options.restarts_per_length; ++r) {
            const std::uint64_t seed = derive_seed(options.seed, report.attempts);
            ++report.attempts;
            Xoshiro256 rng(seed);
            auto words = greedy_attempt(M, K, q, L, options.candidates_per_word, rng);
            if (!words) continue;
            report.book = Codebook{M, K, q, L, std::move(*words)};
            report.seed = seed;
            report.bits = L * std::log2(static_cast<double>(q));
            return report;
        }
    }
    throw ConstructionFailure("search budget exhausted for M=" + std::to_string(M) +
                                  ", K=" + std::to_string(K) + ", q=" + std::to_string(q) +
                                  " up to L=" + std::to_string(longest),
                              false);
}

Word adder_channel(const Codebook& book, const std::vector<std::uint32_t>& transmitters) {
    Word out(book.L, 0);
    std::vector<bool> used(book.M, false);
    for (std::uint32_t m : transmitters) {
        if (m >= book.M) {
            throw std::invalid_argument("adder_channel: user index " + std::to_string(m) +
                                        " out of range");
        }
        if (used[m]) {
            throw std::invalid_argument("adder_channel: user " + std::to_string(m) +
                                        " transmits twice");
        }
        used[m] = true;
        add_into(out, book.codewords[m], book.q);
    }
    return out;
}

std::size_t SignatureDecoder::WordHash::operator()(const Word& w) const noexcept {
    return WordHasher{}(w);
}

SignatureDecoder::SignatureDecoder(Codebook book) : book_(std::move(book)) {
    for_each_subset(book_.M, book_.K, [&](const UserSet& s) {
        table_.emplace(adder_channel(book_, s), s);
    });
}

Decoded SignatureDecoder::decode(const Word& received) const {
    if (received.size() != book_.L) {
        throw std::invalid_argument("decode: received word has length " +
                                    std::to_string(received.size()) + ", expected " +
                                    std::to_string(book_.L));
    }
    for (Symbol s : received) {
        if (s >= book_.q) throw std::invalid_argument("decode: symbol outside F_q");
    }
    Decoded out;
    out.multiplicity = received[0];
    if (out.multiplicity > book_.M) {
        throw IntegrityError("decode: multiplicity " + std::to_string(out.multiplicity) +
                             " exceeds the number of users");
    }
    if (out.multiplicity > book_.K) return out;

    const auto it = table_.find(received);
    if (it == table_.end() || it->second.size() != out.multiplicity) {
        throw IntegrityError("decode: received word is not a sum of " +
                             std::to_string(out.multiplicity) + " codewords");
    }
    out.users = it->second;
    return out;
}

Decoded decode(const Codebook& book, const Word& received) {
    return SignatureDecoder(book).decode(received);
}

std::vector<std::string> verify_codebook(const Codebook& book) {
    std::vector<std::string> problems;
    if (book.M < 2) problems.push_back("M must be >= 2");
    if (book.K < 1) problems.push_back("K must be >= 1");
    if (!is_prime(book.q)) problems.push_back("q=" + std::to_string(book.q) + " is not prime");
    if (book.q <= book.M) problems.push_back("q must exceed M for exact multiplicity");
    if (book.L < 1) problems.push_back("L must be >= 1");
    if (book.codewords.size() != book.M) {
        problems.push_back("expected " + std::to_string(book.M) + " codewords, found " +
                           std::to_string(book.codewords.size()));
    }
    for (std::size_t m = 0; m < book.codewords.size(); ++m) {
        const auto& w = book.codewords[m];
        const std::string tag = "codeword " + std::to_string(m) + ": ";
        if (w.size() != book.L) problems.push_back(tag + "length differs from L");
        if (std::any_of(w.begin(), w.end(), [&](Symbol s) { return s >= book.q; })) {
            problems.push_back(tag + "symbol outside F_q");
        }
        if (w.empty() || w[0] != 1) problems.push_back(tag + "multiplicity coordinate is not 1");
    }
    if (!problems.empty()) return problems;

    std::unordered_map<Word, UserSet, WordHasher> sums;
    for_each_subset(book.M, book.K, [&](const UserSet& s) {
        auto [it, inserted] = sums.emplace(adder_channel(book, s), s);
        if (!inserted && problems.size() < 10) {
            auto show = [](const UserSet& u) {
                std::string out = "{";
                for (std::size_t i = 0; i < u.size(); ++i) out += (i ? "," : "") + std::to_string(u[i]);
                return out + "}";
            };
            problems.push_back("subsets " + show(it->second) + " and " + show(s) +
                               " have the same sum");
        }
    });
    return problems;
}

nlohmann::json to_json(const Codebook& book) {
    return {{"M", book.M}, {"K", book.K}, {"q", book.q}, {"L", book.L}, {"codewords", book.codewords}};
}

Codebook codebook_from_json(const nlohmann::json& j) {
    try {
        Codebook book;
        book.M = j.at("M").get<std::uint32_t>();
        book.K = j.at("K").get<std::uint32_t>();
        book.q = j.at("q").get<std::uint32_t>();
        book.L = j.at("L").get<std::uint32_t>();
        book.codewords = j.at("codewords").get<std::vector<Word>>();
        return book;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("codebook json: ") + e.what());
    }
}

}  // namespace scraloha
