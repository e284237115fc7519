#pragma once

// Signature codes for the noiseless F_q adder channel.
//
// Each of M users owns a codeword of length L over the prime field F_q.
// The channel returns the symbol-wise F_q sum of the transmitted codewords.
// A codebook is usable by a K-resolution receiver when
//
//   * coordinate 0 of every codeword is 1 and q > M, so coordinate 0 of any
//     received sum is the exact number of transmitters, and
//   * sums of distinct subsets of at most K codewords are pairwise distinct
//     (the B_K property), so any <= K transmitters can be identified.
//
// Books are found by randomized greedy search with incremental verification.
// Decoding matches against a table of every subset sum of size <= K, which
// holds sum_{j<=K} C(M, j) entries: fine for M up to ~16 and K <= 3, not
// beyond.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace scraloha {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;
using UserSet = std::vector<std::uint32_t>;  // sorted, no duplicates

struct Codebook {
    std::uint32_t M = 0;
    std::uint32_t K = 0;
    std::uint32_t q = 0;  // prime field size
    std::uint32_t L = 0;
    std::vector<Word> codewords;
};

bool is_prime(std::uint32_t n);

/// Signature length from the Lindstrom-type bound,
///     log2 M * (K / (1 - log2 K / log2 M) + 1)   [bits],
/// NaN when K >= M (the expression has no meaning there).
double signature_length_bound_bits(std::uint32_t M, std::uint32_t K);

/// Search budget and reproducibility knobs for construct_codebook.
struct ConstructionOptions {
    std::uint64_t seed = 1;
    std::uint32_t candidates_per_word = 2000;  // random draws per codeword before restarting
    std::uint32_t restarts_per_length = 50;
    /// Longest length tried; 0 means 16 beyond the shortest length that
    /// counting allows.
    std::uint32_t max_length = 0;
};

struct ConstructionReport {
    Codebook book;
    std::uint64_t seed = 0;              // seed of the winning attempt
    std::uint32_t attempts = 0;          // restarts consumed across all lengths
    double bits = 0.0;                   // L * log2 q
    double bound_bits = 0.0;             // signature_length_bound_bits(M, K)
    double approx_bound_bits = 0.0;      // K log2 M
};

/// The search gave up. `proven_impossible()` is true when counting alone
/// rules out every allowed length (no such book exists), false when the
/// search budget ran out.
class ConstructionFailure : public std::runtime_error {
public:
    ConstructionFailure(const std::string& what, bool proven_impossible)
        : std::runtime_error(what), proven_impossible_(proven_impossible) {}
    [[nodiscard]] bool proven_impossible() const { return proven_impossible_; }

private:
    bool proven_impossible_;
};

/// Throws std::invalid_argument unless q is prime, q > M, M >= 2, K >= 1.
ConstructionReport construct_codebook(std::uint32_t M, std::uint32_t K, std::uint32_t q,
                                      const ConstructionOptions& options = {});

/// Symbol-wise F_q sum of the selected codewords. Throws on an index >= M or
/// a repeated index. The empty set yields the zero word.
Word adder_channel(const Codebook& book, const std::vector<std::uint32_t>& transmitters);

struct Decoded {
    std::uint32_t multiplicity = 0;
    std::optional<UserSet> users;  // absent when multiplicity > K
};

/// Received word is not a sum of `multiplicity` codewords of this book.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Holds the subset-sum table; build once, decode many.
class SignatureDecoder {
public:
    explicit SignatureDecoder(Codebook book);

    [[nodiscard]] Decoded decode(const Word& received) const;
    [[nodiscard]] const Codebook& book() const { return book_; }
    [[nodiscard]] std::size_t table_size() const { return table_.size(); }

private:
    struct WordHash {
        std::size_t operator()(const Word& w) const noexcept;
    };
    Codebook book_;
    std::unordered_map<Word, UserSet, WordHash> table_;
};

/// One-shot convenience; builds a decoder per call.
Decoded decode(const Codebook& book, const Word& received);

/// Every invariant a usable codebook must satisfy. Empty when valid.
std::vector<std::string> verify_codebook(const Codebook& book);

nlohmann::json to_json(const Codebook& book);

/// Parses {M, K, q, L, codewords}; throws std::runtime_error on structural
/// problems (wrong types, ragged rows). Invariants are left to
/// verify_codebook.
Codebook codebook_from_json(const nlohmann::json& j);

}  // namespace scraloha
