#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "scraloha/signature_code.hpp"

using namespace scraloha;

namespace {

std::vector<UserSet> subsets_up_to(std::uint32_t M, std::uint32_t K) {
    std::vector<UserSet> out;
    for (std::uint32_t mask = 0; mask < (1u << M); ++mask) {
        if (static_cast<std::uint32_t>(__builtin_popcount(mask)) > K) continue;
        UserSet s;
        for (std::uint32_t m = 0; m < M; ++m) {
            if (mask & (1u << m)) s.push_back(m);
        }
        out.push_back(s);
    }
    return out;
}

Word sum_of(const Codebook& b, const UserSet& users) {
    Word w(b.L, 0);
    for (auto u : users) {
        for (std::uint32_t l = 0; l < b.L; ++l) w[l] = (w[l] + b.codewords[u][l]) % b.q;
    }
    return w;
}

// Compares every pair of subsets directly; no hashing.
bool pairwise_distinct(const Codebook& b) {
    const auto subsets = subsets_up_to(b.M, b.K);
    std::vector<Word> sums;
    for (const auto& s : subsets) sums.push_back(sum_of(b, s));
    for (std::size_t i = 0; i < sums.size(); ++i) {
        for (std::size_t j = i + 1; j < sums.size(); ++j) {
            if (sums[i] == sums[j]) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("is_prime") {
    CHECK_FALSE(is_prime(0));
    CHECK_FALSE(is_prime(1));
    CHECK(is_prime(2));
    CHECK(is_prime(11));
    CHECK_FALSE(is_prime(91));
    CHECK(is_prime(65521));
}

TEST_CASE("length bound") {
    CHECK(std::isnan(signature_length_bound_bits(4, 4)));
    CHECK(signature_length_bound_bits(8, 1) == doctest::Approx(6.0));
    CHECK(signature_length_bound_bits(8, 2) == doctest::Approx(3.0 * (2.0 / (1.0 - 1.0 / 3.0) + 1.0)));
}

TEST_CASE("construction rejects bad parameters") {
    CHECK_THROWS_AS(construct_codebook(1, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(construct_codebook(4, 0, 5), std::invalid_argument);
    CHECK_THROWS_AS(construct_codebook(4, 2, 9), std::invalid_argument);
    CHECK_THROWS_AS(construct_codebook(4, 2, 3), std::invalid_argument);
}

TEST_CASE("small books satisfy the distinct-sum property by brute force") {
    for (auto [M, K, q] : {std::tuple{2u, 1u, 3u}, std::tuple{4u, 2u, 5u}, std::tuple{6u, 3u, 7u},
                           std::tuple{8u, 2u, 11u}}) {
        CAPTURE(M);
        CAPTURE(K);
        const auto r = construct_codebook(M, K, q);
        const auto& b = r.book;
        CHECK(b.M == M);
        CHECK(b.K == K);
        CHECK(b.q == q);
        REQUIRE(b.codewords.size() == M);
        for (const auto& w : b.codewords) {
            REQUIRE(w.size() == b.L);
            CHECK(w[0] == 1);
            for (auto s : w) CHECK(s < q);
        }
        CHECK(pairwise_distinct(b));
        CHECK(verify_codebook(b).empty());
        CHECK(r.bits == doctest::Approx(b.L * std::log2(static_cast<double>(q))));
        CHECK(r.bits >= std::log2(static_cast<double>(M)));
        CHECK(r.approx_bound_bits == doctest::Approx(K * std::log2(static_cast<double>(M))));
    }
}

TEST_CASE("construction is reproducible") {
    ConstructionOptions opt;
    opt.seed = 1234;
    const auto a = construct_codebook(8, 2, 11, opt);
    const auto b = construct_codebook(8, 2, 11, opt);
    CHECK(a.book.codewords == b.book.codewords);
    CHECK(a.seed == b.seed);
}

TEST_CASE("M=8 K=2 q=11 round trip") {
    const auto book = construct_codebook(8, 2, 11).book;
    const SignatureDecoder dec(book);
    CHECK(dec.table_size() == 1 + 8 + 28);
    for (const auto& users : subsets_up_to(8, 2)) {
        const auto rx = adder_channel(book, users);
        const auto d = dec.decode(rx);
        CHECK(d.multiplicity == users.size());
        REQUIRE(d.users.has_value());
        CHECK(*d.users == users);
    }
    // Unsorted input is the same set.
    CHECK(*dec.decode(adder_channel(book, {5, 1})).users == UserSet{1, 5});

    for (std::uint32_t n = 3; n <= 8; ++n) {
        UserSet users(n);
        for (std::uint32_t i = 0; i < n; ++i) users[i] = i;
        const auto d = dec.decode(adder_channel(book, users));
        CHECK(d.multiplicity == n);
        CHECK_FALSE(d.users.has_value());
    }
}

TEST_CASE("zero word decodes as idle") {
    const auto book = construct_codebook(4, 2, 5).book;
    const auto rx = adder_channel(book, {});
    CHECK(std::all_of(rx.begin(), rx.end(), [](Symbol s) { return s == 0; }));
    const auto d = decode(book, rx);
    CHECK(d.multiplicity == 0);
    REQUIRE(d.users.has_value());
    CHECK(d.users->empty());
}

TEST_CASE("adder channel errors") {
    const auto book = construct_codebook(4, 2, 5).book;
    CHECK_THROWS_AS(adder_channel(book, {4}), std::invalid_argument);
    CHECK_THROWS_AS(adder_channel(book, {1, 1}), std::invalid_argument);
}

TEST_CASE("corrupted received words") {
    const auto book = construct_codebook(8, 2, 11).book;
    const SignatureDecoder dec(book);
    auto rx = adder_channel(book, {2, 6});
    rx.back() = (rx.back() + 1) % book.q;
    CHECK_THROWS_AS(static_cast<void>(dec.decode(rx)), IntegrityError);

    Word short_word(book.L - 1, 0);
    CHECK_THROWS_AS(static_cast<void>(dec.decode(short_word)), std::invalid_argument);

    Word out_of_field(book.L, 0);
    out_of_field[1] = book.q;
    CHECK_THROWS_AS(static_cast<void>(dec.decode(out_of_field)), std::invalid_argument);
}

TEST_CASE("verify_codebook finds violations") {
    auto book = construct_codebook(4, 2, 5).book;
    REQUIRE(verify_codebook(book).empty());

    auto dup = book;
    dup.codewords[1] = dup.codewords[0];
    CHECK_FALSE(verify_codebook(dup).empty());

    auto lead = book;
    lead.codewords[2][0] = 2;
    CHECK_FALSE(verify_codebook(lead).empty());

    auto field = book;
    field.q = 4;
    CHECK_FALSE(verify_codebook(field).empty());

    auto ragged = book;
    ragged.codewords[3].pop_back();
    CHECK_FALSE(verify_codebook(ragged).empty());

    // a + b = c + d collision built by hand.
    auto collide = book;
    for (std::uint32_t l = 1; l < collide.L; ++l) {
        collide.codewords[3][l] =
            (collide.codewords[0][l] + collide.codewords[1][l] + collide.q - collide.codewords[2][l]) %
            collide.q;
    }
    CHECK(!pairwise_distinct(collide));
    CHECK_FALSE(verify_codebook(collide).empty());
}

TEST_CASE("json round trip") {
    const auto book = construct_codebook(6, 2, 7).book;
    const auto j = to_json(book);
    const auto back = codebook_from_json(j);
    CHECK(back.M == book.M);
    CHECK(back.K == book.K);
    CHECK(back.q == book.q);
    CHECK(back.L == book.L);
    CHECK(back.codewords == book.codewords);

    auto bad = j;
    bad["codewords"] = "nope";
    CHECK_THROWS_AS(codebook_from_json(bad), std::runtime_error);
    auto missing = j;
    missing.erase("q");
    CHECK_THROWS_AS(codebook_from_json(missing), std::runtime_error);
}

TEST_CASE("construction failure kinds") {
    ConstructionOptions opt;
    opt.max_length = 2;
    // 56 three-user sums must differ beyond coordinate 0; 11 symbols cannot hold them.
    try {
        construct_codebook(8, 3, 11, opt);
        FAIL("expected ConstructionFailure");
    } catch (const ConstructionFailure& e) {
        CHECK(e.proven_impossible());
    }

    ConstructionOptions tight;
    tight.candidates_per_word = 1;
    tight.restarts_per_length = 1;
    tight.max_length = 0;
    // With one draw per word the search may still succeed; a failure must
    // then be a budget failure.
    try {
        construct_codebook(10, 3, 11, tight);
    } catch (const ConstructionFailure& e) {
        CHECK_FALSE(e.proven_impossible());
    }
}
