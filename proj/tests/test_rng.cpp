#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "cocyclab/cocycle.hpp"
#include "cocyclab/rng.hpp"

using namespace cocyclab;

TEST_CASE("the counter stream is a pure function of seed and stream") {
    CounterRng a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
    CounterRng c(42, 8);
    bool differs = false;
    CounterRng a2(42, 7);
    for (int i = 0; i < 10; ++i) differs |= a2.next_u64() != c.next_u64();
    REQUIRE(differs);
}

TEST_CASE("uniform draws live in [0, 1) and fill the range") {
    CounterRng rng(1, 0);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    REQUIRE(lo < 0.01);
    REQUIRE(hi > 0.99);
}

TEST_CASE("normal draws have sane moments") {
    CounterRng rng(5, 3);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sumsq += x * x;
    }
    REQUIRE(std::abs(sum / n) < 0.01);
    REQUIRE(std::abs(sumsq / n - 1.0) < 0.02);
}

TEST_CASE("sample_word is deterministic in (seed, index)") {
    const std::vector<double> probs{0.5, 0.5};
    const Word w1 = sample_word(probs, 50, 9, 4);
    const Word w2 = sample_word(probs, 50, 9, 4);
    REQUIRE(w1 == w2);
    const Word w3 = sample_word(probs, 50, 9, 5);
    REQUIRE(w1 != w3);
}

TEST_CASE("a degenerate law samples the single live symbol") {
    const std::vector<double> probs{1.0, 0.0};
    const Word w = sample_word(probs, 5, 123, 0);
    REQUIRE(w == Word{0, 0, 0, 0, 0});
    const std::vector<double> flipped{0.0, 1.0};
    for (int s : sample_word(flipped, 100, 7, 1)) REQUIRE(s == 1);
}

TEST_CASE("empirical frequencies match the law") {
    const std::vector<double> probs{0.25, 0.75};
    const int n = 100000;
    const Word w = sample_word(probs, n, 2024, 0);
    int count1 = 0;
    for (int s : w) count1 += (s == 1);
    const double freq = static_cast<double>(count1) / n;
    const double se = std::sqrt(0.25 * 0.75 / n);
    REQUIRE(std::abs(freq - 0.75) <= 3.0 * se);
}

TEST_CASE("invalid probability vectors are rejected") {
    REQUIRE_THROWS_AS(sample_word(std::vector<double>{0.5, -0.5}, 5, 0, 0),
                      std::domain_error);
    REQUIRE_THROWS_AS(sample_word(std::vector<double>{0.5, 0.6}, 5, 0, 0),
                      std::domain_error);
    REQUIRE_THROWS_AS(sample_word(std::vector<double>{0.5, 0.5}, -1, 0, 0),
                      std::domain_error);
}

TEST_CASE("distinct sample indices give essentially independent words") {
    const std::vector<double> probs{0.5, 0.5};
    std::set<Word> seen;
    for (int i = 0; i < 64; ++i) seen.insert(sample_word(probs, 32, 77, i));
    REQUIRE(seen.size() == 64);
}
