#include <catch2/catch_amalgamated.hpp>

#include "cocyclab/lyapunov.hpp"
#include "cocyclab/oracles.hpp"
#include "test_support.hpp"

using namespace cocyclab;
using testsupport::random_constant_rank;
using testsupport::random_matrix;

namespace {

McOptions quick(int n = 1000, int samples = 100, std::uint64_t seed = 0) {
    McOptions opt;
    opt.n = n;
    opt.samples = samples;
    opt.seed = seed;
    return opt;
}

}  // namespace

TEST_CASE("a cocycle of rotations has zero top exponent") {
    Cocycle c;
    c.probs = {0.5, 0.5};
    Matrix r1(2, 2), r2(2, 2);
    r1 << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
    r2 << std::cos(1.1), -std::sin(1.1), std::sin(1.1), std::cos(1.1);
    c.matrices = {r1, r2};
    const LyapunovEstimate est = top_exponent_mc(c, quick());
    REQUIRE(std::abs(est.value()) <= 1e-10);
    REQUIRE(est.se() <= 1e-10);
    REQUIRE(est.zero_product_fraction == 0.0);
}

TEST_CASE("a single diagonal matrix gives its log top entry deterministically") {
    Cocycle c;
    c.probs = {1.0};
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 0.5;
    c.matrices = {a};
    const LyapunovEstimate est = top_exponent_mc(c, quick(500, 4));
    REQUIRE(est.value() == Catch::Approx(std::log(2.0)).margin(1e-12));
    REQUIRE(est.se() == 0.0);
}

TEST_CASE("the projection-rotation family at pi/2 vanishes") {
    const Cocycle c = rotation_cocycle(RotationAngle::rational(1, 2));
    const LyapunovEstimate est = top_exponent_mc(c, quick(100, 50));
    REQUIRE(is_neg_inf(est.value()));
    REQUIRE(est.zero_product_fraction > 0.0);
}

TEST_CASE("QR deflation recovers a diagonal spectrum") {
    Cocycle c;
    c.probs = {1.0};
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 3.0;
    a(1, 1) = 2.0;
    a(2, 2) = 1.0;
    c.matrices = {a};
    const LyapunovEstimate est = spectrum_qr(c, 3, quick(400, 2));
    REQUIRE(est.values[0] == Catch::Approx(std::log(3.0)).margin(1e-10));
    REQUIRE(est.values[1] == Catch::Approx(std::log(2.0)).margin(1e-10));
    REQUIRE(est.values[2] == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("exponents beyond the constant rank are minus infinity") {
    const Cocycle c = random_constant_rank(4, 2, 2, 31);
    const LyapunovEstimate est = spectrum_qr(c, 3, quick(300, 20));
    REQUIRE(std::isfinite(est.values[0]));
    REQUIRE(std::isfinite(est.values[1]));
    REQUIRE(is_neg_inf(est.values[2]));
    REQUIRE(est.stderrs[2] == 0.0);
    REQUIRE(est.zero_product_fraction > 0.0);
}

TEST_CASE("single-matrix spectra match the eigenvalue oracle") {
    CounterRng rng(41, 0);
    Matrix a = random_matrix(3, 3, rng);
    a += 2.5 * Matrix::Identity(3, 3);  // well-separated moduli, diagonalizable
    Cocycle c;
    c.probs = {1.0};
    c.matrices = {a};
    const auto oracle = single_matrix_spectrum(a);
    const LyapunovEstimate est = spectrum_qr(c, 3, quick(6000, 2));
    for (int i = 0; i < 3; ++i)
        REQUIRE(est.values[i] ==
                Catch::Approx(oracle[i]).margin(0.02 * (1.0 + std::abs(oracle[i]))));
}

TEST_CASE("scaling every matrix shifts all finite exponents by log lambda") {
    const Cocycle c = random_constant_rank(3, 3, 2, 33);
    Cocycle scaled = c;
    const double lambda = 2.0;  // power of two: entries scale exactly
    for (Matrix& m : scaled.matrices) m *= lambda;
    const LyapunovEstimate base = spectrum_qr(c, 3, quick(800, 40, 5));
    const LyapunovEstimate up = spectrum_qr(scaled, 3, quick(800, 40, 5));
    for (int i = 0; i < 3; ++i)
        REQUIRE(up.values[i] - base.values[i] ==
                Catch::Approx(std::log(lambda)).margin(1e-9));
    const LyapunovEstimate b1 = top_exponent_mc(c, quick(800, 40, 5));
    const LyapunovEstimate u1 = top_exponent_mc(scaled, quick(800, 40, 5));
    REQUIRE(u1.value() - b1.value() ==
            Catch::Approx(std::log(lambda)).margin(1e-9));
}

TEST_CASE("spectrum estimates are non-increasing and rank-k stays finite") {
    for (int rep = 0; rep < 5; ++rep) {
        const Cocycle c = random_constant_rank(4, 3, 2, 50 + rep);
        REQUIRE(theta_k(c, 3) > 0.0);
        const LyapunovEstimate est = spectrum_qr(c, 3, quick(600, 30, rep));
        for (int i = 0; i + 1 < 3; ++i)
            REQUIRE(est.values[i] >= est.values[i + 1] - 1e-12);
        REQUIRE(std::isfinite(est.values[2]));
    }
}

TEST_CASE("identical options reproduce bitwise identical estimates") {
    const Cocycle c = random_constant_rank(3, 2, 2, 61);
    const LyapunovEstimate a = top_exponent_mc(c, quick(500, 60, 9));
    const LyapunovEstimate b = top_exponent_mc(c, quick(500, 60, 9));
    REQUIRE(a.values[0] == b.values[0]);
    REQUIRE(a.stderrs[0] == b.stderrs[0]);
}

TEST_CASE("worker count does not change the result") {
    const Cocycle c = random_constant_rank(3, 2, 2, 62);
    McOptions one = quick(400, 64, 13);
    McOptions four = one;
    four.workers = 4;
    const LyapunovEstimate a = top_exponent_mc(c, one);
    const LyapunovEstimate b = top_exponent_mc(c, four);
    REQUIRE(a.values[0] == b.values[0]);
    REQUIRE(a.stderrs[0] == b.stderrs[0]);
    const LyapunovEstimate sa = spectrum_qr(c, 2, one);
    const LyapunovEstimate sb = spectrum_qr(c, 2, four);
    REQUIRE(sa.values == sb.values);
}

TEST_CASE("exterior consistency closes the loop") {
    SECTION("rotations in dimension two at k = 2") {
        Cocycle c;
        c.probs = {0.5, 0.5};
        Matrix r1(2, 2), r2(2, 2);
        r1 << std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4);
        r2 << std::cos(2.0), -std::sin(2.0), std::sin(2.0), std::cos(2.0);
        c.matrices = {r1, r2};
        REQUIRE(exterior_consistency(c, 2, quick(300, 20)) <= 1e-9);
    }
    SECTION("rank-one family at k = 2 vanishes on both sides") {
        // dyadic entries make the outer products exactly rank one, so the
        // compound matrices are exactly zero
        Cocycle c;
        c.probs = {0.5, 0.5};
        Vector u1(2), v1(2), u2(2), v2(2);
        u1 << 1.0, 0.5;
        v1 << 1.0, 2.0;
        u2 << 2.0, 1.0;
        v2 << 0.5, 1.0;
        c.matrices = {u1 * v1.transpose(), u2 * v2.transpose()};
        REQUIRE(exterior_consistency(c, 2, quick(50, 10)) == 0.0);
    }
    SECTION("random invertible cocycle at k = 2") {
        const Cocycle c = random_constant_rank(3, 3, 2, 71);
        McOptions opt = quick(2000, 150, 3);
        const double residual = exterior_consistency(c, 2, opt);
        const LyapunovEstimate lhs = top_exponent_mc(exterior_cocycle(c, 2), opt);
        const LyapunovEstimate rhs = spectrum_qr(c, 2, opt);
        const double se = std::hypot(
            lhs.se(), std::hypot(rhs.stderrs[0], rhs.stderrs[1]));
        REQUIRE(residual <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("estimator input guards") {
    const Cocycle c = random_constant_rank(3, 2, 2, 81);
    REQUIRE_THROWS_AS(spectrum_qr(c, 0, quick()), std::domain_error);
    REQUIRE_THROWS_AS(spectrum_qr(c, 4, quick()), std::domain_error);
    McOptions bad = quick();
    bad.samples = 0;
    REQUIRE_THROWS_AS(top_exponent_mc(c, bad), std::domain_error);
}
