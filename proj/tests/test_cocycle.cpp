#include <catch2/catch_amalgamated.hpp>

#include "cocyclab/cocycle.hpp"
#include "cocyclab/oracles.hpp"
#include "test_support.hpp"

using namespace cocyclab;
using testsupport::random_constant_rank;
using testsupport::random_matrix;
using testsupport::random_rank_one;

namespace {

Cocycle orthogonal_rank_one_pair() {
    // e1 e1^t and e2 e2^t: both cross pairings vanish exactly.
    Cocycle c;
    c.probs = {0.5, 0.5};
    Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    c.matrices = {a, b};
    return c;
}

}  // namespace

TEST_CASE("validate reports ranks and the constant-rank verdict") {
    const Cocycle c = rotation_cocycle(RotationAngle::radians(1.0));
    const ValidationReport rep = validate(c);
    REQUIRE(rep.ok());
    REQUIRE(rep.ranks == std::vector<int>{1, 2});
    REQUIRE_FALSE(rep.constant_rank);
    REQUIRE(rep.strict_interior);
}

TEST_CASE("validate flags a bad probability sum") {
    Cocycle c;
    c.probs = {0.5, 0.6};
    c.matrices = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    const ValidationReport rep = validate(c);
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& d : rep.defects) found |= d.find("sum") != std::string::npos;
    REQUIRE(found);
}

TEST_CASE("validate detects constant rank one") {
    const Cocycle c = random_rank_one(3, 2, 5);
    const ValidationReport rep = validate(c);
    REQUIRE(rep.ok());
    REQUIRE(rep.constant_rank);
    REQUIRE(rep.rank == 1);
}

TEST_CASE("validate flags non-finite entries and shape mismatches") {
    Cocycle c;
    c.probs = {1.0};
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    c.matrices = {bad};
    REQUIRE_FALSE(validate(c).ok());

    Cocycle shapes;
    shapes.probs = {0.5, 0.5};
    shapes.matrices = {Matrix::Identity(2, 2), Matrix::Identity(3, 3)};
    REQUIRE_FALSE(validate(shapes).ok());
}

TEST_CASE("the empty word multiplies to the identity") {
    const Cocycle c = random_constant_rank(3, 3, 2, 1);
    REQUIRE((product(c, {}) - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("P R P vanishes exactly at alpha = pi/2") {
    const Cocycle c = rotation_cocycle(RotationAngle::rational(1, 2));
    // right-to-left product: symbols P, R, P
    const Matrix prp = product(c, {0, 1, 0});
    REQUIRE((prp.array() == 0.0).all());
}

TEST_CASE("product matches a naive refold") {
    CounterRng rng(3, 9);
    const Cocycle c = random_constant_rank(4, 4, 3, 2);
    Word w;
    for (int i = 0; i < 10; ++i)
        w.push_back(static_cast<int>(rng.uniform01() * 3) % 3);
    Matrix naive = Matrix::Identity(4, 4);
    for (int t = 0; t < 10; ++t) naive = c.matrices[w[t]] * naive;
    REQUIRE((product(c, w) - naive).norm() <= 1e-12 * (1.0 + naive.norm()));
}

TEST_CASE("product rejects words beyond the overflow guard") {
    const Cocycle c = random_constant_rank(2, 2, 2, 3);
    const Word w(61, 0);
    REQUIRE_THROWS_AS(product(c, w), std::domain_error);
}

TEST_CASE("scaled product of isometries has zero log-norm") {
    Cocycle c;
    c.probs = {1.0};
    Matrix r(2, 2);
    r << std::cos(0.9), -std::sin(0.9), std::sin(0.9), std::cos(0.9);
    c.matrices = {r};
    const ScaledProduct sp = scaled_product(c, Word(200, 0));
    REQUIRE(std::abs(sp.log_norm) <= 1e-12 * 200);
    REQUIRE_FALSE(sp.vanished());
}

TEST_CASE("scaled product flags an exactly vanished product") {
    const Cocycle c = rotation_cocycle(RotationAngle::rational(1, 2));
    const ScaledProduct sp = scaled_product(c, {0, 1, 0});
    REQUIRE(sp.vanished());
}

TEST_CASE("scaled product agrees with the exact fold at length 40") {
    const Cocycle c = random_constant_rank(3, 3, 2, 4);
    Word w;
    CounterRng rng(8, 1);
    for (int i = 0; i < 40; ++i)
        w.push_back(static_cast<int>(rng.uniform01() * 2) % 2);
    const ScaledProduct sp = scaled_product(c, w);
    const double exact = std::log(operator_norm(product(c, w)));
    REQUIRE(sp.log_norm == Catch::Approx(exact).margin(1e-9));
    // the direction reconstructs the product
    const Matrix rebuilt = std::exp(sp.log_norm) * sp.direction;
    REQUIRE(operator_norm(rebuilt - product(c, w)) <=
            1e-10 * (1.0 + std::exp(sp.log_norm)));
}

TEST_CASE("log-norms are subadditive over concatenation") {
    const Cocycle c = random_constant_rank(3, 2, 2, 6);
    CounterRng rng(15, 2);
    for (int rep = 0; rep < 20; ++rep) {
        Word u, v;
        for (int i = 0; i < 15; ++i) {
            u.push_back(static_cast<int>(rng.uniform01() * 2) % 2);
            v.push_back(static_cast<int>(rng.uniform01() * 2) % 2);
        }
        Word uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        // product(uv) applies u first, then v
        const double joint = scaled_product(c, uv).log_norm;
        const double split =
            scaled_product(c, u).log_norm + scaled_product(c, v).log_norm;
        REQUIRE(joint <= split + 1e-9);
    }
}

TEST_CASE("theta of the identity cocycle is one") {
    Cocycle c;
    c.probs = {0.5, 0.5};
    c.matrices = {Matrix::Identity(3, 3), Matrix::Identity(3, 3)};
    REQUIRE(theta_k(c, 3) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("theta vanishes exactly for the orthogonal rank-one pair") {
    const Cocycle c = orthogonal_rank_one_pair();
    REQUIRE(theta_k(c, 1) == 0.0);
    REQUIRE_FALSE(pair_rank_check(c, 1));
}

TEST_CASE("theta of a rank-one family matches the hand formula") {
    const Cocycle c = random_rank_one(3, 2, 11);
    std::vector<Vector> us, vs;
    for (const Matrix& a : c.matrices) {
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        us.push_back(svd.singularValues()(0) * svd.matrixU().col(0));
        vs.push_back(svd.matrixV().col(0));
    }
    // |(u_i v_i^t)(u_j v_j^t)| = |u_i| |v_i . u_j| |v_j|, and the SVD
    // splitting leaves v_j unit with the scale folded into u_j.
    double expect = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            expect = std::min(expect,
                              us[i].norm() * std::abs(vs[i].dot(us[j])));
    REQUIRE(theta_k(c, 1) == Catch::Approx(expect).epsilon(1e-9));
}

TEST_CASE("theta positivity and the pair rank check agree") {
    for (int rep = 0; rep < 25; ++rep) {
        const Cocycle c = random_constant_rank(4, 2, 2, 40 + rep);
        const bool check = pair_rank_check(c, 2);
        const double theta = theta_k(c, 2);
        REQUIRE(check == (theta > 1e-12));
    }
    const Cocycle zero = orthogonal_rank_one_pair();
    REQUIRE(pair_rank_check(zero, 1) == (theta_k(zero, 1) > 0.0));
}

TEST_CASE("rank collapse of a pair product shows in the compound norm") {
    // A and B rank one with B mapping into the kernel of A, exactly.
    const Cocycle c = orthogonal_rank_one_pair();
    const Matrix ab = c.matrices[0] * c.matrices[1];
    REQUIRE(numeric_rank(ab) < 1);
    REQUIRE(compound_norm(ab, 1) == 0.0);
    // and a generic pair stays away from collapse
    const Cocycle g = random_rank_one(3, 2, 13);
    const Matrix gh = g.matrices[0] * g.matrices[1];
    REQUIRE(numeric_rank(gh) == 1);
    REQUIRE(compound_norm(gh, 1) >
            1e-9 * operator_norm(gh));
}

TEST_CASE("positive theta keeps every word product at full rank") {
    // Note the naive per-pair bound |compound(A^n)| >= theta^(n/2) is false:
    // consecutive rank-one compound factors can misalign, and a d=4, k=2
    // example violates it by an order of magnitude at n=20. What positive
    // theta does guarantee is that products never drop rank, so the compound
    // norm stays strictly positive along every word.
    const Cocycle c = random_constant_rank(4, 2, 2, 21);
    const double a = theta_k(c, 2);
    REQUIRE(a > 0.0);
    const Cocycle e2 = exterior_cocycle(c, 2);
    for (int rep = 0; rep < 10; ++rep) {
        const Word w = sample_word(c.probs, 20, 99, rep);
        REQUIRE(numeric_rank(product(c, w)) == 2);
        const ScaledProduct sp = scaled_product(e2, w);
        REQUIRE_FALSE(sp.vanished());
        REQUIRE(std::isfinite(sp.log_norm));
    }
}

TEST_CASE("theta rejects a rank mismatch") {
    const Cocycle c = rotation_cocycle(RotationAngle::radians(1.0));
    REQUIRE_THROWS_AS(theta_k(c, 1), std::domain_error);
}
