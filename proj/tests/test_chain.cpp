#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "novmorse/chain.hpp"
#include "helpers.hpp"

using namespace novmorse;

namespace {

std::shared_ptr<ChainComplex<I64Ring>> circle_complex() {
    // boundary of a triangle: vertices A,B,C and edges AB,BC,CA
    auto C = std::make_shared<ChainComplex<I64Ring>>(I64Ring{});
    for (const char* v : {"A", "B", "C"}) C->basis.add(0, v);
    for (const char* e : {"AB", "BC", "CA"}) C->basis.add(1, e);
    auto d1 = mat_zero(C->ring, 3, 3);
    // d(AB) = B - A etc.
    d1.at(0, 0) = -1; d1.at(1, 0) = 1;
    d1.at(1, 1) = -1; d1.at(2, 1) = 1;
    d1.at(2, 2) = -1; d1.at(0, 2) = 1;
    C->set_d(1, d1);
    return C;
}

} // namespace

TEST_CASE("smith normal form basics") {
    std::vector<std::vector<BigInt>> m = {{2, 0}, {0, 3}};
    auto d = smith_diagonal(m);
    REQUIRE(d == std::vector<BigInt>{1, 6});

    std::vector<std::vector<BigInt>> id3 = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    REQUIRE(smith_diagonal(id3) == std::vector<BigInt>{1, 1, 1});

    std::vector<std::vector<BigInt>> z = {{0, 0}, {0, 0}};
    REQUIRE(smith_diagonal(z).empty());

    std::vector<std::vector<BigInt>> r = {{4, 6}, {6, 9}};
    // det 0, gcd 1 content structure: diagonal (1, 0) -> only 1 survives
    auto dr = smith_diagonal(r);
    REQUIRE(rank_from_smith(dr) == 1);
    REQUIRE(dr[0] == 1);
}

TEST_CASE("graded basis validation") {
    GradedBasis b;
    b.add(0, "p", Rational(1, 2));
    b.add(0, "q", Rational(3, 4));
    b.add(1, "e");
    REQUIRE_NOTHROW(b.validate());

    GradedBasis dup;
    dup.add(0, "p");
    dup.add(1, "p");
    REQUIRE_THROWS_AS(dup.validate(), GradingError);

    GradedBasis dec;
    dec.add(0, "p", Rational(2));
    dec.add(0, "q", Rational(1));
    REQUIRE_THROWS_AS(dec.validate(), GradingError);
}

TEST_CASE("circle complex has the homology of a circle") {
    auto C = circle_complex();
    auto rep = verify_complex(*C);
    REQUIRE(rep.ok);
    REQUIRE(rep.certified_precision == NovElem::EXACT);
    auto H = homology_Z(*C);
    REQUIRE(H[0].betti == 1);
    REQUIRE(H[0].torsion.empty());
    REQUIRE(H[1].betti == 1);
    REQUIRE(H[1].torsion.empty());
}

TEST_CASE("torsion shows up in divisibility order") {
    auto C = std::make_shared<ChainComplex<I64Ring>>(I64Ring{});
    C->basis.add(0, "a");
    C->basis.add(0, "b");
    C->basis.add(1, "e");
    C->basis.add(1, "f");
    auto d1 = mat_zero(C->ring, 2, 2);
    d1.at(0, 0) = 2;
    d1.at(1, 1) = 6;
    C->set_d(1, d1);
    auto H = homology_Z(*C);
    REQUIRE(H[0].betti == 0);
    REQUIRE(H[0].torsion == std::vector<BigInt>{2, 6});
    REQUIRE(H[1].betti == 0);
}

TEST_CASE("verify_complex pinpoints broken composites") {
    auto C = std::make_shared<ChainComplex<I64Ring>>(I64Ring{});
    C->basis.add(0, "v");
    C->basis.add(1, "e");
    C->basis.add(2, "f");
    auto d1 = mat_zero(C->ring, 1, 1);
    d1.at(0, 0) = 1;
    auto d2 = mat_zero(C->ring, 1, 1);
    d2.at(0, 0) = 3;
    C->set_d(1, d1);
    C->set_d(2, d2);
    auto rep = verify_complex(*C);
    REQUIRE_FALSE(rep.ok);
    REQUIRE(rep.violations.size() == 1);
    REQUIRE(rep.violations[0].degree == 2);
    REQUIRE(rep.violations[0].row == 0);
    REQUIRE(rep.violations[0].col == 0);
    REQUIRE(rep.violations[0].entry == "3");
}

TEST_CASE("random conjugated complexes really are complexes") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 30; ++it) {
        auto C = testing::random_int_complex(rng);
        REQUIRE(verify_complex(*C).ok);
        auto f = testing::random_nullhomotopic_endo(C, rng);
        REQUIRE_NOTHROW(validate_chain_map(f));
    }
}

TEST_CASE("chain map validation catches non-maps") {
    auto C = circle_complex();
    ChainMap<I64Ring> f(C, C, 0, false);
    auto blk = mat_zero(C->ring, 3, 3);
    blk.at(0, 0) = 1; // sends A to A but nothing else: not a chain map
    f.set_block(0, blk);
    auto e1 = mat_zero(C->ring, 3, 3);
    f.set_block(1, e1);
    REQUIRE_THROWS_AS(validate_chain_map(f), NotAChainMap);
    REQUIRE_NOTHROW(validate_chain_map(identity_map<I64Ring>(C)));
}

TEST_CASE("mapping cone has the dictated block structure") {
    auto C = circle_complex();
    auto f = identity_map<I64Ring>(C);
    auto cone = mapping_cone(f);
    REQUIRE(verify_complex(cone).ok);
    // cone_i = C_i + C_{i-1}
    REQUIRE(cone.basis.dim(0) == 3);
    REQUIRE(cone.basis.dim(1) == 6);
    REQUIRE(cone.basis.dim(2) == 3);
    // top-left block of d_1 is d_1 of the target, top-right is f_0 = 1
    auto d1 = cone.d(1);
    for (long long r = 0; r < 3; ++r)
        for (long long c = 0; c < 3; ++c) {
            REQUIRE(d1.at(r, c) == C->d(1).at(r, c));
            REQUIRE(d1.at(r, c + 3) == (r == c ? 1 : 0));
        }
    // bottom-left of d_2 is zero, bottom-right is -d_1
    auto d2 = cone.d(2);
    for (long long r = 0; r < 3; ++r)
        for (long long c = 0; c < 3; ++c)
            REQUIRE(d2.at(r + 3, c) == -C->d(1).at(r, c));
    // the cone of the identity is acyclic
    for (auto& [i, g] : homology_Z(cone)) {
        REQUIRE(g.betti == 0);
        REQUIRE(g.torsion.empty());
    }
}

TEST_CASE("cone comparison from a homotopy round-trips") {
    std::mt19937_64 rng(47);
    for (int it = 0; it < 25; ++it) {
        auto C = testing::random_int_complex(rng);
        std::map<long long, Matrix<long long>> u;
        auto delta = testing::random_nullhomotopic_endo(C, rng, &u);
        auto phi = testing::random_nullhomotopic_endo(C, rng);
        // phi' = phi + (d u + u d), homotopy psi = u
        ChainMap<I64Ring> phi2(C, C, 0, false);
        for (long long i : C->basis.degrees())
            phi2.set_block(i, mat_add(C->ring, phi.block(i), delta.block(i)));
        ChainHomotopy<I64Ring> h(phi, phi2);
        for (auto& [i, m] : u) h.set_block(i, m);
        REQUIRE_NOTHROW(validate_homotopy(h));

        auto fwd = cone_iso(h);

        // reversing the homotopy inverts the comparison
        ChainHomotopy<I64Ring> hrev(phi2, phi);
        for (auto& [i, m] : u) hrev.set_block(i, mat_neg(C->ring, m));
        auto bwd = cone_iso(hrev);

        for (long long i : fwd.cone_from->basis.degrees()) {
            auto round = mat_mul(C->ring, bwd.iso.block(i), fwd.iso.block(i));
            REQUIRE(mat_eq(C->ring, round,
                           mat_identity(C->ring, fwd.cone_from->basis.dim(i))));
        }
    }
}

TEST_CASE("broken homotopies are rejected") {
    auto C = circle_complex();
    auto phi = identity_map<I64Ring>(C);
    ChainMap<I64Ring> zero(C, C, 0, false);
    ChainHomotopy<I64Ring> h(phi, zero); // identity is not nullhomotopic here
    REQUIRE_THROWS_AS(validate_homotopy(h), HomotopyIdentityFails);
}

TEST_CASE("novikov ranks of unit and zero differentials") {
    NovRing ring(make_untwisted_context(0));
    auto one_minus_z = ring_sub(ring.one(), NovElem::monomial(ring.ctx, 1, {}, 1));

    ChainComplex<NovRing> C(ring);
    C.basis.add(0, "q");
    C.basis.add(1, "p");
    auto d = mat_zero(ring, 1, 1);
    d.at(0, 0) = one_minus_z;
    C.set_d(1, d);
    auto betti = novikov_ranks(C);
    REQUIRE(betti[0] == 0);
    REQUIRE(betti[1] == 0);

    // zero differential: both ranks survive
    ChainComplex<NovRing> Z(ring);
    Z.basis.add(0, "q");
    Z.basis.add(1, "p");
    auto bz = novikov_ranks(Z);
    REQUIRE(bz[0] == 1);
    REQUIRE(bz[1] == 1);
}

TEST_CASE("novikov ranks eliminate with minimal z-order pivots") {
    NovRing ring(make_untwisted_context(0));
    ChainComplex<NovRing> C(ring);
    C.basis.add(0, "q1");
    C.basis.add(0, "q2");
    C.basis.add(1, "p1");
    C.basis.add(1, "p2");
    auto d = mat_zero(ring, 2, 2);
    d.at(0, 0) = NovElem::constant(ring.ctx, -1);
    d.at(0, 1) = NovElem::constant(ring.ctx, 1);
    d.at(1, 0) = NovElem::constant(ring.ctx, 1);
    d.at(1, 1) = ring_neg(NovElem::monomial(ring.ctx, 1, {}, 1));
    C.set_d(1, d);
    // determinant z - 1 is a unit: full rank
    auto betti = novikov_ranks(C);
    REQUIRE(betti[0] == 0);
    REQUIRE(betti[1] == 0);
}

TEST_CASE("novikov ranks refuse uncertified zero decisions") {
    NovRing ring(make_untwisted_context(0));
    ChainComplex<NovRing> C(ring);
    C.basis.add(0, "q");
    C.basis.add(1, "p");
    auto d = mat_zero(ring, 1, 1);
    d.at(0, 0) = NovElem::zero(ring.ctx, 0); // nothing certified at all
    C.set_d(1, d);
    REQUIRE_THROWS_AS(novikov_ranks(C), PrecisionExhausted);
}

TEST_CASE("coefficient ring checks for the homology backends") {
    NovRing nring(make_untwisted_context(1));
    ChainComplex<NovRing> N(nring);
    N.basis.add(0, "a");
    REQUIRE_THROWS_AS(novikov_ranks(N), WrongCoefficients);
    REQUIRE_THROWS_AS(homology_Z(N), WrongCoefficients);

    ChainComplex<I64Ring> Z{I64Ring{}};
    Z.basis.add(0, "a");
    REQUIRE_THROWS_AS(novikov_ranks(Z), WrongCoefficients);
}

TEST_CASE("truncated complexes verify modulo their precision") {
    NovRing ring(make_untwisted_context(0));
    auto C = ChainComplex<NovRing>(ring);
    C.basis.add(0, "a");
    C.basis.add(1, "b");
    C.basis.add(2, "c");
    // d2 is certified zero only through z^2; the composite inherits a finite
    // certification window from it
    auto d1 = mat_zero(ring, 1, 1);
    d1.at(0, 0) = NovElem::monomial(ring.ctx, 1, {}, 1, 3);
    auto d2 = mat_zero(ring, 1, 1);
    d2.at(0, 0) = NovElem::zero(ring.ctx, 2);
    C.set_d(1, d1);
    C.set_d(2, d2);
    auto rep = verify_complex(C);
    REQUIRE(rep.ok); // the product's certified digits all vanish
    REQUIRE(rep.certified_precision == 3);
}
