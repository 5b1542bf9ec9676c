#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "novmorse/dmt.hpp"

using namespace novmorse;

namespace {

// multiset view of a torsion list, for order-free comparison
std::vector<long long> small_torsion(const std::vector<BigInt>& tors) {
    std::vector<long long> out;
    for (const auto& t : tors) out.push_back(static_cast<long long>(t));
    std::sort(out.begin(), out.end());
    return out;
}

bool same_matrix(const Matrix<long long>& a, const Matrix<long long>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (long long r = 0; r < a.rows(); ++r)
        for (long long c = 0; c < a.cols(); ++c)
            if (a.at(r, c) != b.at(r, c)) return false;
    return true;
}

// the digon: two vertices joined by two parallel edges
CellComplex digon() {
    CellComplex K;
    K.add_cell("u", 0);
    K.add_cell("v", 0);
    K.add_cell("e", 1, {{"v", 1}, {"u", -1}});
    K.add_cell("f", 1, {{"v", 1}, {"u", -1}});
    return K;
}

} // namespace

TEST_CASE("facet lists build verified cell complexes") {
    auto S1 = circle_triangle();
    REQUIRE(S1.f_vector() == std::map<long long, long long>{{0, 3}, {1, 3}});
    REQUIRE(S1.euler() == 0);
    REQUIRE(verify_cell_complex(S1).ok);

    auto S2 = sphere_tetrahedron();
    REQUIRE(S2.f_vector() ==
            std::map<long long, long long>{{0, 4}, {1, 6}, {2, 4}});
    REQUIRE(S2.euler() == 2);
    REQUIRE(verify_cell_complex(S2).ok);

    auto T2 = torus_seven();
    REQUIRE(T2.f_vector() ==
            std::map<long long, long long>{{0, 7}, {1, 21}, {2, 14}});
    REQUIRE(T2.euler() == 0);
    REQUIRE(verify_cell_complex(T2).ok);

    auto P2 = projective_plane_six();
    REQUIRE(P2.f_vector() ==
            std::map<long long, long long>{{0, 6}, {1, 15}, {2, 10}});
    REQUIRE(P2.euler() == 1);
    REQUIRE(verify_cell_complex(P2).ok);

    auto KB = klein_bottle();
    REQUIRE(KB.f_vector() ==
            std::map<long long, long long>{{0, 6}, {1, 12}, {2, 6}});
    REQUIRE(KB.euler() == 0);
    REQUIRE(verify_cell_complex(KB).ok);

    REQUIRE_THROWS_AS(from_simplicial({{0, 1}, {1, 0}}), DuplicateFacet);
    REQUIRE_THROWS_AS(from_simplicial({{0, 0, 1}}), DuplicateFacet);

    // a broken complex is reported, not silently accepted
    CellComplex bad;
    bad.add_cell("a", 0);
    bad.add_cell("b", 0);
    bad.add_cell("e", 1, {{"a", 1}, {"b", 1}}); // d^2 fine but orientation off
    bad.add_cell("s", 2, {{"e", 1}});
    auto rep = verify_cell_complex(bad);
    REQUIRE(!rep.ok); // d(d(s)) = a + b != 0
}

TEST_CASE("integer homology of the built-in surfaces") {
    auto check = [](const CellComplex& K, long long b0, long long b1,
                    long long b2, std::vector<long long> t1) {
        auto H = homology_Z(*cellular_complex(K));
        REQUIRE(H[0].betti == b0);
        REQUIRE(H[0].torsion.empty());
        REQUIRE(H[1].betti == b1);
        REQUIRE(small_torsion(H[1].torsion) == t1);
        REQUIRE(H[2].betti == b2);
        REQUIRE(H[2].torsion.empty());
    };
    check(circle_triangle(), 1, 1, 0, {});
    check(sphere_tetrahedron(), 1, 0, 1, {});
    check(torus_seven(), 1, 2, 1, {});
    check(projective_plane_six(), 1, 0, 0, {2});
    check(klein_bottle(), 1, 1, 0, {2});
}

TEST_CASE("field validation catches illegal pairs and flow cycles") {
    auto S1 = circle_triangle();

    VectorField bad_dim;
    bad_dim.pairs = {{"0.1", "0"}};
    REQUIRE(!validate_field(S1, bad_dim).ok);

    VectorField not_face;
    not_face.pairs = {{"0", "1.2"}};
    REQUIRE(!validate_field(S1, not_face).ok);

    VectorField double_target;
    double_target.pairs = {{"0", "0.1"}, {"1", "0.1"}};
    REQUIRE(!validate_field(S1, double_target).ok);

    VectorField chain2;
    chain2.pairs = {{"0", "0.1"}}; // fine on its own
    REQUIRE(validate_field(S1, chain2).ok);

    // the digon's two pairs chase each other around the circle
    VectorField cyc;
    cyc.pairs = {{"u", "e"}, {"v", "f"}};
    auto rep = validate_field(digon(), cyc);
    REQUIRE(!rep.ok);
    REQUIRE(rep.violations.front().find("cycle") != std::string::npos);
    REQUIRE_THROWS_AS(morse_complex(digon(), cyc), InvalidField);
}

TEST_CASE("path counts collapse a complex onto its critical cells") {
    auto S1 = circle_triangle();
    VectorField one;
    one.pairs = {{"1", "0.1"}};
    auto M = morse_complex(S1, one);
    REQUIRE(M->basis.dim(0) == 2);
    REQUIRE(M->basis.dim(1) == 2);
    REQUIRE(verify_complex(*M).ok);
    auto H = homology_Z(*M);
    REQUIRE(H[0].betti == 1);
    REQUIRE(H[1].betti == 1);

    // a perfect matching on the tetrahedron: two criticals, zero differential
    auto S2 = sphere_tetrahedron();
    VectorField perfect;
    perfect.pairs = {{"1", "0.1"},     {"2", "0.2"},     {"3", "0.3"},
                     {"1.2", "0.1.2"}, {"1.3", "0.1.3"}, {"2.3", "0.2.3"}};
    auto M2 = morse_complex(S2, perfect);
    REQUIRE(M2->basis.dim(0) == 1);
    REQUIRE(M2->basis.dim(1) == 0);
    REQUIRE(M2->basis.dim(2) == 1);
    auto H2 = homology_Z(*M2);
    REQUIRE(H2[0].betti == 1);
    REQUIRE(H2[2].betti == 1);

    // the empty field reproduces the cellular complex on the nose
    auto C = cellular_complex(S2);
    auto M0 = morse_complex(S2, VectorField{});
    REQUIRE(M0->basis == C->basis);
    for (long long i = 0; i <= 2; ++i)
        REQUIRE(same_matrix(M0->d(i), C->d(i)));
}

TEST_CASE("flow heights strictly drop along the counted paths") {
    std::mt19937_64 rng(20260822);
    for (const auto& K : {torus_seven(), projective_plane_six()}) {
        auto V = random_acyclic_matching(K, rng);
        auto heights = morse_values(K, V);
        ValueFiltration vf;
        vf.value = heights;
        vf.validate();
        auto M = morse_complex(K, V);
        for (long long i = M->basis.min_degree() + 1; i <= M->basis.max_degree();
             ++i) {
            auto d = M->d(i);
            const auto& rows = M->basis.labels(i - 1);
            const auto& cols = M->basis.labels(i);
            for (long long r = 0; r < d.rows(); ++r)
                for (long long c = 0; c < d.cols(); ++c)
                    if (d.at(r, c) != 0)
                        REQUIRE(heights.at(rows[r].name) <
                                heights.at(cols[c].name));
        }
        // crossing a matched pair is one flow edge, so it steps down too
        for (const auto& [s, t] : V.pairs)
            REQUIRE(heights.at(t) < heights.at(s));
    }
}

TEST_CASE("random matchings preserve homology across the corpus") {
    std::mt19937_64 rng(7);
    for (const auto& K : {circle_triangle(), sphere_tetrahedron(), torus_seven(),
                          projective_plane_six(), klein_bottle()}) {
        auto want = homology_Z(*cellular_complex(K));
        for (int trial = 0; trial < 5; ++trial) {
            auto V = random_acyclic_matching(K, rng);
            auto M = morse_complex(K, V);
            REQUIRE(verify_complex(*M).ok);
            auto got = homology_Z(*M);
            for (long long i = 0; i <= K.max_dim(); ++i) {
                REQUIRE(got[i].betti == want[i].betti);
                REQUIRE(small_torsion(got[i].torsion) ==
                        small_torsion(want[i].torsion));
            }
        }
    }
}

TEST_CASE("prisms, quotients and mapping tori fit together") {
    auto pt = one_point();
    auto Cyl = cylinder(pt);
    REQUIRE(Cyl.size() == 3);
    REQUIRE(verify_cell_complex(Cyl).ok);

    auto A = prism(circle_triangle(), 1);
    REQUIRE(A.f_vector() ==
            std::map<long long, long long>{{0, 6}, {1, 9}, {2, 3}});
    REQUIRE(A.euler() == 0);
    REQUIRE(verify_cell_complex(A).ok);

    auto rel = rel_quotient(Cyl, {level_id("0", 1)});
    REQUIRE(rel.size() == 2);
    REQUIRE(verify_cell_complex(rel).ok);
    // deleting a cell but keeping its faces is not a quotient
    REQUIRE_THROWS_AS(rel_quotient(Cyl, {prism_cell_id("0", 0)}),
                      GluingMismatch);

    // the mapping torus of the identity on a point is a circle
    std::map<std::string, std::pair<std::string, int>> id_rho = {{"0", {"0", 1}}};
    auto circ = mapping_torus(pt, 2, id_rho);
    REQUIRE(verify_cell_complex(circ).ok);
    auto H = homology_Z(*cellular_complex(circ));
    REQUIRE(H[0].betti == 1);
    REQUIRE(H[1].betti == 1);

    // a gluing map that breaks an incidence is rejected
    std::map<std::string, std::pair<std::string, int>> bad = {
        {"0", {"0", 1}},     {"1", {"2", 1}},      {"2", {"1", 1}},
        {"0.1", {"0.2", -1}}, {"1.2", {"1.2", -1}}, {"0.2", {"0.1", 1}},
    };
    REQUIRE_THROWS_AS(mapping_torus(circle_triangle(), 2, bad), GluingMismatch);
}

TEST_CASE("splitting collars add exactly the dip and hump cells") {
    auto N = circle_triangle();
    VectorField V_N;
    V_N.pairs = {{"1", "0.1"}, {"2", "1.2"}};
    auto ex = split_prism_example(N, V_N);

    // inventory: the collar adds one dip and one hump per fiber critical
    long long unsplit_crit = 0, split_crit = 0;
    for (long long i = 0; i <= 3; ++i) {
        unsplit_crit += ex.unsplit->basis.dim(i);
        split_crit += ex.split_morse->basis.dim(i);
    }
    REQUIRE(unsplit_crit == 12);
    REQUIRE(split_crit == 16);
    REQUIRE(ex.split.dips.size() == 2);
    REQUIRE(ex.split.humps.size() == 2);
    REQUIRE(verify_complex(*ex.unsplit).ok);
    REQUIRE(verify_complex(*ex.split_morse).ok);

    // dips sit in the fiber's dimensions, humps one higher
    auto D = morse_complex(N, V_N);
    for (const auto& [nid, mid] : ex.split.dips)
        REQUIRE(ex.split_morse->basis.find(mid)->first ==
                D->basis.find(nid)->first);
    for (const auto& [nid, mid] : ex.split.humps)
        REQUIRE(ex.split_morse->basis.find(mid)->first ==
                D->basis.find(nid)->first + 1);

    // block structure: identity cone, the fiber differential on the dips,
    // its negation on the humps
    std::map<long long, std::vector<std::string>> dips, humps;
    for (long long i = 0; i <= 1; ++i)
        for (const auto& l : D->basis.labels(i)) {
            dips[i].push_back(ex.split.dips.at(l.name));
            humps[i].push_back(ex.split.humps.at(l.name));
        }
    for (long long i = 0; i <= 1; ++i) {
        auto cone = morse_block(*ex.split_morse, dips[i], humps[i]);
        REQUIRE(cone.rows() == 1);
        REQUIRE(cone.at(0, 0) == 1);
    }
    auto dipblk = morse_block(*ex.split_morse, dips[0], dips[1]);
    auto humpblk = morse_block(*ex.split_morse, humps[0], humps[1]);
    auto dD = D->d(1);
    REQUIRE(same_matrix(dipblk, dD));
    for (long long r = 0; r < humpblk.rows(); ++r)
        for (long long c = 0; c < humpblk.cols(); ++c)
            REQUIRE(humpblk.at(r, c) == -dD.at(r, c));

    // with the trivial fiber field every fiber cell stays critical, so the
    // cone blocks are full identity matrices with genuine off-diagonal zeros
    auto ex0 = split_prism_example(N, VectorField{});
    REQUIRE(ex0.split.dips.size() == 6);
    REQUIRE(ex0.split.humps.size() == 6);
    std::map<long long, std::vector<std::string>> dips0, humps0;
    for (const auto& c : N.cells()) {
        dips0[c.dim].push_back(ex0.split.dips.at(c.id));
        humps0[c.dim].push_back(ex0.split.humps.at(c.id));
    }
    for (long long i = 0; i <= 1; ++i) {
        auto cone = morse_block(*ex0.split_morse, dips0[i], humps0[i]);
        REQUIRE(cone.rows() == 3);
        for (long long r = 0; r < 3; ++r)
            for (long long c = 0; c < 3; ++c)
                REQUIRE(cone.at(r, c) == (r == c ? 1 : 0));
    }

    // installing over the empty fiber changes nothing
    auto P = prism(one_point(), 5);
    std::vector<std::string> top = {level_id("0", 5)};
    auto M5 = rel_quotient(P, top);
    VectorField plain;
    for (long long t = 1; t <= 4; ++t)
        plain.pairs[level_id("0", t)] = prism_cell_id("0", t - 1);
    CellComplex empty;
    auto ins = insert_splitting_collar(M5, plain, CollarRegion{empty, 1},
                                       VectorField{});
    REQUIRE(ins.field.pairs == plain.pairs);
    REQUIRE(ins.dips.empty());

    // a field without the straight collar pattern is rejected
    VectorField broken = plain;
    broken.pairs.erase(level_id("0", 3));
    REQUIRE_THROWS_AS(
        insert_splitting_collar(M5, broken, CollarRegion{one_point(), 1},
                                VectorField{}),
        CollarPatternViolation);

    // a flow cycle anywhere in the rewired field is caught
    auto circle = circle_triangle();
    auto Md = prism(circle, 5);
    Md.add_cell("u", 0);
    Md.add_cell("v", 0);
    Md.add_cell("e", 1, {{"v", 1}, {"u", -1}});
    Md.add_cell("f", 1, {{"v", 1}, {"u", -1}});
    VectorField plain6;
    for (const auto& c : circle.cells())
        for (long long t = 1; t <= 4; ++t)
            plain6.pairs[level_id(c.id, t)] = prism_cell_id(c.id, t - 1);
    plain6.pairs["u"] = "e";
    plain6.pairs["v"] = "f";
    REQUIRE_THROWS_AS(
        insert_splitting_collar(Md, plain6, CollarRegion{circle_triangle(), 1},
                                V_N),
        AcyclicityLost);
}

TEST_CASE("cut cobordisms glue back to their unsplit complex") {
    auto N = circle_triangle();
    VectorField V_N;
    V_N.pairs = {{"1", "0.1"}, {"2", "1.2"}};

    // the cut-open examples: a point fiber and a circle fiber
    for (int which = 0; which < 2; ++which) {
        auto ex = which == 0 ? split_prism_example(one_point(), VectorField{})
                             : split_prism_example(N, V_N);
        auto parts = splitting_complex(ex.data);
        REQUIRE(verify_complex(*parts.C_h).ok);
        REQUIRE(glue_check(ex.data).ok);
        // the quotient by the acyclic middle is the unsplit count, entry by
        // entry
        for (long long i = 0; i <= 3; ++i) {
            REQUIRE(parts.coker->basis.dim(i) == ex.unsplit->basis.dim(i));
            auto a = parts.coker->d(i);
            auto b = ex.unsplit->d(i);
            REQUIRE(a.rows() == b.rows());
            REQUIRE(a.cols() == b.cols());
            for (long long r = 0; r < a.rows(); ++r)
                for (long long c = 0; c < a.cols(); ++c)
                    REQUIRE(a.at(r, c) == b.at(r, c));
        }
    }

    // the closed example: the sphere split along its separating equator
    auto sp = sphere_equator_split();
    REQUIRE(verify_complex(*sp.unsplit).ok);
    REQUIRE(verify_complex(*sp.split_morse).ok);
    auto Hu = homology_Z(*sp.unsplit);
    REQUIRE(Hu[0].betti == 1);
    REQUIRE(Hu[1].betti == 0);
    REQUIRE(Hu[2].betti == 1);
    auto Hs = homology_Z(*sp.split_morse);
    REQUIRE(Hs[0].betti == 1);
    REQUIRE(Hs[1].betti == 0);
    REQUIRE(Hs[2].betti == 1);
    REQUIRE(glue_check(sp.data).ok);
    auto parts = splitting_complex(sp.data);
    for (long long i = 0; i <= 3; ++i) {
        auto a = parts.coker->d(i);
        auto b = sp.unsplit->d(i);
        REQUIRE(a.rows() == b.rows());
        REQUIRE(a.cols() == b.cols());
        for (long long r = 0; r < a.rows(); ++r)
            for (long long c = 0; c < a.cols(); ++c)
                REQUIRE(a.at(r, c) == b.at(r, c));
    }

    // breaking one crossing entry breaks the glue identity, and the report
    // says where
    auto broken = sp.data;
    auto phi = *broken.phi;
    auto blk = phi.block(2);
    blk.at(0, 0) += 1;
    phi.set_block(2, blk);
    broken.phi = phi;
    auto rep = glue_check(broken);
    REQUIRE(!rep.ok);
    REQUIRE(!rep.discrepancies.empty());
}

TEST_CASE("unrolling a domain multiplies cells and keeps the seams") {
    auto FD = circle_fd(false);
    REQUIRE(FD.P.size() == 13);
    for (long long ell = 0; ell <= 3; ++ell) {
        auto U = unroll(FD, ell);
        REQUIRE(U.K.size() == (ell + 1) * 13 - ell * 1);
        REQUIRE(verify_cell_complex(U.K).ok);
        REQUIRE(U.final_out.size() == 1);
        REQUIRE(validate_field(U.K, U.V).ok);
    }

    auto FT = torus_rich_fd(false);
    REQUIRE(FT.P.size() == 8 * 6 + 7 * 6);
    auto U = unroll(FT, 2);
    REQUIRE(U.K.size() == 3 * 90 - 2 * 6);
    REQUIRE(verify_cell_complex(U.K).ok);
    REQUIRE(validate_field(U.K, U.V).ok);

    // a domain whose incoming boundary is not swept into the flow is rejected
    auto bad = circle_fd(false);
    bad.V.pairs.erase(level_id("0", 6));
    REQUIRE_THROWS_AS(unroll(bad, 1), GluingMismatch);
}

TEST_CASE("the z-graded count of the circle domain is one minus z") {
    auto FD = circle_fd(false);
    auto C = z_graded_morse(FD, 3);
    REQUIRE(C->basis.dim(0) == 1);
    REQUIRE(C->basis.dim(1) == 1);
    REQUIRE(C->basis.labels(0)[0].name == level_id("0", 5));
    REQUIRE(C->basis.labels(1)[0].name == prism_cell_id("0", 4));
    REQUIRE(C->ring.str(C->d(1).at(0, 0)) == "1*z^0 + (-1)*z^1");
}

TEST_CASE("extraction reads the splitting data off a collared domain") {
    // point fiber
    auto g = extract_gamma(circle_fd(true));
    REQUIRE(validate_gamma(g, 8).ok);
    REQUIRE(g.D->basis.dim(0) == 1);
    REQUIRE(g.F->basis.dim(0) == 1);
    REQUIRE(g.F->basis.dim(1) == 1);
    REQUIRE(g.ring.str(g.F->d(1).at(0, 0)) == "1*z^0");
    REQUIRE(g.ring.str(g.theta.block(1).at(0, 0)) == "(-1)*z^0");
    REQUIRE(g.ring.str(g.thetap.block(0).at(0, 0)) == "1*z^0");
    REQUIRE(g.ring.is_zero(g.psi.block(0).at(0, 0)));
    auto fhat = assemble_fhat(g, 8);
    auto oracle = circle_novikov(
        CircleFunction{{{"p", 1, Rational(9, 10)}, {"q", 0, Rational(1, 10)}},
                       1},
        8);
    REQUIRE(fhat.d(1).at(0, 0).congruent_mod(oracle->d(1).at(0, 0), 8));

    // circle fiber without interior criticals: everything carried by psi
    auto gt = extract_gamma(torus_projection_fd(true));
    REQUIRE(validate_gamma(gt, 8).ok);
    REQUIRE(gt.F->basis.empty());
    REQUIRE(gt.D->basis.dim(0) == 1);
    REQUIRE(gt.D->basis.dim(1) == 1);
    for (long long i = 0; i <= 1; ++i)
        REQUIRE(gt.ring.str(gt.psi.block(i).at(0, 0)) == "1*z^0");
    auto E = build_E(gt, 8);
    REQUIRE(verify_complex(E).ok);
    for (const auto& [deg, rank] : novikov_ranks(E)) {
        (void)deg;
        REQUIRE(rank == 0);
    }

    // circle fiber with a four-cell wall
    auto gr = extract_gamma(torus_rich_fd(true));
    REQUIRE(validate_gamma(gr, 8).ok);
    REQUIRE(gr.F->basis.dim(0) == 1);
    REQUIRE(gr.F->basis.dim(1) == 2);
    REQUIRE(gr.F->basis.dim(2) == 1);
    REQUIRE(verify_complex(assemble_fhat(gr, 6)).ok);
}

TEST_CASE("the assembled count agrees with the unrolled count") {
    {
        auto g = extract_gamma(circle_fd(true));
        auto plain = circle_fd(false);
        for (long long ell = 1; ell <= 3; ++ell) {
            auto fhat = assemble_fhat(g, ell + 1);
            auto direct = z_graded_morse(plain, ell);
            REQUIRE(diff_congruence(fhat, *direct, ell + 1).ok);
        }
    }
    {
        auto g = extract_gamma(torus_rich_fd(true));
        auto plain = torus_rich_fd(false);
        for (long long ell = 1; ell <= 2; ++ell) {
            auto fhat = assemble_fhat(g, ell + 1);
            auto direct = z_graded_morse(plain, ell);
            REQUIRE(diff_congruence(fhat, *direct, ell + 1).ok);
        }
    }
}

TEST_CASE("collar cobordisms carry the identity as continuation") {
    // straight collar: the continuation map is the identity on the nose
    for (const auto& N : {circle_triangle(), sphere_tetrahedron()}) {
        auto cc = collar_cobordism(N, VectorField{});
        auto M = morse_complex(cc.M, cc.field);
        auto E = assemble_triple(cc.triple);
        for (long long i = 0; i <= N.max_dim() + 1; ++i) {
            REQUIRE(E.basis.dim(i) == M->basis.dim(i));
            auto a = E.d(i);
            auto b = M->d(i);
            for (long long r = 0; r < a.rows(); ++r)
                for (long long c = 0; c < a.cols(); ++c)
                    REQUIRE(a.at(r, c) == b.at(r, c));
        }
        auto psi = continuation_map(cc.triple);
        for (long long i = 0; i <= N.max_dim(); ++i) {
            auto blk = psi.block(i);
            for (long long r = 0; r < blk.rows(); ++r)
                for (long long c = 0; c < blk.cols(); ++c)
                    REQUIRE(blk.at(r, c) == (r == c ? 1 : 0));
        }
    }

    // perturbed collar: unit diagonal and triangular against the flow heights
    VectorField V_N;
    V_N.pairs = {{"1", "0.1"}, {"2", "1.2"}};
    auto cc = collar_cobordism(circle_triangle(), V_N);
    auto E = assemble_triple(cc.triple); // the triple identities hold
    REQUIRE(verify_complex(E).ok);
    auto psi = continuation_map(cc.triple);
    cc.values.validate();
    auto trep = triangularity_check(psi, cc.values);
    REQUIRE(trep.ok);

    // composites of continuations stay triangular
    ChainMap<I64Ring> endo(cc.triple.D, cc.triple.D, 0);
    for (long long i = 0; i <= 1; ++i) endo.set_block(i, psi.block(i));
    auto twice = compose(endo, endo);
    ValueFiltration vf;
    for (const auto& [k, v] : cc.values.value)
        if (k.find("|I") == std::string::npos) vf.value[k] = v;
    auto trep2 = triangularity_check(twice, vf);
    REQUIRE(trep2.ok);
}

TEST_CASE("double cylinders satisfy the matching identity") {
    for (int which = 0; which < 2; ++which) {
        DoubleCylinder dc =
            which == 0
                ? double_cylinder_square(
                      two_points(), {{"0", Rational(0)}, {"1", Rational(10)}},
                      Rational(1), Rational(1))
                : double_cylinder_square(circle_triangle(),
                                         {{"0", Rational(0)},
                                          {"1", Rational(10)},
                                          {"2", Rational(20)},
                                          {"0.1", Rational(30)},
                                          {"1.2", Rational(40)},
                                          {"0.2", Rational(50)}},
                                         Rational(1), Rational(2));
        REQUIRE(dc.eps == dc.delta - dc.mu);
        REQUIRE(verify_complex(*dc.C).ok);
        auto rep = setting_check(*dc.C, dc.f0, dc.f1, dc.f2, dc.f3, dc.eps);
        REQUIRE(rep.ok);
        REQUIRE(rep.qualifying_pairs > 0);

        // corrupt one square: find a composite that must now show up
        auto C = *dc.C;
        bool bumped = false;
        for (const auto& u : dc.f3) {
            if (bumped) break;
            auto up = C.basis.find(u);
            for (const auto& y : dc.f1) {
                if (bumped) break;
                auto yp = C.basis.find(y);
                if (yp->first != up->first - 1) continue;
                for (const auto& v : dc.f0) {
                    auto vp = C.basis.find(v);
                    if (vp->first != yp->first - 1) continue;
                    if (C.d(yp->first).at(vp->second, yp->second) == 0) continue;
                    auto uval = C.basis.labels(up->first)[up->second].value;
                    auto vval = C.basis.labels(vp->first)[vp->second].value;
                    if (!uval || !vval || *uval - *vval >= dc.eps) continue;
                    auto d = C.d(up->first);
                    d.at(yp->second, up->second) += 1;
                    C.set_d(up->first, d);
                    bumped = true;
                    break;
                }
            }
        }
        REQUIRE(bumped);
        auto bad = setting_check(C, dc.f0, dc.f1, dc.f2, dc.f3, dc.eps);
        REQUIRE(!bad.ok);
        REQUIRE(!bad.complex_violations.empty());
    }

    REQUIRE_THROWS_AS(
        double_cylinder_square(two_points(),
                               {{"0", Rational(0)}, {"1", Rational(1)}},
                               Rational(1), Rational(1)),
        GradingError);
}

TEST_CASE("circle functions without winding count like intervals") {
    CircleFunction empty;
    auto C0 = circle_morse(empty);
    REQUIRE(C0->basis.empty());

    CircleFunction two{{{"p", 1, Rational(9, 10)}, {"q", 0, Rational(1, 10)}}, 0};
    auto C2 = circle_morse(two);
    REQUIRE(C2->d(1).at(0, 0) == 0);
    auto H2 = homology_Z(*C2);
    REQUIRE(H2[0].betti == 1);
    REQUIRE(H2[1].betti == 1);

    CircleFunction four{{{"p1", 1, Rational(9, 10)},
                         {"q1", 0, Rational(1, 10)},
                         {"p2", 1, Rational(8, 10)},
                         {"q2", 0, Rational(2, 10)}},
                        0};
    auto C4 = circle_morse(four);
    // each maximum bounds: the one behind +1, the one ahead -1
    REQUIRE(C4->d(1).at(0, 0) == -1);
    REQUIRE(C4->d(1).at(1, 0) == 1);
    REQUIRE(C4->d(1).at(0, 1) == 1);
    REQUIRE(C4->d(1).at(1, 1) == -1);
    auto H4 = homology_Z(*C4);
    REQUIRE(H4[0].betti == 1);
    REQUIRE(H4[1].betti == 1);

    CircleFunction adjacent{{{"p1", 1, Rational(1, 2)},
                             {"p2", 1, Rational(1, 4)},
                             {"q1", 0, Rational(0)},
                             {"q2", 0, Rational(1, 8)}},
                            0};
    REQUIRE_THROWS_AS(circle_morse(adjacent), NotAlternating);
    CircleFunction odd{{{"p", 1, Rational(0)}}, 0};
    REQUIRE_THROWS_AS(circle_morse(odd), NotAlternating);
}

TEST_CASE("winding circle functions count with exact period weights") {
    CircleFunction two{{{"p", 1, Rational(9, 10)}, {"q", 0, Rational(1, 10)}}, 1};
    auto C = circle_novikov(two, 8);
    REQUIRE(C->ring.str(C->d(1).at(0, 0)) == "1*z^0 + (-1)*z^1");
    for (const auto& [deg, rank] : novikov_ranks(*C)) {
        (void)deg;
        REQUIRE(rank == 0);
    }

    CircleFunction four{{{"p1", 1, Rational(9, 10)},
                         {"q1", 0, Rational(1, 10)},
                         {"p2", 1, Rational(8, 10)},
                         {"q2", 0, Rational(2, 10)}},
                        1};
    auto C4 = circle_novikov(four, 8);
    // rows q1, q2; columns p1, p2
    REQUIRE(C4->ring.str(C4->d(1).at(0, 0)) == "(-1)*z^0");
    REQUIRE(C4->ring.str(C4->d(1).at(1, 0)) == "1*z^0");
    REQUIRE(C4->ring.str(C4->d(1).at(0, 1)) == "1*z^0");
    REQUIRE(C4->ring.str(C4->d(1).at(1, 1)) == "(-1)*z^1");
    REQUIRE(verify_complex(*C4).ok);
    for (const auto& [deg, rank] : novikov_ranks(*C4)) {
        (void)deg;
        REQUIRE(rank == 0);
    }

    REQUIRE_THROWS_AS(circle_novikov(CircleFunction{two.points, 0}, 8),
                      GradingError);
    REQUIRE_THROWS_AS(circle_novikov(two, 0), PrecisionExhausted);
    CircleFunction outside{
        {{"p", 1, Rational(3, 2)}, {"q", 0, Rational(1, 10)}}, 1};
    REQUIRE_THROWS_AS(circle_novikov(outside, 8), GradingError);
    CircleFunction collide{
        {{"p", 1, Rational(1, 2)}, {"q", 0, Rational(1, 2)}}, 1};
    REQUIRE_THROWS_AS(circle_novikov(collide, 8), GradingError);
}
