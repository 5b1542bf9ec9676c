#ifndef NOVMORSE_COBORDISM_HPP
#define NOVMORSE_COBORDISM_HPP

// Block-structured complexes attached to elementary cobordisms: the triple
// complex of a two-sided cobordism, the splitting complex of a separating
// level, the gluing comparison, and the order-theoretic checks (setting
// identity, triangularity of continuations).

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "novmorse/chain.hpp"

namespace novmorse {

// -- the triple complex ------------------------------------------------------

// Data of a cobordism with lower boundary piece D, free middle F and upper
// boundary piece D' (all complexes over the same ring):
//   theta_i  : F_i   -> D_{i-1}
//   theta'_i : D'_i  -> F_i
//   psi_i    : D'_i  -> D_i
// None of the three is a chain map on its own; they satisfy the mixed
// identities checked in assemble_triple below.
template <class R>
struct MorseTriple {
    std::shared_ptr<const ChainComplex<R>> D, F, Dp;
    ChainMap<R> theta;  // F -> D, shift -1
    ChainMap<R> thetap; // D' -> F, shift 0
    ChainMap<R> psi;    // D' -> D, shift 0
};

namespace detail {

template <class R>
void require_same_ring(const ChainComplex<R>& a, const ChainComplex<R>& b,
                       const char* what) {
    if (a.ring != b.ring)
        throw ShapeMismatch(std::string(what) + ": components live over different rings");
}

} // namespace detail

// The combined complex on D_i + F_i + D'_{i-1} with differential
//   [[d_D, theta, -psi], [0, d_F, -theta'], [0, 0, -d_{D'}]].
// Expanding d^2 = 0 blockwise yields the three normative identities:
//   (1) d_D theta + theta d_F = 0
//   (2) d_F theta' - theta' d_{D'} = 0
//   (3) d_D psi - psi d_{D'} + theta theta' = 0
// and IdentityViolation names the one that fails.
template <class R>
ChainComplex<R> assemble_triple(const MorseTriple<R>& t) {
    if (!t.D || !t.F || !t.Dp)
        throw ShapeMismatch("assemble_triple: missing component complex");
    detail::require_same_ring(*t.D, *t.F, "assemble_triple");
    detail::require_same_ring(*t.D, *t.Dp, "assemble_triple");
    if (t.theta.src != t.F || t.theta.dst != t.D || t.theta.shift != -1)
        throw ShapeMismatch("assemble_triple: theta must map F_i -> D_{i-1}");
    if (t.thetap.src != t.Dp || t.thetap.dst != t.F || t.thetap.shift != 0)
        throw ShapeMismatch("assemble_triple: theta' must map D'_i -> F_i");
    if (t.psi.src != t.Dp || t.psi.dst != t.D || t.psi.shift != 0)
        throw ShapeMismatch("assemble_triple: psi must map D'_i -> D_i");

    const auto& ring = t.D->ring;
    auto degrees = relevant_degrees(*t.D, *t.F);
    {
        auto more = relevant_degrees(*t.D, *t.Dp);
        degrees.insert(degrees.end(), more.begin(), more.end());
        std::sort(degrees.begin(), degrees.end());
        degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
    }
    for (long long i : degrees) {
        auto i1 = mat_add(ring, mat_mul(ring, t.D->d(i - 1), t.theta.block(i)),
                          mat_mul(ring, t.theta.block(i - 1), t.F->d(i)));
        if (!mat_is_zero(ring, i1))
            throw IdentityViolation("assemble_triple: d_D theta + theta d_F != 0 "
                                    "at degree " + std::to_string(i));
        auto i2 = mat_sub(ring, mat_mul(ring, t.F->d(i), t.thetap.block(i)),
                          mat_mul(ring, t.thetap.block(i - 1), t.Dp->d(i)));
        if (!mat_is_zero(ring, i2))
            throw IdentityViolation("assemble_triple: d_F theta' - theta' d_{D'} != 0 "
                                    "at degree " + std::to_string(i));
        auto i3 = mat_add(ring,
                          mat_sub(ring, mat_mul(ring, t.D->d(i), t.psi.block(i)),
                                  mat_mul(ring, t.psi.block(i - 1), t.Dp->d(i))),
                          mat_mul(ring, t.theta.block(i), t.thetap.block(i)));
        if (!mat_is_zero(ring, i3))
            throw IdentityViolation("assemble_triple: d_D psi - psi d_{D'} + "
                                    "theta theta' != 0 at degree " + std::to_string(i));
    }

    ChainComplex<R> total(ring);
    std::set<std::string> used;
    long long lo = degrees.empty() ? 0 : degrees.front();
    long long hi = degrees.empty() ? -1 : degrees.back();
    for (long long i = lo; i <= hi; ++i) {
        for (const auto& l : t.D->basis.labels(i))
            total.basis.add(i, detail::fresh_name(used, l.name));
        for (const auto& l : t.F->basis.labels(i))
            total.basis.add(i, detail::fresh_name(used, l.name));
        for (const auto& l : t.Dp->basis.labels(i - 1))
            total.basis.add(i, detail::fresh_name(used, l.name + "'"));
    }
    for (long long i = lo; i <= hi; ++i) {
        BlockMatrix<R> b(ring,
                         {t.D->basis.dim(i - 1), t.F->basis.dim(i - 1),
                          t.Dp->basis.dim(i - 2)},
                         {t.D->basis.dim(i), t.F->basis.dim(i),
                          t.Dp->basis.dim(i - 1)});
        b.set(0, 0, t.D->d(i));
        b.set(0, 1, t.theta.block(i));
        b.set(0, 2, mat_neg(ring, t.psi.block(i - 1)));
        b.set(1, 1, t.F->d(i));
        b.set(1, 2, mat_neg(ring, t.thetap.block(i - 1)));
        b.set(2, 2, mat_neg(ring, t.Dp->d(i - 1)));
        total.set_d(i, b.done());
    }
    return total;
}

// When the cobordism has no interior critical data (F = 0), identity (3)
// says psi is a plain chain map D' -> D: the continuation comparison.
template <class R>
ChainMap<R> continuation_map(const MorseTriple<R>& t) {
    if (t.F && !t.F->basis.empty()) {
        for (long long i : t.F->basis.degrees())
            if (t.F->basis.dim(i) > 0)
                throw NotSimple("continuation_map: cobordism has interior critical "
                                "data in degree " + std::to_string(i));
    }
    (void)assemble_triple(t); // runs the identity checks
    ChainMap<R> f(t.Dp, t.D, 0, false);
    for (long long i : relevant_degrees(*t.Dp, *t.D)) f.set_block(i, t.psi.block(i));
    validate_chain_map(f);
    return f;
}

// -- attaching cones ---------------------------------------------------------

// cone over a degree -1 anticommuting family phi: C_i -> D_{i-1}, on
// D_i + C_i with differential [[d_D, phi], [0, d_C]] (the source enters with
// its own differential unnegated; anticommutation is exactly d^2 = 0)
template <class R>
ChainComplex<R> attaching_cone(const ChainMap<R>& phi) {
    if (phi.shift != -1 || !phi.anticommute)
        throw NotAChainMap("attaching_cone expects a degree -1 anticommuting family");
    validate_chain_map(phi);
    const ChainComplex<R>& C = *phi.src;
    const ChainComplex<R>& D = *phi.dst;
    const auto& ring = D.ring;
    ChainComplex<R> cone(ring);
    std::set<std::string> used;
    long long lo = std::min(D.basis.empty() ? 0 : D.basis.min_degree(),
                            C.basis.empty() ? 0 : C.basis.min_degree());
    long long hi = std::max(D.basis.empty() ? -1 : D.basis.max_degree(),
                            C.basis.empty() ? -1 : C.basis.max_degree());
    for (long long i = lo; i <= hi; ++i) {
        for (const auto& l : D.basis.labels(i))
            cone.basis.add(i, detail::fresh_name(used, l.name));
        for (const auto& l : C.basis.labels(i))
            cone.basis.add(i, detail::fresh_name(used, l.name + "'"));
    }
    for (long long i = lo; i <= hi; ++i) {
        BlockMatrix<R> b(ring, {D.basis.dim(i - 1), C.basis.dim(i - 1)},
                         {D.basis.dim(i), C.basis.dim(i)});
        b.set(0, 0, D.d(i));
        b.set(0, 1, phi.block(i));
        b.set(1, 1, C.d(i));
        cone.set_d(i, b.done());
    }
    return cone;
}

// -- splitting complexes -----------------------------------------------------

// Data of a complex split along a separating level with critical data D:
//   theta'_i  : D_i      -> F'_i   (degree 0, commuting)
//   theta''_i : F''_{i+1} -> D_i   (degree -1, anticommuting)
//   phi       : the attaching family of the unsplit complex, if known
template <class R>
struct SplittingData {
    std::shared_ptr<const ChainComplex<R>> D, Fp, Fpp;
    ChainMap<R> thetap;  // D -> F'
    ChainMap<R> thetapp; // F'' -> D, shift -1
    std::optional<ChainMap<R>> phi; // F'' -> F', shift -1
};

template <class R>
struct SplittingComplexes {
    std::shared_ptr<ChainComplex<R>> C_h;   // the split model
    std::shared_ptr<ChainComplex<R>> W;     // acyclic middle (cone of the identity)
    ChainMap<R> p_h;                        // W -> C_h
    std::shared_ptr<ChainComplex<R>> coker; // C_h / im(p_h)
    ChainMap<R> j_h;                        // C_h -> coker
};

// The split model lives on (F'_i, D_{i-1}, D_i, F''_i) with differential
//   [[d_F', theta', 0,   0     ],
//    [0,    -d_D,   0,   0     ],
//    [0,    1,      d_D, theta''],
//    [0,    0,      0,   d_F'' ]]
// and the acyclic middle W on (D_{i-1}, D_i) maps in by
// p_h(x, y) = (theta'(y), x, y, 0).  The cokernel is presented on the basis
// (F', -F''): with that sign convention its differential is exactly
// [[d_F', theta' theta''], [0, d_F'']], the attaching cone of the composite.
template <class R>
SplittingComplexes<R> splitting_complex(const SplittingData<R>& s) {
    if (!s.D || !s.Fp || !s.Fpp)
        throw ShapeMismatch("splitting_complex: missing component complex");
    detail::require_same_ring(*s.D, *s.Fp, "splitting_complex");
    detail::require_same_ring(*s.D, *s.Fpp, "splitting_complex");
    if (s.thetap.src != s.D || s.thetap.dst != s.Fp || s.thetap.shift != 0)
        throw ShapeMismatch("splitting_complex: theta' must map D_i -> F'_i");
    if (s.thetapp.src != s.Fpp || s.thetapp.dst != s.D || s.thetapp.shift != -1)
        throw ShapeMismatch("splitting_complex: theta'' must map F''_{i+1} -> D_i");
    const auto& ring = s.D->ring;

    auto degrees = relevant_degrees(*s.Fp, *s.Fpp);
    {
        auto more = relevant_degrees(*s.D, *s.D);
        degrees.insert(degrees.end(), more.begin(), more.end());
        std::sort(degrees.begin(), degrees.end());
        degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
    }
    for (long long i : degrees) {
        auto c1 = mat_sub(ring, mat_mul(ring, s.Fp->d(i), s.thetap.block(i)),
                          mat_mul(ring, s.thetap.block(i - 1), s.D->d(i)));
        if (!mat_is_zero(ring, c1))
            throw IdentityViolation("splitting_complex: d_F' theta' - theta' d_D "
                                    "!= 0 at degree " + std::to_string(i));
        auto c2 = mat_add(ring, mat_mul(ring, s.D->d(i - 1), s.thetapp.block(i)),
                          mat_mul(ring, s.thetapp.block(i - 1), s.Fpp->d(i)));
        if (!mat_is_zero(ring, c2))
            throw IdentityViolation("splitting_complex: d_D theta'' + theta'' d_F'' "
                                    "!= 0 at degree " + std::to_string(i));
    }

    long long lo = degrees.empty() ? 0 : degrees.front() - 1;
    long long hi = degrees.empty() ? -1 : degrees.back() + 1;

    auto C_h = std::make_shared<ChainComplex<R>>(ring);
    {
        std::set<std::string> used;
        for (long long i = lo; i <= hi; ++i) {
            for (const auto& l : s.Fp->basis.labels(i))
                C_h->basis.add(i, detail::fresh_name(used, l.name));
            for (const auto& l : s.D->basis.labels(i - 1))
                C_h->basis.add(i, detail::fresh_name(used, l.name + "^"));
            for (const auto& l : s.D->basis.labels(i))
                C_h->basis.add(i, detail::fresh_name(used, l.name + "_"));
            for (const auto& l : s.Fpp->basis.labels(i))
                C_h->basis.add(i, detail::fresh_name(used, l.name));
        }
        for (long long i = lo; i <= hi; ++i) {
            BlockMatrix<R> b(ring,
                             {s.Fp->basis.dim(i - 1), s.D->basis.dim(i - 2),
                              s.D->basis.dim(i - 1), s.Fpp->basis.dim(i - 1)},
                             {s.Fp->basis.dim(i), s.D->basis.dim(i - 1),
                              s.D->basis.dim(i), s.Fpp->basis.dim(i)});
            b.set(0, 0, s.Fp->d(i));
            b.set(0, 1, s.thetap.block(i - 1));
            b.set(1, 1, mat_neg(ring, s.D->d(i - 1)));
            b.set(2, 1, mat_identity(ring, s.D->basis.dim(i - 1)));
            b.set(2, 2, s.D->d(i));
            b.set(2, 3, s.thetapp.block(i));
            b.set(3, 3, s.Fpp->d(i));
            C_h->set_d(i, b.done());
        }
    }

    auto W = std::make_shared<ChainComplex<R>>(ring);
    {
        std::set<std::string> used;
        for (long long i = lo; i <= hi; ++i) {
            for (const auto& l : s.D->basis.labels(i - 1))
                W->basis.add(i, detail::fresh_name(used, l.name + "^"));
            for (const auto& l : s.D->basis.labels(i))
                W->basis.add(i, detail::fresh_name(used, l.name + "_"));
        }
        for (long long i = lo; i <= hi; ++i) {
            BlockMatrix<R> b(ring,
                             {s.D->basis.dim(i - 2), s.D->basis.dim(i - 1)},
                             {s.D->basis.dim(i - 1), s.D->basis.dim(i)});
            b.set(0, 0, mat_neg(ring, s.D->d(i - 1)));
            b.set(1, 0, mat_identity(ring, s.D->basis.dim(i - 1)));
            b.set(1, 1, s.D->d(i));
            W->set_d(i, b.done());
        }
    }

    ChainMap<R> p_h(W, C_h, 0, false);
    for (long long i = lo; i <= hi; ++i) {
        BlockMatrix<R> b(ring,
                         {s.Fp->basis.dim(i), s.D->basis.dim(i - 1),
                          s.D->basis.dim(i), s.Fpp->basis.dim(i)},
                         {s.D->basis.dim(i - 1), s.D->basis.dim(i)});
        b.set(0, 1, s.thetap.block(i));
        b.set(1, 0, mat_identity(ring, s.D->basis.dim(i - 1)));
        b.set(2, 1, mat_identity(ring, s.D->basis.dim(i)));
        p_h.set_block(i, b.done());
    }
    validate_chain_map(p_h);

    auto coker = std::make_shared<ChainComplex<R>>(ring);
    {
        std::set<std::string> used;
        for (long long i = lo; i <= hi; ++i) {
            for (const auto& l : s.Fp->basis.labels(i))
                coker->basis.add(i, detail::fresh_name(used, l.name));
            for (const auto& l : s.Fpp->basis.labels(i))
                coker->basis.add(i, detail::fresh_name(used, l.name));
        }
        for (long long i = lo; i <= hi; ++i) {
            BlockMatrix<R> b(ring,
                             {s.Fp->basis.dim(i - 1), s.Fpp->basis.dim(i - 1)},
                             {s.Fp->basis.dim(i), s.Fpp->basis.dim(i)});
            b.set(0, 0, s.Fp->d(i));
            b.set(0, 1, mat_mul(ring, s.thetap.block(i - 1), s.thetapp.block(i)));
            b.set(1, 1, s.Fpp->d(i));
            coker->set_d(i, b.done());
        }
    }

    // j_h(u, a, b, v) = (u - theta'(b), -v): kills the image of p_h and
    // restricts to the (F', -F'') identification on the complement
    ChainMap<R> j_h(C_h, coker, 0, false);
    for (long long i = lo; i <= hi; ++i) {
        BlockMatrix<R> b(ring,
                         {s.Fp->basis.dim(i), s.Fpp->basis.dim(i)},
                         {s.Fp->basis.dim(i), s.D->basis.dim(i - 1),
                          s.D->basis.dim(i), s.Fpp->basis.dim(i)});
        b.set(0, 0, mat_identity(ring, s.Fp->basis.dim(i)));
        b.set(0, 2, mat_neg(ring, s.thetap.block(i)));
        b.set(1, 3, mat_neg(ring, mat_identity(ring, s.Fpp->basis.dim(i))));
        j_h.set_block(i, b.done());
    }
    validate_chain_map(j_h);

    // j_h . p_h = 0: the short exact sequence really is one
    for (long long i = lo; i <= hi; ++i) {
        auto z = mat_mul(ring, j_h.block(i), p_h.block(i));
        if (!mat_is_zero(ring, z))
            throw IdentityViolation(
                "splitting_complex: j_h p_h != 0 at degree " + std::to_string(i));
    }

    SplittingComplexes<R> out;
    out.C_h = C_h;
    out.W = W;
    out.p_h = p_h;
    out.coker = coker;
    out.j_h = j_h;
    return out;
}

// -- gluing comparison -------------------------------------------------------

template <class R>
struct GlueDiscrepancy {
    long long degree;
    long long row, col;
    std::string entry; // phi - theta' theta'' at that position
};

template <class R>
struct GlueReport {
    bool ok = true;
    std::vector<GlueDiscrepancy<R>> discrepancies;
};

// is the attaching family of the unsplit complex the composite
// theta' . theta'' of the splitting data, entry by entry?
template <class R>
GlueReport<R> glue_check(const SplittingData<R>& s) {
    if (!s.phi)
        throw ShapeMismatch("glue_check: splitting data carries no attaching family");
    if (s.phi->src != s.Fpp || s.phi->dst != s.Fp || s.phi->shift != -1)
        throw ShapeMismatch("glue_check: attaching family must map F''_i -> F'_{i-1}");
    const auto& ring = s.D->ring;
    GlueReport<R> rep;
    for (long long i : relevant_degrees(*s.Fpp, *s.Fp)) {
        auto comp = mat_mul(ring, s.thetap.block(i - 1), s.thetapp.block(i));
        auto diff = mat_sub(ring, s.phi->block(i), comp);
        for (long long r = 0; r < diff.rows(); ++r)
            for (long long c = 0; c < diff.cols(); ++c)
                if (!ring.is_zero(diff.at(r, c))) {
                    rep.ok = false;
                    rep.discrepancies.push_back(
                        GlueDiscrepancy<R>{i, r, c, ring.str(diff.at(r, c))});
                }
    }
    return rep;
}

// -- the two-parameter setting identity --------------------------------------

struct SettingViolation {
    std::string u, v;       // the qualifying pair
    std::string sum_f1, sum_f2; // the two mediated sums
};

struct SettingReport {
    bool ok = true;
    long long qualifying_pairs = 0;
    std::vector<SettingViolation> violations;
    // structural problems are reported softly so that deliberately corrupted
    // inputs still produce a report rather than an exception
    std::vector<ComplexViolation> complex_violations;
};

// Partition of the basis into four blocks f0..f3 as in a double-collar
// square; for every qualifying pair (u in f3, v in f0, deg u = deg v + 2,
// val(u) - val(v) < eps) the two mediated sums over f1 and f2 must cancel:
//   sum_{x in f1} <du, x><dx, v> + sum_{x in f2} <du, x><dx, v> = 0.
template <class R>
SettingReport setting_check(const ChainComplex<R>& C,
                            const std::vector<std::string>& f0,
                            const std::vector<std::string>& f1,
                            const std::vector<std::string>& f2,
                            const std::vector<std::string>& f3,
                            const Rational& eps) {
    C.validate();
    std::map<std::string, int> block;
    auto insert_all = [&](const std::vector<std::string>& names, int which) {
        for (const auto& n : names) {
            if (!C.basis.find(n))
                throw BadPartition("setting_check: unknown label '" + n + "'");
            if (!block.emplace(n, which).second)
                throw BadPartition("setting_check: label '" + n +
                                   "' appears in more than one block");
        }
    };
    insert_all(f0, 0);
    insert_all(f1, 1);
    insert_all(f2, 2);
    insert_all(f3, 3);
    for (long long i : C.basis.degrees())
        for (const auto& l : C.basis.labels(i)) {
            if (!block.count(l.name))
                throw BadPartition("setting_check: label '" + l.name +
                                   "' is not covered by the partition");
            if (!l.value)
                throw BadPartition("setting_check: label '" + l.name +
                                   "' carries no value");
        }

    SettingReport rep;
    auto crep = verify_complex(C);
    rep.complex_violations = crep.violations;
    if (!crep.ok) rep.ok = false;

    const auto& ring = C.ring;
    for (long long deg = C.basis.min_degree(); deg + 2 <= C.basis.max_degree();
         ++deg) {
        const auto& lows = C.basis.labels(deg);
        const auto& mids = C.basis.labels(deg + 1);
        const auto& highs = C.basis.labels(deg + 2);
        auto d_hi = C.d(deg + 2); // rows: mids, cols: highs
        auto d_mid = C.d(deg + 1); // rows: lows, cols: mids
        for (std::size_t ui = 0; ui < highs.size(); ++ui) {
            if (block[highs[ui].name] != 3) continue;
            for (std::size_t vi = 0; vi < lows.size(); ++vi) {
                if (block[lows[vi].name] != 0) continue;
                if (*highs[ui].value - *lows[vi].value >= eps) continue;
                ++rep.qualifying_pairs;
                auto s1 = ring.zero();
                auto s2 = ring.zero();
                for (std::size_t x = 0; x < mids.size(); ++x) {
                    int bx = block[mids[x].name];
                    if (bx != 1 && bx != 2) continue;
                    auto prod = ring.mul(
                        d_hi.at(static_cast<long long>(x), static_cast<long long>(ui)),
                        d_mid.at(static_cast<long long>(vi), static_cast<long long>(x)));
                    if (bx == 1)
                        s1 = ring.add(s1, prod);
                    else
                        s2 = ring.add(s2, prod);
                }
                if (!ring.is_zero(ring.add(s1, s2))) {
                    rep.ok = false;
                    rep.violations.push_back(SettingViolation{
                        highs[ui].name, lows[vi].name, ring.str(s1), ring.str(s2)});
                }
            }
        }
    }
    return rep;
}

// -- triangularity under a value order ---------------------------------------

struct TriangularityViolation {
    long long degree;
    std::string row, col;
    std::string entry;
    std::string reason; // "below-diagonal" or "diagonal"
};

struct TriangularityReport {
    bool ok = true;
    std::vector<TriangularityViolation> violations;
};

// A degree-0 family between complexes of equal dimensions is triangular
// under the value order when, after sorting both bases by increasing value,
// every entry strictly below the diagonal vanishes and every diagonal entry
// is +-1.
template <class R>
TriangularityReport triangularity_check(const ChainMap<R>& f,
                                        const ValueFiltration& vf) {
    if (f.shift != 0)
        throw ShapeMismatch("triangularity_check expects a degree-0 family");
    vf.validate();
    const auto& ring = f.src->ring;
    TriangularityReport rep;
    auto value_of = [&](const std::string& name) {
        auto it = vf.value.find(name);
        if (it == vf.value.end())
            throw BadPartition("triangularity_check: no value for label '" + name + "'");
        return it->second;
    };
    for (long long i : relevant_degrees(*f.src, *f.dst)) {
        long long n = f.src->basis.dim(i);
        if (f.dst->basis.dim(i) != n)
            throw ShapeMismatch("triangularity_check: dimensions differ at degree " +
                                std::to_string(i));
        if (n == 0) continue;
        auto m = f.block(i);
        std::vector<long long> rows(static_cast<std::size_t>(n)),
            cols(static_cast<std::size_t>(n));
        for (long long t = 0; t < n; ++t)
            rows[static_cast<std::size_t>(t)] = cols[static_cast<std::size_t>(t)] = t;
        auto by_value = [&](const GradedBasis& b) {
            return [&, i](long long x, long long y) {
                return value_of(b.labels(i)[static_cast<std::size_t>(x)].name) <
                       value_of(b.labels(i)[static_cast<std::size_t>(y)].name);
            };
        };
        std::sort(rows.begin(), rows.end(), by_value(f.dst->basis));
        std::sort(cols.begin(), cols.end(), by_value(f.src->basis));
        for (long long r = 0; r < n; ++r)
            for (long long c = 0; c < n; ++c) {
                const auto& e = m.at(rows[static_cast<std::size_t>(r)],
                                     cols[static_cast<std::size_t>(c)]);
                const auto& rname =
                    f.dst->basis.labels(i)[static_cast<std::size_t>(
                        rows[static_cast<std::size_t>(r)])].name;
                const auto& cname =
                    f.src->basis.labels(i)[static_cast<std::size_t>(
                        cols[static_cast<std::size_t>(c)])].name;
                if (r > c && !ring.is_zero(e)) {
                    rep.ok = false;
                    rep.violations.push_back(TriangularityViolation{
                        i, rname, cname, ring.str(e), "below-diagonal"});
                } else if (r == c && !ring.eq(e, ring.one()) &&
                           !ring.eq(e, ring.neg(ring.one()))) {
                    rep.ok = false;
                    rep.violations.push_back(TriangularityViolation{
                        i, rname, cname, ring.str(e), "diagonal"});
                }
            }
    }
    return rep;
}

} // namespace novmorse

#endif
