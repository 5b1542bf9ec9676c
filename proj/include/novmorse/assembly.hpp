#ifndef NOVMORSE_ASSEMBLY_HPP
#define NOVMORSE_ASSEMBLY_HPP

// Circle-valued assembly: algebraic cobordism packages extracted from a
// fundamental domain, the E-complex over the truncated Novikov ring, the
// summed differential on the fundamental-domain critical basis, finite
// truncation stages, and filtered matrix inversion.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "novmorse/chain.hpp"

namespace novmorse {

// -- algebraic cobordisms ----------------------------------------------------

// Fundamental-domain package: complexes D (the separating level) and F (the
// domain interior) with exact, z-free differentials, plus three connecting
// families.  theta stays inside one copy of the domain; thetap and psi cross
// into the next copy, so the assembled complex multiplies them by z.
struct AlgebraicCobordism {
    NovRing ring;
    std::shared_ptr<const ChainComplex<NovRing>> F, D;
    ChainMap<NovRing> theta;  // F_i -> D_{i-1}
    ChainMap<NovRing> thetap; // D_i -> F_i   (z-weight 1 when assembled)
    ChainMap<NovRing> psi;    // D_i -> D_i   (z-weight 1 when assembled)
};

struct GammaViolation {
    long long degree;             // the composite d_{degree-1} . d_degree
    int block_row, block_col;     // 0: shifted D copy, 1: D, 2: F
    long long row, col;           // position inside the block
    std::string entry;
};

struct GammaReport {
    bool ok = true;
    std::vector<GammaViolation> violations;
};

namespace detail {

inline void require_zfree(const Matrix<NovElem>& m, const char* what) {
    for (long long r = 0; r < m.rows(); ++r)
        for (long long c = 0; c < m.cols(); ++c) {
            const auto& e = m.at(r, c);
            if (e.precision() != NovElem::EXACT)
                throw InvalidGamma(std::string(what) +
                                   ": stored families must be exact, found a "
                                   "truncated entry");
            for (const auto& [k, coef] : e.terms()) {
                (void)coef;
                if (k.first != 0)
                    throw InvalidGamma(std::string(what) +
                                       ": stored families must be z-free, found "
                                       "a term of z-degree " +
                                       std::to_string(k.first));
            }
        }
}

inline void check_gamma_shapes(const AlgebraicCobordism& g) {
    if (!g.F || !g.D) throw ShapeMismatch("AlgebraicCobordism: missing F or D");
    if (g.F->ring != g.ring || g.D->ring != g.ring)
        throw ShapeMismatch("AlgebraicCobordism: component rings disagree");
    if (g.theta.src != g.F || g.theta.dst != g.D || g.theta.shift != -1)
        throw ShapeMismatch("AlgebraicCobordism: theta must map F_i -> D_{i-1}");
    if (g.thetap.src != g.D || g.thetap.dst != g.F || g.thetap.shift != 0)
        throw ShapeMismatch("AlgebraicCobordism: theta' must map D_i -> F_i");
    if (g.psi.src != g.D || g.psi.dst != g.D || g.psi.shift != 0)
        throw ShapeMismatch("AlgebraicCobordism: psi must map D_i -> D_i");
    for (long long i : relevant_degrees(*g.D, *g.F)) {
        require_zfree(g.D->d(i), "AlgebraicCobordism (d_D)");
        require_zfree(g.F->d(i), "AlgebraicCobordism (d_F)");
        require_zfree(g.theta.block(i), "AlgebraicCobordism (theta)");
        require_zfree(g.thetap.block(i), "AlgebraicCobordism (theta')");
        require_zfree(g.psi.block(i), "AlgebraicCobordism (psi)");
    }
}

// the degree-i differential of the E-complex, entries truncated at z^n:
//   [[-d_D, 0,   0  ],
//    [1-z psi, d_D, theta],
//    [-z theta', 0, d_F]]      on E_i = D_{i-1} + D_i + F_i
inline Matrix<NovElem> e_complex_diff(const AlgebraicCobordism& g, long long i,
                                      long long n) {
    const NovRing& ring = g.ring;
    auto z = NovElem::monomial(ring.ctx, 1, ExpoVec(ring.ctx->rank(), 0), 1);
    auto zscale = [&](Matrix<NovElem> m) {
        for (long long r = 0; r < m.rows(); ++r)
            for (long long c = 0; c < m.cols(); ++c)
                m.at(r, c) = ring.mul(z, m.at(r, c));
        return m;
    };
    long long dprev = g.D->basis.dim(i - 1), dcur = g.D->basis.dim(i);
    long long dprev2 = g.D->basis.dim(i - 2), fprev = g.F->basis.dim(i - 1);
    long long fcur = g.F->basis.dim(i);
    BlockMatrix<NovRing> b(ring, {dprev2, dprev, fprev}, {dprev, dcur, fcur});
    b.set(0, 0, mat_neg(ring, g.D->d(i - 1)));
    b.set(1, 0, mat_sub(ring, mat_identity(ring, dprev),
                        zscale(g.psi.block(i - 1))));
    b.set(1, 1, g.D->d(i));
    b.set(1, 2, g.theta.block(i));
    b.set(2, 0, mat_neg(ring, zscale(g.thetap.block(i - 1))));
    b.set(2, 2, g.F->d(i));
    auto m = b.done();
    for (long long r = 0; r < m.rows(); ++r)
        for (long long c = 0; c < m.cols(); ++c)
            m.at(r, c) = m.at(r, c).truncated(n);
    return m;
}

} // namespace detail

// Normative validity check: the E-complex squares to zero mod z^n.  Nonzero
// entries of d_E^2 are reported with their block position.
inline GammaReport validate_gamma(const AlgebraicCobordism& g, long long n) {
    if (n < 1) throw PrecisionExhausted("validate_gamma: precision must be >= 1");
    detail::check_gamma_shapes(g);
    GammaReport rep;
    const NovRing& ring = g.ring;
    auto degrees = relevant_degrees(*g.D, *g.F);
    for (long long i : degrees) {
        auto prod = mat_mul(ring, detail::e_complex_diff(g, i - 1, n),
                            detail::e_complex_diff(g, i, n));
        if (mat_is_zero(ring, prod)) continue;
        // localize inside the 3x3 block structure
        long long row_cuts[2] = {g.D->basis.dim(i - 3),
                                 g.D->basis.dim(i - 3) + g.D->basis.dim(i - 2)};
        long long col_cuts[2] = {g.D->basis.dim(i - 1),
                                 g.D->basis.dim(i - 1) + g.D->basis.dim(i)};
        for (long long r = 0; r < prod.rows(); ++r)
            for (long long c = 0; c < prod.cols(); ++c) {
                if (ring.is_zero(prod.at(r, c))) continue;
                rep.ok = false;
                int br = r < row_cuts[0] ? 0 : (r < row_cuts[1] ? 1 : 2);
                int bc = c < col_cuts[0] ? 0 : (c < col_cuts[1] ? 1 : 2);
                long long lr = r - (br == 0 ? 0 : row_cuts[br - 1]);
                long long lc = c - (bc == 0 ? 0 : col_cuts[bc - 1]);
                rep.violations.push_back(GammaViolation{
                    i, br, bc, lr, lc, ring.str(prod.at(r, c))});
            }
    }
    return rep;
}

namespace detail {

inline void require_valid_gamma(const AlgebraicCobordism& g, long long n,
                                const char* what) {
    auto rep = validate_gamma(g, n);
    if (rep.ok) return;
    const auto& v = rep.violations.front();
    throw InvalidGamma(std::string(what) + ": d_E^2 != 0 mod z^" +
                       std::to_string(n) + " at degree " +
                       std::to_string(v.degree) + ", block (" +
                       std::to_string(v.block_row) + "," +
                       std::to_string(v.block_col) + "), entry (" +
                       std::to_string(v.row) + "," + std::to_string(v.col) +
                       ") = " + v.entry);
}

} // namespace detail

// The E-complex itself, over the truncated ring at precision n.
inline ChainComplex<NovRing> build_E(const AlgebraicCobordism& g, long long n) {
    if (n < 1) throw PrecisionExhausted("build_E: precision must be >= 1");
    detail::require_valid_gamma(g, n, "build_E");
    ChainComplex<NovRing> E(g.ring);
    auto degrees = relevant_degrees(*g.D, *g.F);
    std::set<std::string> used;
    for (long long i : degrees) {
        for (const auto& l : g.D->basis.labels(i - 1))
            E.basis.add(i, detail::fresh_name(used, l.name + "^"));
        for (const auto& l : g.D->basis.labels(i))
            E.basis.add(i, detail::fresh_name(used, l.name + "_"));
        for (const auto& l : g.F->basis.labels(i))
            E.basis.add(i, detail::fresh_name(used, l.name));
    }
    for (long long i : degrees)
        if (E.basis.dim(i) > 0 || E.basis.dim(i - 1) > 0)
            E.set_d(i, detail::e_complex_diff(g, i, n));
    return E;
}

// The assembled differential on the fundamental-domain critical basis:
//   d = d_F + sum_{j >= 0} (z theta') (z psi)^j theta,
// truncated at z^n (the term for j contributes at z-order j+1).
inline ChainComplex<NovRing> assemble_fhat(const AlgebraicCobordism& g,
                                           long long n) {
    if (n < 1)
        throw PrecisionExhausted("assemble_fhat: precision must be >= 1");
    detail::require_valid_gamma(g, n, "assemble_fhat");
    const NovRing& ring = g.ring;
    auto z = NovElem::monomial(ring.ctx, 1, ExpoVec(ring.ctx->rank(), 0), 1);
    auto zscale = [&](Matrix<NovElem> m) {
        for (long long r = 0; r < m.rows(); ++r)
            for (long long c = 0; c < m.cols(); ++c)
                m.at(r, c) = ring.mul(z, m.at(r, c));
        return m;
    };

    ChainComplex<NovRing> out(ring);
    for (long long i = g.F->basis.empty() ? 0 : g.F->basis.min_degree();
         i <= (g.F->basis.empty() ? -1 : g.F->basis.max_degree()); ++i)
        for (const auto& l : g.F->basis.labels(i))
            out.basis.add(i, l.name, l.value);

    for (long long i : relevant_degrees(*g.F, *g.F)) {
        if (out.basis.dim(i) == 0 && out.basis.dim(i - 1) == 0) continue;
        auto acc = g.F->d(i);
        auto ztp = zscale(g.thetap.block(i - 1));
        auto zpsi = zscale(g.psi.block(i - 1));
        auto tail = g.theta.block(i); // (z psi)^j theta, j = 0 to start
        for (long long j = 0; j + 1 < n; ++j) {
            acc = mat_add(ring, acc, mat_mul(ring, ztp, tail));
            tail = mat_mul(ring, zpsi, tail);
        }
        for (long long r = 0; r < acc.rows(); ++r)
            for (long long c = 0; c < acc.cols(); ++c)
                acc.at(r, c) = acc.at(r, c).truncated(n);
        out.set_d(i, acc);
    }
    return out;
}

// -- finite stages -----------------------------------------------------------

struct FiniteStage {
    std::shared_ptr<ChainComplex<NovRing>> complex;
    ChainMap<NovRing> projection; // from the input complex
};

// Reduce all coefficients mod z^{l+1}; stage 0 is the augmentation z -> 0.
inline FiniteStage finite_stage(std::shared_ptr<const ChainComplex<NovRing>> C,
                                long long ell) {
    if (!C) throw ShapeMismatch("finite_stage: missing complex");
    if (ell < 0) throw PrecisionExhausted("finite_stage: stage must be >= 0");
    const NovRing& ring = C->ring;
    for (long long i : relevant_degrees(*C, *C)) {
        auto m = C->d(i);
        for (long long r = 0; r < m.rows(); ++r)
            for (long long c = 0; c < m.cols(); ++c)
                for (const auto& [k, coef] : m.at(r, c).terms()) {
                    (void)coef;
                    if (k.first < 0)
                        throw NegativeDegreePresent(
                            "finite_stage: differential entry at degree " +
                            std::to_string(i) + " carries z-degree " +
                            std::to_string(k.first));
                }
    }
    auto staged = std::make_shared<ChainComplex<NovRing>>(ring);
    for (long long i = C->basis.empty() ? 0 : C->basis.min_degree();
         i <= (C->basis.empty() ? -1 : C->basis.max_degree()); ++i)
        for (const auto& l : C->basis.labels(i)) staged->basis.add(i, l.name, l.value);
    for (long long i : relevant_degrees(*C, *C)) {
        if (staged->basis.dim(i) == 0 && staged->basis.dim(i - 1) == 0) continue;
        auto m = C->d(i);
        for (long long r = 0; r < m.rows(); ++r)
            for (long long c = 0; c < m.cols(); ++c)
                m.at(r, c) = m.at(r, c).truncated(ell + 1);
        staged->set_d(i, m);
    }
    FiniteStage out;
    out.complex = staged;
    out.projection = ChainMap<NovRing>(C, staged, 0, false);
    for (long long i : relevant_degrees(*C, *C))
        out.projection.set_block(i, mat_identity(ring, C->basis.dim(i)));
    validate_chain_map(out.projection);
    return out;
}

// -- filtered endomorphisms and their inversion ------------------------------

// Square matrix over the truncated ring whose augmentation (z -> 0) is upper
// triangular with +-monomial diagonal in the given label order, i.e. the
// matrix is filtered for the z-adic filtration refined by the label order.
struct FilteredEndomorphism {
    NovRing ring;
    std::vector<std::string> labels;
    Matrix<NovElem> mat;
    long long precision = NovElem::EXACT;
};

// Two-step exact inversion: invert the augmentation by back-substitution
// over the group ring, then remove the z-positive remainder with a truncated
// alternating series:  T^{-1} = E^{-1} (I + sum_{j=1}^{n-1} (-Psi)^j)  where
// E = augmentation(T) and Psi = T E^{-1} - I has strictly positive z-order.
inline FilteredEndomorphism invert_filtered(const FilteredEndomorphism& T,
                                            long long n) {
    if (n < 1)
        throw PrecisionExhausted("invert_filtered: precision must be >= 1");
    const NovRing& ring = T.ring;
    long long m = static_cast<long long>(T.labels.size());
    if (T.mat.rows() != m || T.mat.cols() != m)
        throw ShapeMismatch("invert_filtered: matrix is " +
                            std::to_string(T.mat.rows()) + "x" +
                            std::to_string(T.mat.cols()) + " but " +
                            std::to_string(m) + " labels are given");
    for (long long r = 0; r < m; ++r)
        for (long long c = 0; c < m; ++c) {
            const auto& e = T.mat.at(r, c);
            if (e.precision() < n)
                throw PrecisionExhausted(
                    "invert_filtered: entry (" + std::to_string(r) + "," +
                    std::to_string(c) + ") is only certified to precision " +
                    std::to_string(e.precision()) + " < " + std::to_string(n));
            for (const auto& [k, coef] : e.terms()) {
                (void)coef;
                if (k.first < 0)
                    throw NegativeDegreePresent(
                        "invert_filtered: entry (" + std::to_string(r) + "," +
                        std::to_string(c) + ") carries a negative z-degree");
            }
        }

    // step 1: augmentation and its exact triangular inverse
    auto eps = mat_zero(ring, m, m);
    for (long long r = 0; r < m; ++r)
        for (long long c = 0; c < m; ++c) eps.at(r, c) = augment(T.mat.at(r, c));
    for (long long r = 0; r < m; ++r) {
        for (long long c = 0; c < r; ++c)
            if (!ring.is_zero(eps.at(r, c)))
                throw NotFilteredShape(
                    "invert_filtered: diagonal augmentation not "
                    "+-monomial-unitriangular (nonzero below the diagonal at (" +
                    std::to_string(r) + "," + std::to_string(c) + "))");
        if (!is_unit(eps.at(r, r)))
            throw NotFilteredShape(
                "invert_filtered: diagonal augmentation not "
                "+-monomial-unitriangular (entry (" + std::to_string(r) + "," +
                std::to_string(r) + ") = " + ring.str(eps.at(r, r)) +
                " is not a +-monomial)");
    }
    auto inv = mat_zero(ring, m, m);
    std::vector<NovElem> dinv;
    dinv.reserve(static_cast<std::size_t>(m));
    for (long long r = 0; r < m; ++r) dinv.push_back(invert_unit(eps.at(r, r)));
    for (long long j = 0; j < m; ++j) {
        inv.at(j, j) = dinv[static_cast<std::size_t>(j)];
        for (long long i = j - 1; i >= 0; --i) {
            auto s = ring.zero();
            for (long long k = i + 1; k <= j; ++k)
                s = ring.add(s, ring.mul(eps.at(i, k), inv.at(k, j)));
            inv.at(i, j) =
                ring.neg(ring.mul(dinv[static_cast<std::size_t>(i)], s));
        }
    }

    // step 2: truncated alternating series against Psi = T E^{-1} - I
    auto trunc = [&](Matrix<NovElem> a) {
        for (long long r = 0; r < a.rows(); ++r)
            for (long long c = 0; c < a.cols(); ++c)
                a.at(r, c) = a.at(r, c).truncated(n);
        return a;
    };
    auto I = mat_identity(ring, m);
    auto psi = trunc(mat_sub(ring, mat_mul(ring, T.mat, inv), I));
    for (long long r = 0; r < m; ++r)
        for (long long c = 0; c < m; ++c)
            if (!psi.at(r, c).is_zero() &&
                psi.at(r, c).order_lower_bound() < 1)
                throw NotFilteredShape(
                    "invert_filtered: remainder after removing the "
                    "augmentation is not in z R' at (" + std::to_string(r) +
                    "," + std::to_string(c) + ")");
    auto series = I;
    auto power = psi;
    for (long long j = 1; j < n; ++j) {
        series = (j % 2 == 1) ? mat_sub(ring, series, power)
                              : mat_add(ring, series, power);
        power = trunc(mat_mul(ring, power, psi));
    }

    FilteredEndomorphism out;
    out.ring = ring;
    out.labels = T.labels;
    out.mat = trunc(mat_mul(ring, inv, series));
    out.precision = n;
    return out;
}

// -- congruence and retraction checks ----------------------------------------

struct DiffDiscrepancy {
    long long degree;
    long long row, col;
    std::string lhs, rhs;
};

struct CongruenceReport {
    bool ok = true;
    std::optional<DiffDiscrepancy> first;
};

// do two complexes on the same named basis have differentials that agree
// mod z^n (with both sides certified to at least that precision)?
inline CongruenceReport diff_congruence(const ChainComplex<NovRing>& a,
                                        const ChainComplex<NovRing>& b,
                                        long long n) {
    long long lo = std::min(a.basis.empty() ? 0 : a.basis.min_degree(),
                            b.basis.empty() ? 0 : b.basis.min_degree());
    long long hi = std::max(a.basis.empty() ? -1 : a.basis.max_degree(),
                            b.basis.empty() ? -1 : b.basis.max_degree());
    for (long long i = lo; i <= hi; ++i) {
        if (a.basis.dim(i) != b.basis.dim(i))
            throw BasisMismatch("diff_congruence: dimensions differ at degree " +
                                std::to_string(i));
        const auto& la = a.basis.labels(i);
        const auto& lb = b.basis.labels(i);
        for (std::size_t t = 0; t < la.size(); ++t)
            if (la[t].name != lb[t].name)
                throw BasisMismatch("diff_congruence: label '" + la[t].name +
                                    "' vs '" + lb[t].name + "' at degree " +
                                    std::to_string(i));
    }
    CongruenceReport rep;
    for (long long i = lo; i <= hi + 1; ++i) {
        auto da = a.d(i);
        auto db = b.d(i);
        for (long long r = 0; r < da.rows(); ++r)
            for (long long c = 0; c < da.cols(); ++c)
                if (!da.at(r, c).congruent_mod(db.at(r, c), n)) {
                    rep.ok = false;
                    rep.first = DiffDiscrepancy{i, r, c, to_string(da.at(r, c)),
                                                to_string(db.at(r, c))};
                    return rep;
                }
    }
    return rep;
}

// j . i = identity, exactly (or to the precision the entries certify)
template <class R>
bool retraction_check(const ChainMap<R>& i, const ChainMap<R>& j) {
    if (i.shift != 0 || j.shift != 0)
        throw ShapeMismatch("retraction_check: both maps must have degree 0");
    auto ji = compose(j, i);
    if (!(ji.src->basis == ji.dst->basis))
        throw ShapeMismatch("retraction_check: j . i is not an endomorphism");
    const auto& ring = ji.src->ring;
    for (long long deg : relevant_degrees(*ji.src, *ji.dst)) {
        auto blk = ji.block(deg);
        for (long long r = 0; r < blk.rows(); ++r)
            for (long long c = 0; c < blk.cols(); ++c) {
                auto expect = r == c ? ring.one() : ring.zero();
                if (!ring.is_zero(ring.sub(blk.at(r, c), expect))) return false;
            }
    }
    return true;
}

} // namespace novmorse

#endif
