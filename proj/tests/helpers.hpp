#ifndef NOVMORSE_TEST_HELPERS_HPP
#define NOVMORSE_TEST_HELPERS_HPP

// Shared generators for randomized tests: square-zero differentials are
// produced in a split basis (where d^2 = 0 holds for free) and then
// conjugated by random unimodular changes of basis, so the resulting
// complexes are "generic looking" while staying exactly verifiable.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "novmorse/assembly.hpp"
#include "novmorse/chain.hpp"
#include "novmorse/cobordism.hpp"

namespace novmorse::testing {

struct ComplexSpec {
    long long min_degree = 0;
    long long max_degree = 3;
    long long max_dim = 4;
};

// random unimodular integer matrix as a product of elementary operations
inline Matrix<long long> random_unimodular(const I64Ring& ring, long long n,
                                           std::mt19937_64& rng) {
    auto m = mat_identity(ring, n);
    if (n == 0) return m;
    std::uniform_int_distribution<long long> idx(0, n - 1);
    std::uniform_int_distribution<long long> coef(-2, 2);
    std::uniform_int_distribution<int> ops(4, 10);
    int k = ops(rng);
    for (int t = 0; t < k; ++t) {
        long long i = idx(rng), j = idx(rng);
        if (i == j) continue;
        long long c = coef(rng);
        for (long long r = 0; r < n; ++r)
            m.at(r, j) = checked_add(m.at(r, j), checked_mul(c, m.at(r, i)));
    }
    return m;
}

// returns (S, S^{-1})
inline std::pair<Matrix<long long>, Matrix<long long>>
random_unimodular_pair(const I64Ring& ring, long long n, std::mt19937_64& rng) {
    // build S as a product of recorded elementary column operations and apply
    // them in reverse to the identity for the inverse
    auto s = mat_identity(ring, n);
    auto si = mat_identity(ring, n);
    if (n == 0) return {s, si};
    std::uniform_int_distribution<long long> idx(0, n - 1);
    std::uniform_int_distribution<long long> coef(-2, 2);
    std::uniform_int_distribution<int> ops(4, 10);
    int k = ops(rng);
    std::vector<std::tuple<long long, long long, long long>> steps;
    for (int t = 0; t < k; ++t) {
        long long i = idx(rng), j = idx(rng);
        if (i == j) continue;
        long long c = coef(rng);
        steps.emplace_back(i, j, c);
        for (long long r = 0; r < n; ++r)
            s.at(r, j) = checked_add(s.at(r, j), checked_mul(c, s.at(r, i)));
    }
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        auto [i, j, c] = *it;
        for (long long r = 0; r < n; ++r)
            si.at(r, j) = checked_sub(si.at(r, j), checked_mul(c, si.at(r, i)));
    }
    // si is the inverse as a column-operation product applied in reverse:
    // verify by multiplication (cheap insurance against sign slips)
    auto prod = mat_mul(ring, s, si);
    if (!mat_eq(ring, prod, mat_identity(ring, n)))
        throw std::logic_error("random_unimodular_pair: inverse construction broke");
    return {s, si};
}

// random chain complex over Z with exactly vanishing d^2
inline std::shared_ptr<ChainComplex<I64Ring>>
random_int_complex(std::mt19937_64& rng, const ComplexSpec& spec = {}) {
    I64Ring ring;
    auto C = std::make_shared<ChainComplex<I64Ring>>(ring);
    std::uniform_int_distribution<long long> dim(1, spec.max_dim);
    std::uniform_int_distribution<long long> split(0, 1);
    std::uniform_int_distribution<long long> coef(-2, 2);

    std::map<long long, long long> dims, cut; // cut = size of the "a" part
    for (long long i = spec.min_degree; i <= spec.max_degree; ++i) {
        dims[i] = dim(rng);
        cut[i] = std::uniform_int_distribution<long long>(0, dims[i])(rng);
        for (long long j = 0; j < dims[i]; ++j)
            C->basis.add(i, "c" + std::to_string(i) + "_" + std::to_string(j));
    }
    // in the split basis d maps the b-part of degree i into the a-part of
    // degree i-1; any such matrix squares to zero
    std::map<long long, Matrix<long long>> d;
    for (long long i = spec.min_degree + 1; i <= spec.max_degree; ++i) {
        auto m = mat_zero(ring, dims[i - 1], dims[i]);
        for (long long r = 0; r < cut[i - 1]; ++r)
            for (long long c = cut[i]; c < dims[i]; ++c)
                m.at(r, c) = coef(rng);
        d[i] = m;
    }
    // conjugate by random unimodular bases
    std::map<long long, std::pair<Matrix<long long>, Matrix<long long>>> bases;
    for (long long i = spec.min_degree; i <= spec.max_degree; ++i)
        bases[i] = random_unimodular_pair(ring, dims[i], rng);
    for (long long i = spec.min_degree + 1; i <= spec.max_degree; ++i)
        C->set_d(i, mat_mul(ring, bases[i - 1].second,
                            mat_mul(ring, d[i], bases[i].first)));
    return C;
}

// random degree-0 chain map C -> C of the form d u + u d (always commutes)
inline ChainMap<I64Ring>
random_nullhomotopic_endo(std::shared_ptr<const ChainComplex<I64Ring>> C,
                          std::mt19937_64& rng,
                          std::map<long long, Matrix<long long>>* u_out = nullptr) {
    const I64Ring& ring = C->ring;
    std::uniform_int_distribution<long long> coef(-2, 2);
    std::map<long long, Matrix<long long>> u; // u_i : C_i -> C_{i+1}
    for (long long i : C->basis.degrees()) {
        auto m = mat_zero(ring, C->basis.dim(i + 1), C->basis.dim(i));
        for (long long r = 0; r < m.rows(); ++r)
            for (long long c = 0; c < m.cols(); ++c) m.at(r, c) = coef(rng);
        u[i] = m;
    }
    auto ublock = [&](long long i) {
        auto it = u.find(i);
        if (it != u.end()) return it->second;
        return mat_zero(ring, C->basis.dim(i + 1), C->basis.dim(i));
    };
    ChainMap<I64Ring> f(C, C, 0, false);
    for (long long i : C->basis.degrees())
        f.set_block(i, mat_add(ring, mat_mul(ring, C->d(i + 1), ublock(i)),
                               mat_mul(ring, ublock(i - 1), C->d(i))));
    if (u_out) *u_out = u;
    return f;
}

inline Matrix<long long> random_int_matrix(const I64Ring& ring, long long rows,
                                           long long cols, std::mt19937_64& rng,
                                           long long lo = -1, long long hi = 1) {
    auto m = mat_zero(ring, rows, cols);
    std::uniform_int_distribution<long long> coef(lo, hi);
    for (long long r = 0; r < rows; ++r)
        for (long long c = 0; c < cols; ++c) m.at(r, c) = coef(rng);
    return m;
}

// Random cobordism triple with the mixed identities holding exactly: take
// the direct sum D + F + D'[1] with differential diag(d_D, d_F, -d_{D'}),
// conjugate it by a strictly upper unitriangular change of basis, and read
// the maps theta, theta', psi off the off-diagonal blocks of the result.
inline MorseTriple<I64Ring> random_triple(std::mt19937_64& rng,
                                          const ComplexSpec& spec = {}) {
    I64Ring ring;
    MorseTriple<I64Ring> t;
    t.D = random_int_complex(rng, spec);
    t.F = random_int_complex(rng, spec);
    t.Dp = random_int_complex(rng, spec);
    t.theta = ChainMap<I64Ring>(t.F, t.D, -1);
    t.thetap = ChainMap<I64Ring>(t.Dp, t.F, 0);
    t.psi = ChainMap<I64Ring>(t.Dp, t.D, 0);

    long long lo = spec.min_degree, hi = spec.max_degree + 1;
    auto dimD = [&](long long i) { return t.D->basis.dim(i); };
    auto dimF = [&](long long i) { return t.F->basis.dim(i); };
    auto dimP = [&](long long i) { return t.Dp->basis.dim(i - 1); };
    auto total = [&](long long i) { return dimD(i) + dimF(i) + dimP(i); };

    auto put = [](Matrix<long long>& big, long long r0, long long c0,
                  const Matrix<long long>& blk) {
        for (long long r = 0; r < blk.rows(); ++r)
            for (long long c = 0; c < blk.cols(); ++c)
                big.at(r0 + r, c0 + c) = blk.at(r, c);
    };
    auto take = [&](const Matrix<long long>& big, long long r0, long long nr,
                    long long c0, long long nc) {
        auto m = mat_zero(ring, nr, nc);
        for (long long r = 0; r < nr; ++r)
            for (long long c = 0; c < nc; ++c) m.at(r, c) = big.at(r0 + r, c0 + c);
        return m;
    };

    // S_i = I + N_i with N_i strictly upper in the (D, F, D') block order
    std::map<long long, Matrix<long long>> S, Sinv;
    for (long long i = lo - 1; i <= hi + 1; ++i) {
        auto N = mat_zero(ring, total(i), total(i));
        put(N, 0, dimD(i), random_int_matrix(ring, dimD(i), dimF(i), rng));
        put(N, 0, dimD(i) + dimF(i), random_int_matrix(ring, dimD(i), dimP(i), rng));
        put(N, dimD(i), dimD(i) + dimF(i),
            random_int_matrix(ring, dimF(i), dimP(i), rng));
        auto I = mat_identity(ring, total(i));
        S[i] = mat_add(ring, I, N);
        Sinv[i] = mat_add(ring, mat_sub(ring, I, N), mat_mul(ring, N, N));
    }

    for (long long i = lo; i <= hi + 1; ++i) {
        auto d_old = mat_zero(ring, total(i - 1), total(i));
        put(d_old, 0, 0, t.D->d(i));
        put(d_old, dimD(i - 1), dimD(i), t.F->d(i));
        put(d_old, dimD(i - 1) + dimF(i - 1), dimD(i) + dimF(i),
            mat_neg(ring, t.Dp->d(i - 1)));
        auto d_new = mat_mul(ring, S[i - 1], mat_mul(ring, d_old, Sinv[i]));
        t.theta.set_block(i, take(d_new, 0, dimD(i - 1), dimD(i), dimF(i)));
        t.psi.set_block(i - 1, mat_neg(ring, take(d_new, 0, dimD(i - 1),
                                                  dimD(i) + dimF(i), dimP(i))));
        t.thetap.set_block(
            i - 1, mat_neg(ring, take(d_new, dimD(i - 1), dimF(i - 1),
                                      dimD(i) + dimF(i), dimP(i))));
    }
    return t;
}

// Random splitting data: theta'' is a generic anticommuting family
// B d_{F''} - d_D B, and theta' embeds D as a direct summand of F' in a
// scrambled basis (so it commutes by construction).  The attaching family
// of the unsplit complex is stored as the composite.
inline SplittingData<I64Ring> random_splitting(std::mt19937_64& rng,
                                               const ComplexSpec& spec = {}) {
    I64Ring ring;
    SplittingData<I64Ring> s;
    s.D = random_int_complex(rng, spec);
    s.Fpp = random_int_complex(rng, spec);
    auto extra = random_int_complex(rng, spec);

    std::map<long long, Matrix<long long>> B;
    for (long long i = spec.min_degree - 1; i <= spec.max_degree + 1; ++i)
        B[i] = random_int_matrix(ring, s.D->basis.dim(i), s.Fpp->basis.dim(i), rng);
    s.thetapp = ChainMap<I64Ring>(s.Fpp, s.D, -1, true);
    for (long long i = spec.min_degree; i <= spec.max_degree + 1; ++i)
        s.thetapp.set_block(
            i, mat_sub(ring, mat_mul(ring, B[i - 1], s.Fpp->d(i)),
                       mat_mul(ring, s.D->d(i), B[i])));

    auto Fp = std::make_shared<ChainComplex<I64Ring>>(ring);
    std::map<long long, std::pair<Matrix<long long>, Matrix<long long>>> T;
    for (long long i = spec.min_degree; i <= spec.max_degree; ++i) {
        long long n = s.D->basis.dim(i) + extra->basis.dim(i);
        for (long long j = 0; j < n; ++j)
            Fp->basis.add(i, "fp" + std::to_string(i) + "_" + std::to_string(j));
        T[i] = random_unimodular_pair(ring, n, rng);
    }
    for (long long i = spec.min_degree + 1; i <= spec.max_degree; ++i) {
        long long rD = s.D->basis.dim(i - 1), rA = extra->basis.dim(i - 1);
        auto d_raw = mat_zero(ring, rD + rA, s.D->basis.dim(i) + extra->basis.dim(i));
        for (long long r = 0; r < rD; ++r)
            for (long long c = 0; c < s.D->basis.dim(i); ++c)
                d_raw.at(r, c) = s.D->d(i).at(r, c);
        for (long long r = 0; r < rA; ++r)
            for (long long c = 0; c < extra->basis.dim(i); ++c)
                d_raw.at(rD + r, s.D->basis.dim(i) + c) = extra->d(i).at(r, c);
        Fp->set_d(i, mat_mul(ring, T[i - 1].first,
                             mat_mul(ring, d_raw, T[i].second)));
    }
    s.Fp = Fp;
    s.thetap = ChainMap<I64Ring>(s.D, s.Fp, 0);
    for (long long i = spec.min_degree; i <= spec.max_degree; ++i) {
        long long n = s.Fp->basis.dim(i);
        auto blk = mat_zero(ring, n, s.D->basis.dim(i));
        for (long long r = 0; r < n; ++r)
            for (long long c = 0; c < s.D->basis.dim(i); ++c)
                blk.at(r, c) = T[i].first.at(r, c);
        s.thetap.set_block(i, blk);
    }
    s.phi = compose(s.thetap, s.thetapp);
    return s;
}

// -- Novikov-coefficient generators ------------------------------------------

inline NovElem random_group_monomial(const NovRing& ring, std::mt19937_64& rng) {
    std::uniform_int_distribution<long long> coef(-2, 2), ex(-1, 1);
    long long c = coef(rng);
    if (c == 0) return ring.zero();
    ExpoVec v(static_cast<std::size_t>(ring.ctx->rank()));
    for (auto& x : v) x = ex(rng);
    return NovElem::monomial(ring.ctx, c, v, 0);
}

inline Matrix<NovElem> random_group_matrix(const NovRing& ring, long long rows,
                                           long long cols,
                                           std::mt19937_64& rng) {
    auto m = mat_zero(ring, rows, cols);
    for (long long r = 0; r < rows; ++r)
        for (long long c = 0; c < cols; ++c)
            m.at(r, c) = random_group_monomial(ring, rng);
    return m;
}

// split-basis square-zero complex over the (possibly twisted) group ring,
// conjugated by a random unitriangular change of basis
inline std::shared_ptr<ChainComplex<NovRing>>
random_novring_complex(std::mt19937_64& rng, const NovRing& ring,
                       const ComplexSpec& spec = {},
                       const std::string& prefix = "c") {
    auto C = std::make_shared<ChainComplex<NovRing>>(ring);
    std::map<long long, long long> dims, cut;
    std::uniform_int_distribution<long long> dim(1, spec.max_dim);
    for (long long i = spec.min_degree; i <= spec.max_degree; ++i) {
        dims[i] = dim(rng);
        cut[i] = std::uniform_int_distribution<long long>(0, dims[i])(rng);
        for (long long j = 0; j < dims[i]; ++j)
            C->basis.add(i, prefix + std::to_string(i) + "_" + std::to_string(j));
    }
    std::map<long long, Matrix<NovElem>> d, S, Sinv;
    for (long long i = spec.min_degree + 1; i <= spec.max_degree; ++i) {
        auto m = mat_zero(ring, dims[i - 1], dims[i]);
        for (long long r = 0; r < cut[i - 1]; ++r)
            for (long long c = cut[i]; c < dims[i]; ++c)
                m.at(r, c) = random_group_monomial(ring, rng);
        d[i] = m;
    }
    for (long long i = spec.min_degree; i <= spec.max_degree; ++i) {
        long long nn = dims[i];
        auto N = mat_zero(ring, nn, nn);
        for (long long r = 0; r < nn; ++r)
            for (long long c = r + 1; c < nn; ++c)
                N.at(r, c) = random_group_monomial(ring, rng);
        auto I = mat_identity(ring, nn);
        S[i] = mat_add(ring, I, N);
        auto inv = I;
        auto P = I;
        for (long long t = 1; t < nn; ++t) {
            P = mat_mul(ring, P, N);
            inv = (t % 2 == 1) ? mat_sub(ring, inv, P) : mat_add(ring, inv, P);
        }
        Sinv[i] = inv;
    }
    for (long long i = spec.min_degree + 1; i <= spec.max_degree; ++i)
        C->set_d(i, mat_mul(ring, S[i - 1], mat_mul(ring, d[i], Sinv[i])));
    return C;
}

// divide a matrix of pure z-weight-1 entries by z on the left, verifying
// the factorization entry by entry
inline Matrix<NovElem> strip_z(const NovRing& ring, const Matrix<NovElem>& m) {
    auto z = NovElem::monomial(ring.ctx, 1,
                               ExpoVec(static_cast<std::size_t>(ring.ctx->rank())),
                               1);
    auto out = mat_zero(ring, m.rows(), m.cols());
    for (long long r = 0; r < m.rows(); ++r)
        for (long long c = 0; c < m.cols(); ++c) {
            NovElem f = ring.zero();
            for (const auto& [k, coef] : m.at(r, c).terms()) {
                if (k.first != 1)
                    throw std::logic_error("strip_z: entry is not z-homogeneous "
                                           "of weight 1");
                f.add_term(0, ring.ctx->twist_apply(1, k.second), coef);
            }
            if (!ring.eq(ring.mul(z, f), m.at(r, c)))
                throw std::logic_error("strip_z: factorization check failed");
            out.at(r, c) = f;
        }
    return out;
}

// Random valid fundamental-domain package over a twisted group ring: with
// B : F_i -> D_i and a z-weighted zC : D_i -> F_{i+1}, the families
//   theta = B d_F - d_D B,   z theta' = d_F (zC) + (zC) d_D,
//   z psi  = B (z theta')
// make the E-complex square to zero by pure ring algebra.
inline AlgebraicCobordism random_gamma(std::mt19937_64& rng, CtxPtr ctx,
                                       const ComplexSpec& spec = {}) {
    NovRing ring(ctx);
    AlgebraicCobordism g;
    g.ring = ring;
    g.D = random_novring_complex(rng, ring, spec, "d");
    g.F = random_novring_complex(rng, ring, spec, "f");
    g.theta = ChainMap<NovRing>(g.F, g.D, -1);
    g.thetap = ChainMap<NovRing>(g.D, g.F, 0);
    g.psi = ChainMap<NovRing>(g.D, g.D, 0);
    auto z = NovElem::monomial(
        ctx, 1, ExpoVec(static_cast<std::size_t>(ctx->rank())), 1);

    std::map<long long, Matrix<NovElem>> B, zC;
    for (long long i = spec.min_degree - 2; i <= spec.max_degree + 2; ++i) {
        B[i] = random_group_matrix(ring, g.D->basis.dim(i), g.F->basis.dim(i), rng);
        auto Cm = random_group_matrix(ring, g.F->basis.dim(i + 1),
                                      g.D->basis.dim(i), rng);
        for (long long r = 0; r < Cm.rows(); ++r)
            for (long long c = 0; c < Cm.cols(); ++c)
                Cm.at(r, c) = ring.mul(z, Cm.at(r, c));
        zC[i] = Cm;
    }
    for (long long i = spec.min_degree - 1; i <= spec.max_degree + 1; ++i) {
        g.theta.set_block(i, mat_sub(ring, mat_mul(ring, B[i - 1], g.F->d(i)),
                                     mat_mul(ring, g.D->d(i), B[i])));
        auto ztp = mat_add(ring, mat_mul(ring, g.F->d(i + 1), zC[i]),
                           mat_mul(ring, zC[i - 1], g.D->d(i)));
        g.thetap.set_block(i, strip_z(ring, ztp));
        g.psi.set_block(i, strip_z(ring, mat_mul(ring, B[i], ztp)));
    }
    return g;
}

// random member of the filtered-inversion acceptance family
inline NovElem random_zpoly(const NovRing& ring, std::mt19937_64& rng,
                            long long dlo, long long dhi) {
    std::uniform_int_distribution<long long> coef(-2, 2), ex(-1, 1);
    NovElem e = ring.zero();
    for (long long d = dlo; d <= dhi; ++d) {
        long long c = coef(rng);
        if (c == 0) continue;
        ExpoVec v(static_cast<std::size_t>(ring.ctx->rank()));
        for (auto& x : v) x = ex(rng);
        e = ring_add(e, NovElem::monomial(ring.ctx, c, v, d));
    }
    return e;
}

inline FilteredEndomorphism random_filtered(std::mt19937_64& rng, CtxPtr ctx,
                                            long long m) {
    NovRing ring(ctx);
    FilteredEndomorphism T;
    T.ring = ring;
    for (long long j = 0; j < m; ++j) T.labels.push_back("s" + std::to_string(j));
    T.mat = mat_zero(ring, m, m);
    std::uniform_int_distribution<long long> sign(0, 1), ex(-1, 1);
    for (long long r = 0; r < m; ++r)
        for (long long c = 0; c < m; ++c) {
            if (r < c) T.mat.at(r, c) = random_zpoly(ring, rng, 0, 3);
            else if (r > c) T.mat.at(r, c) = random_zpoly(ring, rng, 1, 3);
            else {
                ExpoVec v(static_cast<std::size_t>(ctx->rank()));
                for (auto& x : v) x = ex(rng);
                T.mat.at(r, r) = ring_add(
                    NovElem::monomial(ctx, sign(rng) ? 1 : -1, v, 0),
                    random_zpoly(ring, rng, 1, 3));
            }
        }
    return T;
}

} // namespace novmorse::testing

#endif
