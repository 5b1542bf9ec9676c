#ifndef NOVMORSE_CHAIN_HPP
#define NOVMORSE_CHAIN_HPP

// Chain complexes of finitely generated free modules with labeled bases,
// chain maps and homotopies, mapping cones, and the two homology backends:
// integral homology via Smith normal form and Novikov betti numbers via
// elimination over truncated rational series.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "novmorse/matrix.hpp"
#include "novmorse/rings.hpp"
#include "novmorse/smith.hpp"

namespace novmorse {

// -- graded bases ------------------------------------------------------------

struct BasisLabel {
    std::string name;
    std::optional<Rational> value;
};

class GradedBasis {
public:
    void add(long long degree, std::string name, std::optional<Rational> value = {}) {
        by_degree_[degree].push_back(BasisLabel{std::move(name), value});
    }

    long long dim(long long degree) const {
        auto it = by_degree_.find(degree);
        return it == by_degree_.end() ? 0
                                      : static_cast<long long>(it->second.size());
    }

    const std::vector<BasisLabel>& labels(long long degree) const {
        static const std::vector<BasisLabel> empty;
        auto it = by_degree_.find(degree);
        return it == by_degree_.end() ? empty : it->second;
    }

    bool empty() const { return by_degree_.empty(); }

    long long min_degree() const {
        return by_degree_.empty() ? 0 : by_degree_.begin()->first;
    }
    long long max_degree() const {
        return by_degree_.empty() ? -1 : by_degree_.rbegin()->first;
    }

    std::vector<long long> degrees() const {
        std::vector<long long> d;
        for (const auto& [deg, labels] : by_degree_)
            if (!labels.empty()) d.push_back(deg);
        return d;
    }

    std::optional<std::pair<long long, long long>> find(const std::string& name) const {
        for (const auto& [deg, labels] : by_degree_)
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i].name == name)
                    return std::make_pair(deg, static_cast<long long>(i));
        return std::nullopt;
    }

    // names must be unique across the whole basis; where consecutive labels
    // of the same degree both carry values, the values must be nondecreasing
    void validate() const {
        std::set<std::string> seen;
        for (const auto& [deg, labels] : by_degree_) {
            const BasisLabel* prev = nullptr;
            for (const auto& l : labels) {
                if (!seen.insert(l.name).second)
                    throw GradingError("duplicate basis label '" + l.name + "'");
                if (prev && prev->value && l.value && *prev->value > *l.value)
                    throw GradingError("basis values decrease at label '" + l.name +
                                       "' in degree " + std::to_string(deg));
                prev = &l;
            }
        }
    }

    bool operator==(const GradedBasis& o) const {
        if (by_degree_.size() != o.by_degree_.size()) return false;
        for (const auto& [deg, labels] : by_degree_) {
            const auto& ol = o.labels(deg);
            if (labels.size() != ol.size()) return false;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i].name != ol[i].name) return false;
        }
        return true;
    }

private:
    std::map<long long, std::vector<BasisLabel>> by_degree_;
};

// total order on labels induced by a value assignment
struct ValueFiltration {
    std::map<std::string, Rational> value;
    Rational gap{1, 1}; // declared minimal spacing between distinct values

    void validate() const {
        if (gap <= Rational(0))
            throw GradingError("ValueFiltration: gap must be positive");
        for (const auto& [na, va] : value)
            for (const auto& [nb, vb] : value) {
                if (na >= nb) continue;
                Rational d = va > vb ? va - vb : vb - va;
                if (d != Rational(0) && d < gap)
                    throw GradingError("ValueFiltration: labels '" + na + "' and '" +
                                       nb + "' are closer than the declared gap");
            }
    }
};

// -- chain complexes ---------------------------------------------------------

// certification horizon of a single coefficient
inline long long elem_precision(const I64Ring&, const long long&) {
    return NovElem::EXACT;
}
inline long long elem_precision(const NovRing&, const NovElem& e) {
    return e.precision();
}

template <class R>
class ChainComplex {
public:
    using Elem = typename R::Elem;

    R ring;
    GradedBasis basis;

    ChainComplex() = default;
    explicit ChainComplex(R r) : ring(std::move(r)) {}

    // d_i : C_i -> C_{i-1}
    Matrix<Elem> d(long long i) const {
        auto it = diff_.find(i);
        if (it != diff_.end()) return it->second;
        return mat_zero(ring, basis.dim(i - 1), basis.dim(i));
    }

    void set_d(long long i, Matrix<Elem> m) {
        if (m.rows() != basis.dim(i - 1) || m.cols() != basis.dim(i))
            throw ShapeMismatch(
                "ChainComplex: d_" + std::to_string(i) + " has shape " +
                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                ", basis dictates " + std::to_string(basis.dim(i - 1)) + "x" +
                std::to_string(basis.dim(i)));
        diff_[i] = std::move(m);
    }

    bool has_d(long long i) const { return diff_.count(i) != 0; }

    void validate() const {
        basis.validate();
        for (const auto& [i, m] : diff_)
            if (m.rows() != basis.dim(i - 1) || m.cols() != basis.dim(i))
                throw ShapeMismatch("ChainComplex: stored differential d_" +
                                    std::to_string(i) + " does not match the basis");
    }

private:
    std::map<long long, Matrix<Elem>> diff_;
};

struct ComplexViolation {
    long long degree; // the composite d_{degree-1} . d_degree
    long long row, col;
    std::string entry;
};

struct ComplexReport {
    bool ok = true;
    std::vector<ComplexViolation> violations;
    // all products certified zero at least up to this z-degree (EXACT when
    // every coefficient is exact)
    long long certified_precision = NovElem::EXACT;
};

template <class R>
ComplexReport verify_complex(const ChainComplex<R>& C) {
    C.validate();
    ComplexReport rep;
    if (C.basis.empty()) return rep;
    for (long long i = C.basis.min_degree(); i <= C.basis.max_degree() + 1; ++i) {
        auto dd = mat_mul(C.ring, C.d(i - 1), C.d(i));
        for (long long r = 0; r < dd.rows(); ++r)
            for (long long c = 0; c < dd.cols(); ++c) {
                const auto& e = dd.at(r, c);
                rep.certified_precision =
                    std::min(rep.certified_precision, elem_precision(C.ring, e));
                if (!C.ring.is_zero(e)) {
                    rep.ok = false;
                    rep.violations.push_back(
                        ComplexViolation{i, r, c, C.ring.str(e)});
                }
            }
    }
    return rep;
}

// -- chain maps --------------------------------------------------------------

template <class R>
class ChainMap {
public:
    using Elem = typename R::Elem;

    std::shared_ptr<const ChainComplex<R>> src, dst;
    long long shift = 0;      // 0 or -1
    bool anticommute = false; // false: d f = f d, true: d f = -f d

    ChainMap() = default;
    ChainMap(std::shared_ptr<const ChainComplex<R>> s,
             std::shared_ptr<const ChainComplex<R>> t, long long sh = 0,
             bool anti = false)
        : src(std::move(s)), dst(std::move(t)), shift(sh), anticommute(anti) {
        if (shift != 0 && shift != -1)
            throw ShapeMismatch("ChainMap: shift must be 0 or -1");
    }

    // f_i : src_i -> dst_{i+shift}
    Matrix<Elem> block(long long i) const {
        auto it = blocks_.find(i);
        if (it != blocks_.end()) return it->second;
        return mat_zero(src->ring, dst->basis.dim(i + shift), src->basis.dim(i));
    }

    void set_block(long long i, Matrix<Elem> m) {
        if (m.rows() != dst->basis.dim(i + shift) || m.cols() != src->basis.dim(i))
            throw ShapeMismatch("ChainMap: block at degree " + std::to_string(i) +
                                " has shape " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " +
                                std::to_string(dst->basis.dim(i + shift)) + "x" +
                                std::to_string(src->basis.dim(i)));
        blocks_[i] = std::move(m);
    }

private:
    std::map<long long, Matrix<Elem>> blocks_;
};

template <class R>
std::vector<long long> relevant_degrees(const ChainComplex<R>& a,
                                        const ChainComplex<R>& b) {
    std::vector<long long> out;
    if (a.basis.empty() && b.basis.empty()) return out;
    long long lo = std::min(a.basis.empty() ? b.basis.min_degree() : a.basis.min_degree(),
                            b.basis.empty() ? a.basis.min_degree() : b.basis.min_degree());
    long long hi = std::max(a.basis.empty() ? b.basis.max_degree() : a.basis.max_degree(),
                            b.basis.empty() ? a.basis.max_degree() : b.basis.max_degree());
    for (long long i = lo - 2; i <= hi + 2; ++i) out.push_back(i);
    return out;
}

// commutation check: d_dst f = (-1)^{anticommute} f d_src, degreewise
template <class R>
void validate_chain_map(const ChainMap<R>& f) {
    if (!f.src || !f.dst) throw NotAChainMap("chain map has no endpoints");
    const auto& ring = f.src->ring;
    if (ring != f.dst->ring)
        throw NotAChainMap("chain map endpoints live over different rings");
    for (long long i : relevant_degrees(*f.src, *f.dst)) {
        auto lhs = mat_mul(ring, f.dst->d(i + f.shift), f.block(i));
        auto rhs = mat_mul(ring, f.block(i - 1), f.src->d(i));
        if (f.anticommute) rhs = mat_neg(ring, rhs);
        auto diff = mat_sub(ring, lhs, rhs);
        if (!mat_is_zero(ring, diff))
            throw NotAChainMap("commutation fails at degree " + std::to_string(i));
    }
}

template <class R>
ChainMap<R> identity_map(std::shared_ptr<const ChainComplex<R>> C) {
    ChainMap<R> f(C, C, 0, false);
    for (long long i : C->basis.degrees())
        f.set_block(i, mat_identity(C->ring, C->basis.dim(i)));
    return f;
}

template <class R>
ChainMap<R> compose(const ChainMap<R>& g, const ChainMap<R>& f) {
    // g after f
    if (!(f.dst->basis == g.src->basis))
        throw ShapeMismatch("compose: inner bases differ");
    ChainMap<R> h(f.src, g.dst, f.shift + g.shift,
                  f.anticommute != g.anticommute);
    for (long long i : relevant_degrees(*f.src, *g.dst))
        h.set_block(i, mat_mul(f.src->ring, g.block(i + f.shift), f.block(i)));
    return h;
}

// -- homotopies --------------------------------------------------------------

template <class R>
class ChainHomotopy {
public:
    using Elem = typename R::Elem;

    ChainMap<R> from, to; // phi, phi'

    ChainHomotopy() = default;
    ChainHomotopy(ChainMap<R> phi, ChainMap<R> phi2)
        : from(std::move(phi)), to(std::move(phi2)) {}

    // psi_i : src_i -> dst_{i+1}
    Matrix<Elem> block(long long i) const {
        auto it = blocks_.find(i);
        if (it != blocks_.end()) return it->second;
        return mat_zero(from.src->ring, from.dst->basis.dim(i + 1),
                        from.src->basis.dim(i));
    }

    void set_block(long long i, Matrix<Elem> m) {
        if (m.rows() != from.dst->basis.dim(i + 1) ||
            m.cols() != from.src->basis.dim(i))
            throw ShapeMismatch("ChainHomotopy: block at degree " +
                                std::to_string(i) + " has the wrong shape");
        blocks_[i] = std::move(m);
    }

private:
    std::map<long long, Matrix<Elem>> blocks_;
};

// d psi + psi d = phi' - phi, degreewise and exactly
template <class R>
void validate_homotopy(const ChainHomotopy<R>& h) {
    const auto& f = h.from;
    const auto& g = h.to;
    if (f.src != g.src && !(f.src->basis == g.src->basis))
        throw HomotopyIdentityFails("homotopy endpoints have different sources");
    if (f.dst != g.dst && !(f.dst->basis == g.dst->basis))
        throw HomotopyIdentityFails("homotopy endpoints have different targets");
    if (f.shift != 0 || g.shift != 0 || f.anticommute || g.anticommute)
        throw HomotopyIdentityFails(
            "homotopies are defined between degree-0 commuting chain maps");
    const auto& ring = f.src->ring;
    for (long long i : relevant_degrees(*f.src, *f.dst)) {
        auto lhs = mat_add(ring, mat_mul(ring, f.dst->d(i + 1), h.block(i)),
                           mat_mul(ring, h.block(i - 1), f.src->d(i)));
        auto rhs = mat_sub(ring, g.block(i), f.block(i));
        if (!mat_is_zero(ring, mat_sub(ring, lhs, rhs)))
            throw HomotopyIdentityFails("homotopy identity fails at degree " +
                                        std::to_string(i));
    }
}

// -- mapping cones -----------------------------------------------------------

namespace detail {

inline std::string fresh_name(std::set<std::string>& used, std::string base) {
    while (used.count(base)) base += "'";
    used.insert(base);
    return base;
}

} // namespace detail

// cone of a degree-0 chain map f: C -> D, on D_i + C_{i-1} with differential
// [[d_D, f], [0, -d_C]]
template <class R>
ChainComplex<R> mapping_cone(const ChainMap<R>& f) {
    validate_chain_map(f);
    if (f.shift != 0 || f.anticommute)
        throw NotAChainMap("mapping_cone expects a degree-0 commuting chain map");
    const ChainComplex<R>& C = *f.src;
    const ChainComplex<R>& D = *f.dst;
    ChainComplex<R> cone(D.ring);
    std::set<std::string> used;
    long long lo = std::min(D.basis.empty() ? 0 : D.basis.min_degree(),
                            C.basis.empty() ? 0 : C.basis.min_degree() + 1);
    long long hi = std::max(D.basis.empty() ? -1 : D.basis.max_degree(),
                            C.basis.empty() ? -1 : C.basis.max_degree() + 1);
    for (long long i = lo; i <= hi; ++i) {
        for (const auto& l : D.basis.labels(i))
            cone.basis.add(i, detail::fresh_name(used, l.name));
        for (const auto& l : C.basis.labels(i - 1))
            cone.basis.add(i, detail::fresh_name(used, l.name + "'"));
    }
    for (long long i = lo; i <= hi; ++i) {
        BlockMatrix<R> b(D.ring, {D.basis.dim(i - 1), C.basis.dim(i - 2)},
                         {D.basis.dim(i), C.basis.dim(i - 1)});
        b.set(0, 0, D.d(i));
        b.set(0, 1, f.block(i - 1));
        b.set(1, 1, mat_neg(D.ring, C.d(i - 1)));
        cone.set_d(i, b.done());
    }
    return cone;
}

// The unitriangular comparison of the cones of two homotopic maps.  With the
// homotopy identity in the form d psi + psi d = phi' - phi, the block map
// [[1, -psi], [0, 1]] : cone(phi) -> cone(phi') is a chain map (expanding
// both composites leaves exactly the homotopy identity in the off-diagonal
// corner), and its inverse is the same shape with +psi.
template <class R>
struct ConeIso {
    std::shared_ptr<ChainComplex<R>> cone_from, cone_to;
    ChainMap<R> iso;
};

template <class R>
ConeIso<R> cone_iso(const ChainHomotopy<R>& h) {
    validate_homotopy(h);
    auto cf = std::make_shared<ChainComplex<R>>(mapping_cone(h.from));
    auto ct = std::make_shared<ChainComplex<R>>(mapping_cone(h.to));
    const ChainComplex<R>& C = *h.from.src;
    const ChainComplex<R>& D = *h.from.dst;
    const auto& ring = D.ring;
    ChainMap<R> m(cf, ct, 0, false);
    for (long long i : relevant_degrees(*cf, *ct)) {
        BlockMatrix<R> b(ring, {D.basis.dim(i), C.basis.dim(i - 1)},
                         {D.basis.dim(i), C.basis.dim(i - 1)});
        b.set(0, 0, mat_identity(ring, D.basis.dim(i)));
        b.set(0, 1, mat_neg(ring, h.block(i - 1)));
        b.set(1, 1, mat_identity(ring, C.basis.dim(i - 1)));
        m.set_block(i, b.done());
    }
    validate_chain_map(m); // internal consistency; cannot fail if the homotopy held
    ConeIso<R> out;
    out.cone_from = cf;
    out.cone_to = ct;
    out.iso = m;
    return out;
}

// -- integral homology -------------------------------------------------------

struct HomologyGroup {
    long long betti = 0;
    std::vector<BigInt> torsion; // divisors > 1, in divisibility order
};

inline std::map<long long, HomologyGroup> homology_Z(const ChainComplex<I64Ring>& C) {
    auto rep = verify_complex(C);
    if (!rep.ok)
        throw GradingError("homology_Z: input is not a chain complex (d^2 != 0)");
    std::map<long long, HomologyGroup> H;
    if (C.basis.empty()) return H;
    auto snf = [&](long long i) {
        auto m = C.d(i);
        std::vector<std::vector<BigInt>> big(
            static_cast<std::size_t>(m.rows()),
            std::vector<BigInt>(static_cast<std::size_t>(m.cols())));
        for (long long r = 0; r < m.rows(); ++r)
            for (long long c = 0; c < m.cols(); ++c)
                big[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                    m.at(r, c);
        return smith_diagonal(big);
    };
    std::map<long long, std::vector<BigInt>> diag;
    for (long long i = C.basis.min_degree(); i <= C.basis.max_degree() + 1; ++i)
        diag[i] = snf(i);
    for (long long i = C.basis.min_degree(); i <= C.basis.max_degree(); ++i) {
        HomologyGroup g;
        long long rank_in = static_cast<long long>(rank_from_smith(diag[i + 1]));
        long long rank_out = static_cast<long long>(rank_from_smith(diag[i]));
        g.betti = C.basis.dim(i) - rank_in - rank_out;
        for (const auto& d : diag[i + 1])
            if (d > 1) g.torsion.push_back(d);
        H[i] = g;
    }
    return H;
}

inline std::map<long long, HomologyGroup> homology_Z(const ChainComplex<NovRing>&) {
    throw WrongCoefficients("homology_Z expects integer coefficients");
}

// -- Novikov betti numbers ---------------------------------------------------

namespace detail {

// truncated rational z-series used during elimination
struct QSeries {
    using Coef = boost::multiprecision::cpp_rational;
    std::map<long long, Coef> c;
    long long prec = NovElem::EXACT;

    bool known_zero() const { return c.empty(); }
    long long ord() const { return c.begin()->first; } // requires !known_zero

    void trim() {
        for (auto it = c.begin(); it != c.end();) {
            if (it->second == 0 || (prec != NovElem::EXACT && it->first >= prec))
                it = c.erase(it);
            else
                ++it;
        }
    }
};

inline QSeries qs_from(const NovElem& e) {
    QSeries q;
    q.prec = e.precision();
    for (const auto& [k, v] : e.terms()) q.c[k.first] = v;
    return q;
}

inline long long qs_ord_lb(const QSeries& a) {
    return a.known_zero() ? a.prec : a.ord();
}

inline QSeries qs_sub(const QSeries& a, const QSeries& b) {
    QSeries r;
    r.prec = std::min(a.prec, b.prec);
    r.c = a.c;
    for (const auto& [d, v] : b.c) r.c[d] -= v;
    r.trim();
    return r;
}

inline QSeries qs_mul(const QSeries& a, const QSeries& b) {
    QSeries r;
    if (a.prec == NovElem::EXACT && b.prec == NovElem::EXACT)
        r.prec = NovElem::EXACT;
    else
        r.prec = std::min(prec_add(qs_ord_lb(a), b.prec),
                          prec_add(a.prec, qs_ord_lb(b)));
    for (const auto& [da, va] : a.c)
        for (const auto& [db, vb] : b.c) {
            long long d = checked_add(da, db);
            if (r.prec != NovElem::EXACT && d >= r.prec) continue;
            r.c[d] += va * vb;
        }
    r.trim();
    return r;
}

// inverse of a series with nonzero leading term; digits above
// prec - 2*ord depend on unknown digits of the input
inline QSeries qs_inverse(const QSeries& a, long long need) {
    const long long o = a.ord();
    long long out_prec =
        a.prec == NovElem::EXACT ? need : std::min(need, a.prec - 2 * o);
    if (out_prec != NovElem::EXACT && out_prec <= -o)
        throw PrecisionExhausted("series inversion retains no certified digit");
    QSeries lead; // (c z^o)^{-1}
    lead.c[-o] = 1 / a.c.begin()->second;
    long long series_prec = prec_add(out_prec, o);
    QSeries tail = a;
    tail.c.erase(tail.c.begin());
    QSeries r = qs_mul(lead, tail); // order >= 1 after normalization
    if (r.prec != NovElem::EXACT) r.prec = std::min(r.prec, series_prec);
    r.trim();
    QSeries acc;
    acc.c[0] = 1;
    acc.prec = series_prec;
    QSeries pw = acc;
    QSeries neg_r = r;
    for (auto& [d, v] : neg_r.c) v = -v;
    while (true) {
        pw = qs_mul(pw, neg_r);
        if (pw.prec != NovElem::EXACT) pw.prec = std::min(pw.prec, series_prec);
        pw.trim();
        if (pw.known_zero()) break;
        for (const auto& [d, v] : pw.c) acc.c[d] += v;
        acc.trim();
    }
    QSeries res = qs_mul(acc, lead);
    res.prec = std::min(res.prec, out_prec);
    res.trim();
    return res;
}

// rank of a matrix of truncated series over the field of rational Laurent
// series, pivoting on entries of minimal z-order.  Entries left over at the
// end must still certify vanishing at least through z^1, otherwise the
// computation refuses to decide.
inline long long qseries_rank(std::vector<std::vector<QSeries>> m) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    std::vector<bool> row_done(rows, false), col_done(cols, false);
    long long rank = 0;
    // Working horizon for series inversions when every horizon in sight is
    // infinite (all-exact input): wide enough for the degree bounds on the
    // minors of this matrix.  Precision bookkeeping stays honest either way;
    // this only caps the effort spent on inverse digits.
    long long lo_deg = 0, hi_deg = 0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (!m[i][j].known_zero()) {
                lo_deg = std::min(lo_deg, m[i][j].ord());
                hi_deg = std::max(hi_deg, m[i][j].c.rbegin()->first);
            }
    const long long fallback =
        (static_cast<long long>(std::min(rows, cols)) + 2) * (hi_deg - lo_deg + 2) + 2;
    while (true) {
        bool found = false;
        std::size_t pr = 0, pc = 0;
        long long best = 0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (row_done[i]) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                if (col_done[j] || m[i][j].known_zero()) continue;
                if (!found || m[i][j].ord() < best) {
                    best = m[i][j].ord();
                    pr = i;
                    pc = j;
                    found = true;
                }
            }
        }
        if (!found) {
            for (std::size_t i = 0; i < rows; ++i) {
                if (row_done[i]) continue;
                for (std::size_t j = 0; j < cols; ++j) {
                    if (col_done[j]) continue;
                    if (m[i][j].prec < 1)
                        throw PrecisionExhausted(
                            "novikov_ranks: an entry lost all certified digits "
                            "before it could be classified");
                }
            }
            return rank;
        }
        const QSeries pivot = m[pr][pc];
        for (std::size_t i = 0; i < rows; ++i) {
            if (row_done[i] || i == pr) continue;
            if (m[i][pc].known_zero()) {
                // this entry leaves the computation with the column; it must
                // still certify vanishing through z^1 to be treated as zero
                if (m[i][pc].prec < 1)
                    throw PrecisionExhausted(
                        "novikov_ranks: a pivot-column entry lost all "
                        "certified digits before it could be classified");
                continue;
            }
            // digits of the pivot inverse actually needed: enough to fill the
            // widest finite horizon among the entries being updated
            long long need = NovElem::EXACT;
            auto consider = [&](long long p) {
                if (p == NovElem::EXACT) return;
                need = (need == NovElem::EXACT) ? p : std::max(need, p);
            };
            for (std::size_t j = 0; j < cols; ++j)
                if (!col_done[j]) {
                    consider(m[i][j].prec);
                    consider(m[pr][j].prec);
                }
            if (need == NovElem::EXACT) need = fallback;
            need = checked_add(need,
                               checked_add(1, std::max<long long>(0, -lo_deg)));
            QSeries factor = qs_mul(m[i][pc], qs_inverse(pivot, need));
            for (std::size_t j = 0; j < cols; ++j) {
                if (col_done[j]) continue;
                m[i][j] = qs_sub(m[i][j], qs_mul(factor, m[pr][j]));
            }
        }
        row_done[pr] = true;
        col_done[pc] = true;
        ++rank;
    }
}

} // namespace detail

// Betti numbers over the Novikov field (untwisted coefficients only): for
// each degree, dim_i - rank d_i - rank d_{i+1}.  The certificate is modulo
// the precision horizons carried by the entries.
inline std::map<long long, long long> novikov_ranks(const ChainComplex<NovRing>& C) {
    if (C.ring.ctx->rank() != 0)
        throw WrongCoefficients(
            "novikov_ranks expects untwisted coefficients (rank 0 context)");
    std::map<long long, long long> betti;
    if (C.basis.empty()) return betti;
    std::map<long long, long long> rank;
    for (long long i = C.basis.min_degree(); i <= C.basis.max_degree() + 1; ++i) {
        auto m = C.d(i);
        std::vector<std::vector<detail::QSeries>> q(
            static_cast<std::size_t>(m.rows()),
            std::vector<detail::QSeries>(static_cast<std::size_t>(m.cols())));
        for (long long r = 0; r < m.rows(); ++r)
            for (long long c = 0; c < m.cols(); ++c)
                q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                    detail::qs_from(m.at(r, c));
        rank[i] = detail::qseries_rank(std::move(q));
    }
    for (long long i = C.basis.min_degree(); i <= C.basis.max_degree(); ++i)
        betti[i] = C.basis.dim(i) - rank[i] - rank[i + 1];
    return betti;
}

inline std::map<long long, long long> novikov_ranks(const ChainComplex<I64Ring>&) {
    throw WrongCoefficients("novikov_ranks expects Novikov coefficients");
}

} // namespace novmorse

#endif
