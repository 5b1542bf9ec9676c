#ifndef NOVMORSE_RINGS_HPP
#define NOVMORSE_RINGS_HPP

// Exact arithmetic for twisted Laurent / truncated Novikov coefficients.
//
// An element is a finite sum  sum_i a_i z^i  with a_i in the group ring
// Z[Z^k], stored together with a precision horizon: terms of z-degree >=
// precision are unknown rather than zero.  The monodromy twist zeta acts on
// the group Z^k by an integer matrix A with |det A| = 1, and multiplication
// moves group elements past powers of z:
//
//     (a z^i) * (b z^j) = a * zeta^{-i}(b) * z^{i+j}
//
// which is the form of the commutation rule  a z = z zeta(a)  solved for
// right multiplication.  Precision is propagated pessimistically: a digit is
// kept only when it is fully determined by the known digits of the operands.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "novmorse/errors.hpp"

namespace novmorse {

using Rational = boost::rational<long long>;

// -- checked machine arithmetic ----------------------------------------------

inline long long checked_add(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r))
        throw ArithmeticOverflow("integer addition overflow");
    return r;
}

inline long long checked_sub(long long a, long long b) {
    long long r;
    if (__builtin_sub_overflow(a, b, &r))
        throw ArithmeticOverflow("integer subtraction overflow");
    return r;
}

inline long long checked_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r))
        throw ArithmeticOverflow("integer multiplication overflow");
    return r;
}

inline long long checked_neg(long long a) {
    if (a == std::numeric_limits<long long>::min())
        throw ArithmeticOverflow("integer negation overflow");
    return -a;
}

// -- the monodromy context ---------------------------------------------------

using ExpoVec = std::vector<long long>;
using IntMat = std::vector<std::vector<long long>>;

namespace detail {

inline boost::multiprecision::cpp_int int_det(const IntMat& m) {
    using boost::multiprecision::cpp_int;
    const std::size_t n = m.size();
    if (n == 0) return 1;
    std::vector<std::vector<cpp_int>> a(n, std::vector<cpp_int>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = m[i][j];
    // fraction-free Gaussian elimination (Bareiss)
    cpp_int sign = 1, prev = 1;
    for (std::size_t p = 0; p < n; ++p) {
        if (a[p][p] == 0) {
            std::size_t q = p + 1;
            while (q < n && a[q][p] == 0) ++q;
            if (q == n) return 0;
            std::swap(a[p], a[q]);
            sign = -sign;
        }
        for (std::size_t i = p + 1; i < n; ++i) {
            for (std::size_t j = p + 1; j < n; ++j)
                a[i][j] = (a[p][p] * a[i][j] - a[i][p] * a[p][j]) / prev;
            a[i][p] = 0;
        }
        prev = a[p][p];
    }
    return sign * a[n - 1][n - 1];
}

// inverse of an integer matrix with det = +-1, via the adjugate
inline IntMat unimodular_inverse(const IntMat& m, long long det) {
    const std::size_t n = m.size();
    IntMat inv(n, std::vector<long long>(n, 0));
    if (n == 0) return inv;
    auto minor_det = [&](std::size_t dr, std::size_t dc) {
        IntMat sub;
        sub.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == dr) continue;
            std::vector<long long> row;
            row.reserve(n - 1);
            for (std::size_t j = 0; j < n; ++j)
                if (j != dc) row.push_back(m[i][j]);
            sub.push_back(std::move(row));
        }
        return int_det(sub);
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            boost::multiprecision::cpp_int c = minor_det(j, i);
            if ((i + j) % 2 != 0) c = -c;
            c /= det; // det is +-1
            inv[i][j] = static_cast<long long>(c);
        }
    }
    return inv;
}

} // namespace detail

// Rank of the deck group and the twist matrix A (action of the monodromy on
// Z^k).  Only unimodular twists are admitted so that zeta is invertible.
class RingContext {
public:
    RingContext() : rank_(0) {}

    RingContext(long long rank, IntMat twist) : rank_(rank), twist_(std::move(twist)) {
        if (rank < 0) throw std::invalid_argument("RingContext: negative rank");
        if (static_cast<long long>(twist_.size()) != rank)
            throw std::invalid_argument("RingContext: twist matrix has wrong size");
        for (const auto& row : twist_)
            if (static_cast<long long>(row.size()) != rank)
                throw std::invalid_argument("RingContext: twist matrix is not square");
        auto det = detail::int_det(twist_);
        if (det != 1 && det != -1)
            throw std::invalid_argument("RingContext: twist matrix must have determinant +-1");
        twist_inv_ = detail::unimodular_inverse(twist_, static_cast<long long>(det));
    }

    static RingContext untwisted(long long rank) {
        IntMat id(rank, std::vector<long long>(rank, 0));
        for (long long i = 0; i < rank; ++i) id[i][i] = 1;
        return RingContext(rank, std::move(id));
    }

    long long rank() const { return rank_; }
    const IntMat& twist() const { return twist_; }
    const IntMat& twist_inverse() const { return twist_inv_; }

    // zeta^power applied to an exponent vector
    ExpoVec twist_apply(long long power, const ExpoVec& v) const {
        if (rank_ == 0 || power == 0) return v;
        const IntMat& base = power > 0 ? twist_ : twist_inv_;
        ExpoVec cur = v;
        long long steps = power > 0 ? power : -power;
        // exponents in play are tiny; repeated application is plenty fast and
        // keeps the overflow checking simple
        for (long long s = 0; s < steps; ++s) {
            ExpoVec next(rank_, 0);
            for (long long i = 0; i < rank_; ++i) {
                long long acc = 0;
                for (long long j = 0; j < rank_; ++j)
                    acc = checked_add(acc, checked_mul(base[i][j], cur[j]));
                next[i] = acc;
            }
            cur = std::move(next);
        }
        return cur;
    }

    bool operator==(const RingContext& o) const {
        return rank_ == o.rank_ && twist_ == o.twist_;
    }
    bool operator!=(const RingContext& o) const { return !(*this == o); }

private:
    long long rank_;
    IntMat twist_;
    IntMat twist_inv_;
};

using CtxPtr = std::shared_ptr<const RingContext>;

inline CtxPtr make_context(long long rank, IntMat twist) {
    return std::make_shared<const RingContext>(rank, std::move(twist));
}

inline CtxPtr make_untwisted_context(long long rank) {
    return std::make_shared<const RingContext>(RingContext::untwisted(rank));
}

// -- elements ----------------------------------------------------------------

// One element class covers group-ring elements (z-support {0}), Laurent
// polynomials (precision EXACT) and truncated Novikov elements (finite
// precision).  Terms are kept in the canonical order: z-degree first, then
// the exponent vector lexicographically.
class NovElem {
public:
    static constexpr long long EXACT = std::numeric_limits<long long>::max();

    using Key = std::pair<long long, ExpoVec>;
    using TermMap = std::map<Key, long long>;

    NovElem() : prec_(EXACT) {}

    static NovElem zero(CtxPtr ctx, long long prec = EXACT) {
        NovElem e;
        e.ctx_ = std::move(ctx);
        e.prec_ = prec;
        return e;
    }

    static NovElem constant(CtxPtr ctx, long long c, long long prec = EXACT) {
        return monomial(std::move(ctx), c, {}, 0, prec);
    }

    // c * x^expo * z^zdeg; an empty expo means the trivial group element
    static NovElem monomial(CtxPtr ctx, long long c, ExpoVec expo, long long zdeg,
                            long long prec = EXACT) {
        NovElem e = zero(std::move(ctx), prec);
        if (expo.empty()) expo.assign(static_cast<std::size_t>(e.ctx()->rank()), 0);
        e.check_expo(expo);
        e.add_term(zdeg, std::move(expo), c);
        return e;
    }

    const CtxPtr& ctx_ptr() const { return ctx_; }
    const RingContext* ctx() const { return ctx_.get(); }
    long long precision() const { return prec_; }
    bool exact() const { return prec_ == EXACT; }
    const TermMap& terms() const { return terms_; }

    // zero as far as certified: no known nonzero digit
    bool is_zero() const { return terms_.empty(); }

    // lowest z-degree with a known nonzero coefficient; for an element with
    // no known terms this is the precision horizon (the order is at least
    // that), and EXACT for the exact zero
    long long order_lower_bound() const {
        if (!terms_.empty()) return terms_.begin()->first.first;
        return prec_;
    }

    bool has_negative_degree() const {
        return !terms_.empty() && terms_.begin()->first.first < 0;
    }

    void add_term(long long zdeg, ExpoVec expo, long long c) {
        check_expo(expo);
        if (c == 0) return;
        if (prec_ != EXACT && zdeg >= prec_) return;
        Key k{zdeg, std::move(expo)};
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(std::move(k), c);
        } else {
            it->second = checked_add(it->second, c);
            if (it->second == 0) terms_.erase(it);
        }
    }

    // forget digits at z-degree >= n
    NovElem truncated(long long n) const {
        NovElem r = *this;
        if (n == EXACT) return r;
        r.prec_ = std::min(r.prec_, n);
        auto it = r.terms_.lower_bound(Key{n, {}});
        r.terms_.erase(it, r.terms_.end());
        return r;
    }

    // structural equality: identical certified digits and identical horizon
    bool operator==(const NovElem& o) const {
        return same_ctx(o) && prec_ == o.prec_ && terms_ == o.terms_;
    }
    bool operator!=(const NovElem& o) const { return !(*this == o); }

    // agreement of all digits below z^n (both operands must certify them)
    bool congruent_mod(const NovElem& o, long long n) const {
        if (!same_ctx(o)) return false;
        if (prec_ < n || o.prec_ < n) return false;
        auto at = truncated(n);
        auto bt = o.truncated(n);
        return at.terms_ == bt.terms_;
    }

    bool same_ctx(const NovElem& o) const {
        if (ctx_ == o.ctx_) return true;
        if (!ctx_ || !o.ctx_) return false;
        return *ctx_ == *o.ctx_;
    }

    void check_expo(const ExpoVec& expo) const {
        if (!ctx_) throw std::invalid_argument("NovElem: missing ring context");
        if (static_cast<long long>(expo.size()) != ctx_->rank())
            throw ContextMismatch("exponent vector length does not match context rank");
    }

    long long prec_raw() const { return prec_; }
    void set_prec(long long p) { prec_ = p; }

private:
    CtxPtr ctx_;
    TermMap terms_;
    long long prec_;
};

namespace detail {

inline void require_same_ctx(const NovElem& a, const NovElem& b, const char* op) {
    if (!a.same_ctx(b))
        throw ContextMismatch(std::string("ring contexts differ in ") + op);
}

// precision arithmetic with the EXACT sentinel acting as +infinity
inline long long prec_add(long long a, long long b) {
    if (a == NovElem::EXACT || b == NovElem::EXACT) return NovElem::EXACT;
    return checked_add(a, b);
}

} // namespace detail

inline NovElem ring_add(const NovElem& a, const NovElem& b) {
    detail::require_same_ctx(a, b, "ring_add");
    long long prec = std::min(a.precision(), b.precision());
    NovElem r = NovElem::zero(a.ctx_ptr() ? a.ctx_ptr() : b.ctx_ptr(), prec);
    for (const auto& [k, c] : a.terms()) r.add_term(k.first, k.second, c);
    for (const auto& [k, c] : b.terms()) r.add_term(k.first, k.second, c);
    return r;
}

inline NovElem ring_neg(const NovElem& a) {
    NovElem r = NovElem::zero(a.ctx_ptr(), a.precision());
    for (const auto& [k, c] : a.terms()) r.add_term(k.first, k.second, checked_neg(c));
    return r;
}

inline NovElem ring_sub(const NovElem& a, const NovElem& b) {
    return ring_add(a, ring_neg(b));
}

inline NovElem ring_mul(const NovElem& a, const NovElem& b) {
    detail::require_same_ctx(a, b, "ring_mul");
    // a digit of the product at degree i+j is certified when every
    // contribution to it is: min(ord(a)+prec(b), prec(a)+ord(b))
    long long prec;
    if (a.exact() && b.exact()) {
        prec = NovElem::EXACT;
    } else {
        prec = std::min(detail::prec_add(a.order_lower_bound(), b.precision()),
                        detail::prec_add(a.precision(), b.order_lower_bound()));
    }
    NovElem r = NovElem::zero(a.ctx_ptr(), prec);
    const RingContext* ctx = a.ctx();
    // cache zeta^{-i} applied per distinct z-degree of a
    std::map<long long, std::map<ExpoVec, ExpoVec>> twist_cache;
    for (const auto& [ka, ca] : a.terms()) {
        const long long i = ka.first;
        auto& cache_i = twist_cache[i];
        for (const auto& [kb, cb] : b.terms()) {
            const long long j = kb.first;
            long long deg = checked_add(i, j);
            if (prec != NovElem::EXACT && deg >= prec) continue;
            auto it = cache_i.find(kb.second);
            if (it == cache_i.end())
                it = cache_i.emplace(kb.second, ctx->twist_apply(-i, kb.second)).first;
            ExpoVec expo(ka.second);
            for (std::size_t t = 0; t < expo.size(); ++t)
                expo[t] = checked_add(expo[t], it->second[t]);
            r.add_term(deg, std::move(expo), checked_mul(ca, cb));
        }
    }
    return r;
}

// evaluation at z = 0, i.e. the degree-zero group-ring coefficient
inline NovElem augment(const NovElem& a) {
    if (a.has_negative_degree())
        throw NegativeDegreePresent("augment: element has terms of negative z-degree");
    if (a.precision() < 1)
        throw PrecisionExhausted("augment: degree-zero digit is not certified");
    NovElem r = NovElem::zero(a.ctx_ptr(), NovElem::EXACT);
    for (const auto& [k, c] : a.terms()) {
        if (k.first == 0) r.add_term(0, k.second, c);
        if (k.first > 0) break;
    }
    return r;
}

struct UnitWitness {
    long long sign = 1;   // +-1
    ExpoVec expo;         // group element of the leading monomial
    long long zorder = 0; // z-degree of the leading monomial
};

// A (truncated) element is a unit exactly when its lowest certified
// coefficient is a single +-monomial of the group ring.  The witness is that
// monomial.  An element with no certified digits cannot be classified.
inline std::optional<UnitWitness> is_unit(const NovElem& a) {
    if (a.is_zero())
        throw ZeroElement("is_unit: element has no certified nonzero digit");
    const long long o = a.terms().begin()->first.first;
    auto it = a.terms().begin();
    const auto& [key, c] = *it;
    ++it;
    if (it != a.terms().end() && it->first.first == o)
        return std::nullopt; // lowest coefficient has more than one group term
    if (c != 1 && c != -1) return std::nullopt;
    UnitWitness w;
    w.sign = c;
    w.expo = key.second;
    w.zorder = o;
    return w;
}

// Inverse of a unit, computed as a geometric series against the leading
// monomial, with digits certified up to z^n on the input side.  When the
// input itself is truncated at precision p, digits of the inverse above
// z^{min(n,p) - 2*order} depend on unknown digits of the input and are
// dropped.  For exact input the result carries precision n.
inline NovElem invert_unit(const NovElem& a, long long n) {
    auto w = is_unit(a);
    if (!w) throw NotUnit("invert_unit: lowest coefficient is not a +-monomial");
    const long long o = w->zorder;
    long long n_eff = std::min(n, a.precision());
    long long out_prec;
    if (a.exact()) {
        out_prec = n;
    } else {
        out_prec = checked_sub(n_eff, checked_mul(2, o));
    }
    // inverse of the leading monomial m = s x^u z^o: m^{-1} = s x^{-A^o u} z^{-o}
    ExpoVec v = a.ctx()->twist_apply(o, w->expo);
    for (auto& e : v) e = checked_neg(e);
    NovElem m_inv = NovElem::monomial(a.ctx_ptr(), w->sign, std::move(v), -o);
    // r := m^{-1} a - 1 has order >= 1
    long long series_prec = detail::prec_add(out_prec, o); // degrees needed of (1+r)^{-1}
    if (series_prec != NovElem::EXACT && series_prec < 1)
        throw PrecisionExhausted("invert_unit: no digit of the inverse is certified");
    NovElem one = NovElem::constant(a.ctx_ptr(), 1);
    NovElem r = ring_sub(ring_mul(m_inv, a), one).truncated(series_prec);
    NovElem acc = one.truncated(series_prec);
    NovElem pw = one;
    NovElem neg_r = ring_neg(r);
    while (true) {
        pw = ring_mul(pw, neg_r).truncated(series_prec);
        if (pw.is_zero()) break;
        acc = ring_add(acc, pw);
    }
    // a^{-1} = (1+r)^{-1} m^{-1}
    NovElem res = ring_mul(acc, m_inv);
    res = res.truncated(out_prec);
    res.set_prec(out_prec);
    return res;
}

// exact inverse, defined only for +-monomial units
inline NovElem invert_unit(const NovElem& a) {
    auto w = is_unit(a);
    if (!w) throw NotUnit("invert_unit: lowest coefficient is not a +-monomial");
    if (!a.exact() || a.terms().size() != 1)
        throw NotUnit("invert_unit: exact inverse requires a single exact +-monomial "
                      "(pass a precision for series inversion)");
    ExpoVec v = a.ctx()->twist_apply(w->zorder, w->expo);
    for (auto& e : v) e = checked_neg(e);
    return NovElem::monomial(a.ctx_ptr(), w->sign, std::move(v), -w->zorder);
}

// -- canonical text form -----------------------------------------------------

// term format: c*x^[e1,...,ek]*z^d, the x-part omitted for rank 0; negative
// coefficients are parenthesized; the zero element prints as "0"
inline std::string to_string(const NovElem& a) {
    if (a.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    const long long k = a.ctx()->rank();
    for (const auto& [key, c] : a.terms()) {
        if (!first) out << " + ";
        first = false;
        if (c < 0)
            out << "(" << c << ")";
        else
            out << c;
        if (k > 0) {
            out << "*x^[";
            for (long long i = 0; i < k; ++i) {
                if (i) out << ",";
                out << key.second[static_cast<std::size_t>(i)];
            }
            out << "]";
        }
        out << "*z^" << key.first;
    }
    return out.str();
}

namespace detail {

inline long long parse_ll(const std::string& s, const char* what) {
    if (s.empty()) throw ParseError(std::string("empty integer in ") + what);
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("bad integer '") + s + "' in " + what);
    }
    if (pos != s.size())
        throw ParseError(std::string("trailing characters in integer '") + s + "' in " + what);
    return v;
}

} // namespace detail

// strict inverse of to_string (plus precision, supplied by the caller)
inline NovElem parse_element(CtxPtr ctx, const std::string& text,
                             long long prec = NovElem::EXACT) {
    NovElem r = NovElem::zero(ctx, prec);
    if (text == "0") return r;
    const long long k = ctx->rank();
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(" + ", pos);
        std::string term = text.substr(pos, end == std::string::npos ? std::string::npos
                                                                     : end - pos);
        pos = end == std::string::npos ? text.size() : end + 3;

        // coefficient
        std::size_t star = term.find('*');
        if (star == std::string::npos)
            throw ParseError("element term '" + term + "' has no z-part");
        std::string coef = term.substr(0, star);
        if (!coef.empty() && coef.front() == '(') {
            if (coef.back() != ')')
                throw ParseError("unbalanced parentheses in coefficient '" + coef + "'");
            coef = coef.substr(1, coef.size() - 2);
        }
        long long c = detail::parse_ll(coef, "coefficient");
        std::string rest = term.substr(star + 1);

        ExpoVec expo(static_cast<std::size_t>(k), 0);
        if (k > 0) {
            if (rest.rfind("x^[", 0) != 0)
                throw ParseError("expected x-part in term '" + term + "'");
            std::size_t close = rest.find(']');
            if (close == std::string::npos)
                throw ParseError("unterminated x-part in term '" + term + "'");
            std::string body = rest.substr(3, close - 3);
            std::size_t p = 0;
            for (long long i = 0; i < k; ++i) {
                std::size_t comma = body.find(',', p);
                std::string piece = body.substr(p, comma == std::string::npos
                                                       ? std::string::npos
                                                       : comma - p);
                expo[static_cast<std::size_t>(i)] = detail::parse_ll(piece, "exponent");
                if (comma == std::string::npos) {
                    if (i + 1 != k)
                        throw ParseError("exponent vector has wrong length in '" + term + "'");
                    p = body.size();
                } else {
                    p = comma + 1;
                }
            }
            if (p != body.size())
                throw ParseError("exponent vector has wrong length in '" + term + "'");
            if (close + 1 >= rest.size() || rest[close + 1] != '*')
                throw ParseError("expected '*' after x-part in term '" + term + "'");
            rest = rest.substr(close + 2);
        }
        if (rest.rfind("z^", 0) != 0)
            throw ParseError("expected z-part in term '" + term + "'");
        long long zdeg = detail::parse_ll(rest.substr(2), "z-degree");
        r.add_term(zdeg, std::move(expo), c);
    }
    return r;
}

// -- ring instances for the templated chain layer ----------------------------

struct I64Ring {
    using Elem = long long;

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem add(const Elem& a, const Elem& b) const { return checked_add(a, b); }
    Elem neg(const Elem& a) const { return checked_neg(a); }
    Elem sub(const Elem& a, const Elem& b) const { return checked_sub(a, b); }
    Elem mul(const Elem& a, const Elem& b) const { return checked_mul(a, b); }
    bool is_zero(const Elem& a) const { return a == 0; }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    std::string str(const Elem& a) const { return std::to_string(a); }

    bool operator==(const I64Ring&) const { return true; }
    bool operator!=(const I64Ring&) const { return false; }
};

struct NovRing {
    CtxPtr ctx;

    NovRing() : ctx(make_untwisted_context(0)) {}
    explicit NovRing(CtxPtr c) : ctx(std::move(c)) {}

    using Elem = NovElem;

    Elem zero() const { return NovElem::zero(ctx); }
    Elem one() const { return NovElem::constant(ctx, 1); }
    Elem add(const Elem& a, const Elem& b) const { return ring_add(a, b); }
    Elem neg(const Elem& a) const { return ring_neg(a); }
    Elem sub(const Elem& a, const Elem& b) const { return ring_sub(a, b); }
    Elem mul(const Elem& a, const Elem& b) const { return ring_mul(a, b); }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    std::string str(const Elem& a) const { return to_string(a); }

    bool operator==(const NovRing& o) const {
        if (ctx == o.ctx) return true;
        if (!ctx || !o.ctx) return false;
        return *ctx == *o.ctx;
    }
    bool operator!=(const NovRing& o) const { return !(*this == o); }
};

} // namespace novmorse

#endif
