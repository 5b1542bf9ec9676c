#pragma once

// JSON encoding and decoding for the objects the command-line front end moves
// around: exact rationals, Novikov-ring elements (via their strict text form),
// graded complexes, block maps, cobordism packages, and the various check
// reports.  Everything uses nlohmann's ordered_json so that a document prints
// byte-identically across runs.

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "novmorse/assembly.hpp"
#include "novmorse/chain.hpp"
#include "novmorse/cobordism.hpp"
#include "novmorse/dmt.hpp"
#include "novmorse/errors.hpp"
#include "novmorse/rings.hpp"

namespace novmorse {

using Json = nlohmann::ordered_json;

// -- rationals ---------------------------------------------------------------

inline std::string rational_to_string(const Rational& q) {
    std::ostringstream out;
    out << q.numerator() << "/" << q.denominator();
    return out.str();
}

// accepts "3", "-3", or "n/d" with a positive denominator
inline Rational rational_from_json(const Json& j, const std::string& what) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (!j.is_string())
        throw ParseError(what + ": expected an integer or a \"n/d\" string");
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        const long long n = std::stoll(s.substr(0, slash));
        const long long d = std::stoll(s.substr(slash + 1));
        if (d <= 0) throw ParseError(what + ": denominator must be positive");
        return Rational(n, d);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(what + ": bad rational '" + s + "'");
    }
}

// -- cell complexes ----------------------------------------------------------

inline CellComplex builtin_complex(const std::string& name) {
    if (name == "one_point") return one_point();
    if (name == "two_points") return two_points();
    if (name == "circle_triangle") return circle_triangle();
    if (name == "sphere_tetrahedron") return sphere_tetrahedron();
    if (name == "torus_seven") return torus_seven();
    if (name == "projective_plane_six") return projective_plane_six();
    if (name == "klein_bottle") return klein_bottle();
    throw NameResolution("unknown builtin complex '" + name + "'");
}

// {"builtin": name} | {"facets": [[0,1],...]} | {"cells": [{"id","dim","boundary"}]}
inline CellComplex cell_complex_from_json(const Json& j) {
    if (!j.is_object())
        throw ParseError("complex declaration must be an object");
    if (j.contains("builtin"))
        return builtin_complex(j.at("builtin").get<std::string>());
    if (j.contains("facets")) {
        std::vector<std::vector<long long>> facets;
        for (const auto& f : j.at("facets"))
            facets.push_back(f.get<std::vector<long long>>());
        return from_simplicial(facets);
    }
    if (j.contains("cells")) {
        CellComplex K;
        if (j.contains("regular")) K.regular = j.at("regular").get<bool>();
        for (const auto& c : j.at("cells")) {
            std::vector<std::pair<std::string, int>> bd;
            if (c.contains("boundary"))
                for (const auto& f : c.at("boundary"))
                    bd.emplace_back(f.at(0).get<std::string>(),
                                    f.at(1).get<int>());
            K.add_cell(c.at("id").get<std::string>(),
                       c.at("dim").get<long long>(), bd);
        }
        return K;
    }
    throw ParseError("complex declaration needs 'builtin', 'facets' or 'cells'");
}

// -- homology ----------------------------------------------------------------

inline std::string bigint_to_string(const BigInt& b) {
    std::ostringstream out;
    out << b;
    return out.str();
}

inline Json homology_to_json(const std::map<long long, HomologyGroup>& H) {
    Json out = Json::object();
    for (const auto& [deg, g] : H) {
        Json grp;
        grp["betti"] = g.betti;
        Json tors = Json::array();
        for (const auto& t : g.torsion) tors.push_back(bigint_to_string(t));
        grp["torsion"] = std::move(tors);
        out[std::to_string(deg)] = std::move(grp);
    }
    return out;
}

// "Z, Z/2, 0": one entry per degree in ascending order
inline std::string homology_to_text(const std::map<long long, HomologyGroup>& H) {
    std::ostringstream out;
    bool first_deg = true;
    for (const auto& [deg, g] : H) {
        (void)deg;
        if (!first_deg) out << ", ";
        first_deg = false;
        bool wrote = false;
        if (g.betti == 1) { out << "Z"; wrote = true; }
        else if (g.betti > 1) { out << "Z^" << g.betti; wrote = true; }
        for (const auto& t : g.torsion) {
            if (wrote) out << " + ";
            out << "Z/" << t;
            wrote = true;
        }
        if (!wrote) out << "0";
    }
    return out.str();
}

// -- matrices and complexes over the Novikov ring ----------------------------

inline Json matrix_to_json(const NovRing& ring, const Matrix<NovElem>& m) {
    Json rows = Json::array();
    for (long long r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (long long c = 0; c < m.cols(); ++c) row.push_back(ring.str(m.at(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix<NovElem> matrix_from_json(const NovRing& ring, const Json& j,
                                        long long rows, long long cols,
                                        const std::string& what) {
    if (!j.is_array() || static_cast<long long>(j.size()) != rows)
        throw ParseError(what + ": expected " + std::to_string(rows) + " rows");
    Matrix<NovElem> m(rows, cols, ring.zero());
    for (long long r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<long long>(row.size()) != cols)
            throw ParseError(what + ": expected " + std::to_string(cols) +
                             " columns in row " + std::to_string(r));
        for (long long c = 0; c < cols; ++c)
            m.at(r, c) = parse_element(
                ring.ctx, row.at(static_cast<std::size_t>(c)).get<std::string>());
    }
    return m;
}

// {"basis": {"<deg>": [labels]}, "d": {"<deg>": [[entry strings]]}}
inline Json complex_to_json(const ChainComplex<NovRing>& C) {
    Json out;
    Json basis = Json::object();
    for (long long i = C.basis.min_degree(); i <= C.basis.max_degree(); ++i) {
        if (C.basis.dim(i) == 0) continue;
        Json labs = Json::array();
        for (const auto& l : C.basis.labels(i)) labs.push_back(l.name);
        basis[std::to_string(i)] = std::move(labs);
    }
    out["basis"] = std::move(basis);
    Json dd = Json::object();
    for (long long i = C.basis.min_degree(); i <= C.basis.max_degree(); ++i)
        if (C.basis.dim(i) > 0 && C.basis.dim(i - 1) > 0)
            dd[std::to_string(i)] = matrix_to_json(C.ring, C.d(i));
    out["d"] = std::move(dd);
    return out;
}

inline std::shared_ptr<ChainComplex<NovRing>> complex_from_json(
    const NovRing& ring, const Json& j, const std::string& what) {
    auto C = std::make_shared<ChainComplex<NovRing>>(ring);
    if (!j.is_object() || !j.contains("basis"))
        throw ParseError(what + ": complex needs a 'basis' object");
    std::map<long long, std::vector<std::string>> by_deg;
    for (const auto& [key, labs] : j.at("basis").items()) {
        long long deg = 0;
        try {
            deg = std::stoll(key);
        } catch (const std::exception&) {
            throw ParseError(what + ": bad degree key '" + key + "'");
        }
        by_deg[deg] = labs.get<std::vector<std::string>>();
    }
    for (const auto& [deg, labs] : by_deg)
        for (const auto& l : labs) C->basis.add(deg, l);
    if (j.contains("d"))
        for (const auto& [key, rows] : j.at("d").items()) {
            long long deg = 0;
            try {
                deg = std::stoll(key);
            } catch (const std::exception&) {
                throw ParseError(what + ": bad degree key '" + key + "'");
            }
            C->set_d(deg, matrix_from_json(ring, rows, C->basis.dim(deg - 1),
                                           C->basis.dim(deg),
                                           what + ".d[" + key + "]"));
        }
    C->validate();
    return C;
}

// block maps are stored per source degree, only where both ends are nonempty
inline Json map_to_json(const ChainMap<NovRing>& f) {
    Json out = Json::object();
    const auto& S = f.src->basis;
    const auto& D = f.dst->basis;
    for (long long i = S.min_degree(); i <= S.max_degree(); ++i)
        if (S.dim(i) > 0 && D.dim(i + f.shift) > 0)
            out[std::to_string(i)] = matrix_to_json(f.src->ring, f.block(i));
    return out;
}

inline ChainMap<NovRing> map_from_json(
    std::shared_ptr<const ChainComplex<NovRing>> src,
    std::shared_ptr<const ChainComplex<NovRing>> dst, long long shift,
    bool anticommute, const Json& j, const std::string& what) {
    ChainMap<NovRing> f(src, dst, shift, anticommute);
    if (j.is_null()) return f;
    if (!j.is_object()) throw ParseError(what + ": block map must be an object");
    for (const auto& [key, rows] : j.items()) {
        long long deg = 0;
        try {
            deg = std::stoll(key);
        } catch (const std::exception&) {
            throw ParseError(what + ": bad degree key '" + key + "'");
        }
        f.set_block(deg,
                    matrix_from_json(src->ring, rows, dst->basis.dim(deg + shift),
                                     src->basis.dim(deg),
                                     what + "[" + key + "]"));
    }
    return f;
}

// -- cobordism packages ------------------------------------------------------

// keys: twist (context rank), F, D, theta, thetaprime, psi
inline Json gamma_to_json(const AlgebraicCobordism& g) {
    Json out;
    out["twist"] = g.ring.ctx->rank();
    out["F"] = complex_to_json(*g.F);
    out["D"] = complex_to_json(*g.D);
    out["theta"] = map_to_json(g.theta);
    out["thetaprime"] = map_to_json(g.thetap);
    out["psi"] = map_to_json(g.psi);
    return out;
}

inline AlgebraicCobordism gamma_from_json(const Json& j, const std::string& what) {
    if (!j.is_object()) throw ParseError(what + ": expected an object");
    long long twist = 0;
    if (j.contains("twist")) twist = j.at("twist").get<long long>();
    if (twist < 0) throw ParseError(what + ": twist rank must be >= 0");
    NovRing ring(make_untwisted_context(twist));
    AlgebraicCobordism g;
    g.ring = ring;
    g.F = complex_from_json(ring, j.at("F"), what + ".F");
    g.D = complex_from_json(ring, j.at("D"), what + ".D");
    g.theta = map_from_json(g.F, g.D, -1, true,
                            j.contains("theta") ? j.at("theta") : Json(),
                            what + ".theta");
    g.thetap = map_from_json(g.D, g.F, 0, false,
                             j.contains("thetaprime") ? j.at("thetaprime") : Json(),
                             what + ".thetaprime");
    g.psi = map_from_json(g.D, g.D, 0, false,
                          j.contains("psi") ? j.at("psi") : Json(),
                          what + ".psi");
    return g;
}

// -- reports -----------------------------------------------------------------

inline Json complex_report_to_json(const ComplexReport& rep) {
    Json out;
    out["ok"] = rep.ok;
    Json v = Json::array();
    for (const auto& x : rep.violations) {
        Json e;
        e["degree"] = x.degree;
        e["row"] = x.row;
        e["col"] = x.col;
        e["entry"] = x.entry;
        v.push_back(std::move(e));
    }
    out["violations"] = std::move(v);
    return out;
}

inline Json cell_report_to_json(const CellReport& rep) {
    Json out;
    out["ok"] = rep.ok;
    out["violations"] = rep.violations;
    return out;
}

template <class R>
Json glue_report_to_json(const GlueReport<R>& rep) {
    Json out;
    out["ok"] = rep.ok;
    Json v = Json::array();
    for (const auto& x : rep.discrepancies) {
        Json e;
        e["degree"] = x.degree;
        e["row"] = x.row;
        e["col"] = x.col;
        e["entry"] = x.entry;
        v.push_back(std::move(e));
    }
    out["discrepancies"] = std::move(v);
    return out;
}

inline Json gamma_report_to_json(const GammaReport& rep) {
    Json out;
    out["ok"] = rep.ok;
    Json v = Json::array();
    for (const auto& x : rep.violations) {
        Json e;
        e["degree"] = x.degree;
        e["block_row"] = x.block_row;
        e["block_col"] = x.block_col;
        e["row"] = x.row;
        e["col"] = x.col;
        e["entry"] = x.entry;
        v.push_back(std::move(e));
    }
    out["violations"] = std::move(v);
    return out;
}

inline Json congruence_report_to_json(const CongruenceReport& rep) {
    Json out;
    out["ok"] = rep.ok;
    if (rep.first) {
        Json e;
        e["degree"] = rep.first->degree;
        e["row"] = rep.first->row;
        e["col"] = rep.first->col;
        e["lhs"] = rep.first->lhs;
        e["rhs"] = rep.first->rhs;
        out["first_discrepancy"] = std::move(e);
    }
    return out;
}

inline Json setting_report_to_json(const SettingReport& rep) {
    Json out;
    out["ok"] = rep.ok;
    out["qualifying_pairs"] = rep.qualifying_pairs;
    Json v = Json::array();
    for (const auto& x : rep.violations) {
        Json e;
        e["u"] = x.u;
        e["v"] = x.v;
        e["sum_f1"] = x.sum_f1;
        e["sum_f2"] = x.sum_f2;
        v.push_back(std::move(e));
    }
    out["violations"] = std::move(v);
    Json cv = Json::array();
    for (const auto& x : rep.complex_violations) {
        Json e;
        e["degree"] = x.degree;
        e["row"] = x.row;
        e["col"] = x.col;
        e["entry"] = x.entry;
        cv.push_back(std::move(e));
    }
    out["complex_violations"] = std::move(cv);
    return out;
}

} // namespace novmorse
