#pragma once

// Scenario files and the batch runner behind the command-line tool.  A
// scenario is a JSON document with named declarations (complexes, vector
// fields, circle functions, fundamental domains, cobordism packages,
// splittings, double cylinders) and a list of commands that run constructions
// or checks against them.  The runner executes commands in order and collects
// one report entry per command; reports are deterministic byte-for-byte.
//
// Schema version: "novmorse-scenario/1" for inputs, "novmorse-report/1" for
// the emitted report document.

#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "novmorse/json_io.hpp"

namespace novmorse {

inline constexpr const char* kScenarioSchema = "novmorse-scenario/1";
inline constexpr const char* kReportSchema = "novmorse-report/1";

struct Scenario {
    Json doc;

    const Json& section(const std::string& name) const {
        static const Json empty = Json::object();
        if (!doc.contains(name)) return empty;
        return doc.at(name);
    }

    const Json& declaration(const std::string& sect, const std::string& name) const {
        const Json& s = section(sect);
        if (!s.contains(name))
            throw NameResolution("no declaration '" + name + "' in '" + sect + "'");
        return s.at(name);
    }
};

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    Scenario s;
    try {
        in >> s.doc;
    } catch (const std::exception& e) {
        throw ParseError("scenario '" + path + "' is not valid JSON: " + e.what());
    }
    if (!s.doc.is_object() || !s.doc.contains("schema") ||
        s.doc.at("schema") != kScenarioSchema)
        throw ParseError("scenario '" + path + "' does not declare schema '" +
                         std::string(kScenarioSchema) + "'");
    return s;
}

namespace detail {

inline long long require_int(const Json& cmd, const std::string& key,
                             const std::string& op) {
    if (!cmd.contains(key))
        throw ParseError(op + ": missing required parameter '" + key + "'");
    if (!cmd.at(key).is_number_integer())
        throw ParseError(op + ": parameter '" + key + "' must be an integer");
    return cmd.at(key).get<long long>();
}

inline std::string require_name(const Json& cmd, const std::string& key,
                                const std::string& op) {
    if (!cmd.contains(key))
        throw ParseError(op + ": missing required parameter '" + key + "'");
    if (!cmd.at(key).is_string())
        throw ParseError(op + ": parameter '" + key + "' must be a string");
    return cmd.at(key).get<std::string>();
}

inline CellComplex resolve_complex(const Scenario& s, const std::string& name) {
    return cell_complex_from_json(s.declaration("complexes", name));
}

inline VectorField resolve_field(const Scenario& s, const std::string& name,
                                 const std::string& for_complex) {
    const Json& j = s.declaration("fields", name);
    if (j.contains("complex") && !for_complex.empty() &&
        j.at("complex").get<std::string>() != for_complex)
        throw NameResolution("field '" + name + "' is declared for complex '" +
                             j.at("complex").get<std::string>() +
                             "', not for '" + for_complex + "'");
    VectorField V;
    if (j.contains("pairs"))
        for (const auto& [src, tgt] : j.at("pairs").items())
            V.pairs[src] = tgt.get<std::string>();
    return V;
}

inline CircleFunction resolve_circle_function(const Scenario& s,
                                              const std::string& name) {
    const Json& j = s.declaration("circle_functions", name);
    CircleFunction f;
    if (j.contains("winding")) f.winding = j.at("winding").get<long long>();
    for (const auto& p : j.at("points"))
        f.points.push_back(CirclePoint{
            p.at("label").get<std::string>(), p.at("index").get<int>(),
            rational_from_json(p.at("value"), "circle point value")});
    return f;
}

// builtin fundamental domains, both the collared and the plain variant
inline FundamentalDomain resolve_domain(const Scenario& s,
                                        const std::string& name, bool collared) {
    const Json& j = s.declaration("domains", name);
    const std::string b = require_name(j, "builtin", "domain '" + name + "'");
    if (b == "circle") return circle_fd(collared);
    if (b == "torus_projection") return torus_projection_fd(collared);
    if (b == "torus_rich") return torus_rich_fd(collared);
    throw NameResolution("unknown builtin domain '" + b + "'");
}

inline AlgebraicCobordism resolve_gamma(const Scenario& s,
                                        const std::string& name) {
    const Json& j = s.declaration("gammas", name);
    if (j.contains("domain"))
        return extract_gamma(
            resolve_domain(s, j.at("domain").get<std::string>(), true));
    return gamma_from_json(j, "gamma '" + name + "'");
}

inline SplitExample resolve_splitting(const Scenario& s,
                                      const std::string& name) {
    const Json& j = s.declaration("splittings", name);
    if (j.contains("builtin")) {
        const std::string b = j.at("builtin").get<std::string>();
        if (b == "s2_equator") return sphere_equator_split();
        throw NameResolution("unknown builtin splitting '" + b + "'");
    }
    const std::string fiber = require_name(j, "fiber", "splitting '" + name + "'");
    auto N = resolve_complex(s, fiber);
    VectorField V_N;
    if (j.contains("field")) {
        V_N = resolve_field(s, j.at("field").get<std::string>(), fiber);
    } else if (j.contains("pairs")) {
        for (const auto& [src, tgt] : j.at("pairs").items())
            V_N.pairs[src] = tgt.get<std::string>();
    }
    return split_prism_example(N, V_N);
}

inline DoubleCylinder resolve_cylinder(const Scenario& s,
                                       const std::string& name) {
    const Json& j = s.declaration("cylinders", name);
    auto N = resolve_complex(s, require_name(j, "fiber", "cylinder '" + name + "'"));
    if (!j.contains("heights"))
        throw ParseError("cylinder '" + name + "': missing 'heights'");
    std::map<std::string, Rational> heights;
    for (const auto& [cell, q] : j.at("heights").items())
        heights[cell] = rational_from_json(q, "cylinder height");
    const Rational mu =
        rational_from_json(j.contains("mu") ? j.at("mu") : Json("1/8"), "mu");
    const Rational shift = rational_from_json(
        j.contains("shift") ? j.at("shift") : Json("1/16"), "shift");
    return double_cylinder_square(N, heights, mu, shift);
}

inline long long resolve_context_rank(const Scenario& s, const Json& cmd) {
    if (!cmd.contains("context")) return 0;
    const Json& j = s.declaration("contexts", cmd.at("context").get<std::string>());
    return j.contains("rank") ? j.at("rank").get<long long>() : 0;
}

} // namespace detail

struct CommandResult {
    Json entry;
    bool pass = true;
};

// Executes a single scenario command.  Malformed parameters, unresolvable
// names, and invalid inputs throw; failed checks come back as pass = false.
inline CommandResult run_command(const Scenario& s, const Json& cmd) {
    if (!cmd.is_object() || !cmd.contains("run"))
        throw ParseError("every command needs a 'run' key");
    const std::string op = cmd.at("run").get<std::string>();
    CommandResult res;
    res.entry["command"] = op;

    if (op == "verify") {
        if (cmd.contains("circle_function")) {
            const std::string fname = cmd.at("circle_function").get<std::string>();
            res.entry["circle_function"] = fname;
            auto f = detail::resolve_circle_function(s, fname);
            if (f.winding == 0) {
                auto C = circle_morse(f);
                auto rep = verify_complex(*C);
                res.entry["chain_check"] = complex_report_to_json(rep);
                res.pass = rep.ok;
            } else {
                const long long n = detail::require_int(cmd, "precision", "verify");
                res.entry["precision"] = n;
                auto C = circle_novikov(f, n);
                auto rep = verify_complex(*C);
                res.entry["chain_check"] = complex_report_to_json(rep);
                res.pass = rep.ok;
            }
        } else {
            const std::string cname = detail::require_name(cmd, "complex", "verify");
            res.entry["complex"] = cname;
            auto K = detail::resolve_complex(s, cname);
            if (cmd.contains("field")) {
                const std::string fname = cmd.at("field").get<std::string>();
                res.entry["field"] = fname;
                auto V = detail::resolve_field(s, fname, cname);
                auto M = morse_complex(K, V);
                auto rep = verify_complex(*M);
                res.entry["chain_check"] = complex_report_to_json(rep);
                res.pass = rep.ok;
            } else {
                auto crep = verify_cell_complex(K);
                res.entry["cell_check"] = cell_report_to_json(crep);
                res.pass = crep.ok;
                if (crep.ok) {
                    auto rep = verify_complex(*cellular_complex(K));
                    res.entry["chain_check"] = complex_report_to_json(rep);
                    res.pass = rep.ok;
                }
            }
            if (cmd.contains("matchings")) {
                const long long k = detail::require_int(cmd, "matchings", "verify");
                const long long seed =
                    cmd.contains("seed") ? detail::require_int(cmd, "seed", "verify")
                                         : 0;
                res.entry["matchings"] = k;
                res.entry["seed"] = seed;
                std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
                long long failed = 0;
                for (long long t = 0; t < k; ++t) {
                    auto V = random_acyclic_matching(K, rng);
                    if (!verify_complex(*morse_complex(K, V)).ok) ++failed;
                }
                res.entry["matchings_failed"] = failed;
                if (failed > 0) res.pass = false;
            }
        }
    } else if (op == "homology") {
        if (cmd.contains("circle_function")) {
            const std::string fname = cmd.at("circle_function").get<std::string>();
            res.entry["circle_function"] = fname;
            auto f = detail::resolve_circle_function(s, fname);
            if (f.winding == 0) {
                auto H = homology_Z(*circle_morse(f));
                res.entry["groups"] = homology_to_json(H);
                res.entry["text"] = homology_to_text(H);
            } else {
                const long long n = detail::require_int(cmd, "precision", "homology");
                res.entry["precision"] = n;
                auto ranks = novikov_ranks(*circle_novikov(f, n));
                Json r = Json::object();
                for (const auto& [deg, rank] : ranks)
                    r[std::to_string(deg)] = rank;
                res.entry["novikov_ranks"] = std::move(r);
            }
        } else {
            const std::string cname = detail::require_name(cmd, "complex", "homology");
            res.entry["complex"] = cname;
            auto K = detail::resolve_complex(s, cname);
            std::shared_ptr<ChainComplex<I64Ring>> C;
            if (cmd.contains("field")) {
                const std::string fname = cmd.at("field").get<std::string>();
                res.entry["field"] = fname;
                C = morse_complex(K, detail::resolve_field(s, fname, cname));
            } else {
                C = cellular_complex(K);
            }
            auto H = homology_Z(*C);
            res.entry["groups"] = homology_to_json(H);
            res.entry["text"] = homology_to_text(H);
        }
    } else if (op == "assemble") {
        const std::string gname = detail::require_name(cmd, "gamma", "assemble");
        const long long n = detail::require_int(cmd, "precision", "assemble");
        res.entry["gamma"] = gname;
        res.entry["precision"] = n;
        auto g = detail::resolve_gamma(s, gname);
        auto grep = validate_gamma(g, n);
        res.entry["gamma_check"] = gamma_report_to_json(grep);
        res.pass = grep.ok;
        if (grep.ok) {
            auto fhat = assemble_fhat(g, n);
            res.entry["assembled"] = complex_to_json(fhat);
            auto rep = verify_complex(fhat);
            res.entry["chain_check"] = complex_report_to_json(rep);
            res.pass = rep.ok;
        }
    } else if (op == "glue-check") {
        const std::string sname = detail::require_name(cmd, "splitting", "glue-check");
        res.entry["splitting"] = sname;
        auto ex = detail::resolve_splitting(s, sname);
        auto rep = glue_check(ex.data);
        res.entry["report"] = glue_report_to_json(rep);
        res.pass = rep.ok;
    } else if (op == "unroll-compare") {
        const std::string dname = detail::require_name(cmd, "domain", "unroll-compare");
        const long long stages = detail::require_int(cmd, "stages", "unroll-compare");
        if (stages < 1)
            throw ParseError("unroll-compare: 'stages' must be >= 1");
        res.entry["domain"] = dname;
        res.entry["stages"] = stages;
        auto g = extract_gamma(detail::resolve_domain(s, dname, true));
        auto fhat = assemble_fhat(g, stages + 1);
        auto direct = z_graded_morse(detail::resolve_domain(s, dname, false), stages);
        auto rep = diff_congruence(fhat, *direct, stages + 1);
        res.entry["report"] = congruence_report_to_json(rep);
        if (rep.ok) res.entry["congruence_order"] = stages + 1;
        res.pass = rep.ok;
    } else if (op == "invert") {
        const std::string text = detail::require_name(cmd, "element", "invert");
        const long long n = detail::require_int(cmd, "precision", "invert");
        const long long rank = detail::resolve_context_rank(s, cmd);
        res.entry["element"] = text;
        res.entry["precision"] = n;
        if (rank > 0) res.entry["twist"] = rank;
        NovRing ring(make_untwisted_context(rank));
        auto e = parse_element(ring.ctx, text);
        auto inv = invert_unit(e, n);
        res.entry["inverse"] = to_string(inv);
        res.entry["certified"] = inv.precision();
    } else if (op == "setting-check") {
        const std::string cname = detail::require_name(cmd, "cylinder", "setting-check");
        res.entry["cylinder"] = cname;
        auto dc = detail::resolve_cylinder(s, cname);
        const Rational eps =
            cmd.contains("epsilon")
                ? rational_from_json(cmd.at("epsilon"), "epsilon")
                : dc.eps;
        res.entry["epsilon"] = rational_to_string(eps);
        auto rep = setting_check(*dc.C, dc.f0, dc.f1, dc.f2, dc.f3, eps);
        res.entry["report"] = setting_report_to_json(rep);
        res.pass = rep.ok;
    } else {
        throw UnknownCommand("unknown command '" + op + "'");
    }
    res.entry["status"] = res.pass ? "pass" : "fail";
    return res;
}

struct RunOutcome {
    Json report;
    bool pass = true;
};

// Runs every scenario command whose 'run' equals `only` (all when empty) and
// assembles the report document.  With timings enabled, each entry carries
// its wall-clock duration; those fields are excluded from the determinism
// guarantee and off by default.
inline RunOutcome run_scenario(const Scenario& s, const std::string& only,
                               bool timings) {
    RunOutcome out;
    out.report["schema"] = kReportSchema;
    Json entries = Json::array();
    if (s.doc.contains("commands")) {
        if (!s.doc.at("commands").is_array())
            throw ParseError("'commands' must be an array");
        for (const auto& cmd : s.doc.at("commands")) {
            if (!only.empty() &&
                (!cmd.is_object() || !cmd.contains("run") ||
                 cmd.at("run") != only))
                continue;
            const auto start = std::chrono::steady_clock::now();
            auto res = run_command(s, cmd);
            if (timings) {
                const auto ms =
                    std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
                res.entry["elapsed_ms"] = ms;
            }
            entries.push_back(std::move(res.entry));
            out.pass = out.pass && res.pass;
        }
    }
    out.report["commands"] = std::move(entries);
    out.report["status"] = out.pass ? "pass" : "fail";
    return out;
}

// -- plain-text rendering ----------------------------------------------------

inline std::string render_entry_text(const Json& e) {
    std::ostringstream out;
    const std::string op = e.at("command").get<std::string>();
    out << op;
    for (const char* key : {"complex", "field", "circle_function", "gamma",
                            "splitting", "domain", "cylinder", "element"})
        if (e.contains(key) && e.at(key).is_string())
            out << " " << e.at(key).get<std::string>();
    if (e.contains("precision")) out << " (mod z^" << e.at("precision") << ")";
    if (e.contains("stages")) out << " stages " << e.at("stages");
    if (e.contains("epsilon"))
        out << " epsilon " << e.at("epsilon").get<std::string>();
    out << ": ";
    if (op == "homology") {
        if (e.contains("text")) out << e.at("text").get<std::string>();
        else out << e.at("novikov_ranks").dump();
    } else if (op == "invert") {
        out << e.at("inverse").get<std::string>();
        const long long cert = e.at("certified").get<long long>();
        if (cert != NovElem::EXACT) out << " (certified mod z^" << cert << ")";
    } else {
        out << e.at("status").get<std::string>();
        if (e.contains("congruence_order"))
            out << " (congruence order " << e.at("congruence_order") << ")";
        if (e.contains("report") && e.at("report").contains("qualifying_pairs"))
            out << " (" << e.at("report").at("qualifying_pairs")
                << " qualifying pairs)";
    }
    out << "\n";
    // discrepancy details, one indented line each
    auto detail_lines = [&](const Json& rep) {
        for (const char* key : {"violations", "discrepancies"}) {
            if (!rep.contains(key) || !rep.at(key).is_array()) continue;
            for (const auto& v : rep.at(key)) {
                out << "  ";
                if (v.is_string()) {
                    out << v.get<std::string>();
                } else if (v.contains("entry")) {
                    out << "degree " << v.at("degree") << " (" << v.at("row")
                        << "," << v.at("col") << "): "
                        << v.at("entry").get<std::string>();
                } else if (v.contains("u")) {
                    out << "pair (" << v.at("u").get<std::string>() << ", "
                        << v.at("v").get<std::string>() << "): "
                        << v.at("sum_f1").get<std::string>() << " + "
                        << v.at("sum_f2").get<std::string>() << " != 0";
                }
                out << "\n";
            }
        }
        if (rep.contains("first_discrepancy")) {
            const auto& v = rep.at("first_discrepancy");
            out << "  degree " << v.at("degree") << " (" << v.at("row") << ","
                << v.at("col") << "): " << v.at("lhs").get<std::string>()
                << " vs " << v.at("rhs").get<std::string>() << "\n";
        }
    };
    for (const char* key : {"cell_check", "chain_check", "gamma_check", "report"})
        if (e.contains(key)) detail_lines(e.at(key));
    return out.str();
}

inline std::string render_report_text(const Json& report) {
    std::ostringstream out;
    for (const auto& e : report.at("commands")) out << render_entry_text(e);
    out << "status: " << report.at("status").get<std::string>() << "\n";
    return out.str();
}

} // namespace novmorse
