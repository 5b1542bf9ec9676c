// Batch front end: loads a scenario file, runs constructions and checks
// against its declarations, and prints a deterministic report.
//
//   novmorse <subcommand> <scenario.json> [flags]
//
// Subcommands either run every matching command from the scenario's command
// list, or a single ad-hoc command when a target flag (--complex, --gamma,
// ...) is given.  `report` runs the whole list.  Exit codes: 0 when every
// check passes, 1 when a check reports a discrepancy, 2 for unusable input
// (bad file, bad schema, unknown names or commands, malformed parameters).

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "novmorse/scenario.hpp"

namespace {

using novmorse::Json;

struct CommonOpts {
    std::string scenario_path;
    std::string format; // "json" or "text"
    bool timings = false;
};

void add_common(CLI::App* sub, CommonOpts& o, const std::string& default_format) {
    sub->add_option("scenario", o.scenario_path, "scenario file (JSON)")
        ->required();
    o.format = default_format;
    sub->add_option("--format", o.format, "output format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--timings", o.timings,
                  "include wall-clock timings (breaks byte determinism)");
}

int emit_and_exit(const novmorse::RunOutcome& out, const CommonOpts& o) {
    if (o.format == "text")
        std::cout << novmorse::render_report_text(out.report);
    else
        std::cout << out.report.dump(2) << "\n";
    return out.pass ? 0 : 1;
}

// run a single ad-hoc command, or every scenario command of the given kind
int run_subcommand(const CommonOpts& o, const std::string& op,
                   const std::optional<Json>& adhoc) {
    auto scenario = novmorse::load_scenario(o.scenario_path);
    novmorse::RunOutcome out;
    if (adhoc) {
        out.report["schema"] = novmorse::kReportSchema;
        auto res = novmorse::run_command(scenario, *adhoc);
        out.pass = res.pass;
        out.report["commands"] = Json::array({std::move(res.entry)});
        out.report["status"] = out.pass ? "pass" : "fail";
    } else {
        out = novmorse::run_scenario(scenario, op, o.timings);
        if (!op.empty() && out.report.at("commands").empty())
            throw novmorse::ParseError(
                "scenario has no '" + op +
                "' commands and no target was given on the command line");
    }
    return emit_and_exit(out, o);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact chain-level checks for circle-valued Morse data"};
    app.require_subcommand(1);

    // --- verify ---------------------------------------------------------
    auto* verify = app.add_subcommand(
        "verify", "check d^2 = 0 for a complex, Morse complex, or circle function");
    CommonOpts vo;
    add_common(verify, vo, "text");
    std::string v_complex, v_field, v_circle;
    long long v_matchings = -1, v_seed = 0, v_precision = -1;
    verify->add_option("--complex", v_complex, "complex to verify");
    verify->add_option("--field", v_field, "vector field (verify its Morse complex)");
    verify->add_option("--circle-function", v_circle, "circle function to verify");
    verify->add_option("--matchings", v_matchings,
                       "additionally verify this many random matchings");
    verify->add_option("--seed", v_seed, "seed for --matchings (default 0)");
    verify->add_option("--precision", v_precision,
                       "truncation order for winding circle functions");

    // --- homology -------------------------------------------------------
    auto* homology = app.add_subcommand(
        "homology", "integer homology of a complex or Morse complex");
    CommonOpts ho;
    add_common(homology, ho, "text");
    std::string h_complex, h_field, h_circle;
    long long h_precision = -1;
    homology->add_option("--complex", h_complex, "complex to compute");
    homology->add_option("--field", h_field, "vector field (use its Morse complex)");
    homology->add_option("--circle-function", h_circle,
                         "circle function (ranks over the series ring when winding)");
    homology->add_option("--precision", h_precision,
                         "truncation order for winding circle functions");

    // --- assemble -------------------------------------------------------
    auto* assemble = app.add_subcommand(
        "assemble", "assemble the truncated total complex of a cobordism package");
    CommonOpts ao;
    add_common(assemble, ao, "text");
    std::string a_gamma;
    long long a_precision = -1;
    assemble->add_option("--gamma", a_gamma, "cobordism package to assemble");
    assemble->add_option("--precision", a_precision, "truncation order (required)");

    // --- glue-check -----------------------------------------------------
    auto* glue = app.add_subcommand(
        "glue-check", "compare a splitting's composite against its unsplit complex");
    CommonOpts go;
    add_common(glue, go, "text");
    std::string g_splitting;
    glue->add_option("--splitting", g_splitting, "splitting to check");

    // --- unroll-compare -------------------------------------------------
    auto* unroll = app.add_subcommand(
        "unroll-compare",
        "compare the assembled count of a fundamental domain with its unrolled count");
    CommonOpts uo;
    add_common(unroll, uo, "text");
    std::string u_domain;
    long long u_stages = -1;
    unroll->add_option("--domain", u_domain, "fundamental domain to compare");
    unroll->add_option("--stages", u_stages, "number of unrolled copies (required)");

    // --- invert ---------------------------------------------------------
    auto* invert = app.add_subcommand(
        "invert", "invert a unit of the truncated series ring");
    CommonOpts io;
    add_common(invert, io, "text");
    std::string i_element, i_context;
    long long i_precision = -1;
    invert->add_option("--element", i_element, "element text, e.g. \"1*z^0 + 1*z^1\"");
    invert->add_option("--precision", i_precision, "truncation order (required)");
    invert->add_option("--context", i_context, "declared ring context name");

    // --- setting-check --------------------------------------------------
    auto* setting = app.add_subcommand(
        "setting-check", "two-parameter cancellation identity on a double cylinder");
    CommonOpts so;
    add_common(setting, so, "text");
    std::string s_cylinder, s_epsilon;
    setting->add_option("--cylinder", s_cylinder, "double cylinder to check");
    setting->add_option("--epsilon", s_epsilon,
                        "value window (rational; default comes from the cylinder)");

    // --- report ---------------------------------------------------------
    auto* report = app.add_subcommand(
        "report", "run the scenario's full command list and print the report");
    CommonOpts ro;
    add_common(report, ro, "json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (verify->parsed()) {
            std::optional<Json> cmd;
            if (!v_complex.empty() || !v_circle.empty()) {
                Json c;
                c["run"] = "verify";
                if (!v_circle.empty()) c["circle_function"] = v_circle;
                else c["complex"] = v_complex;
                if (!v_field.empty()) c["field"] = v_field;
                if (v_matchings >= 0) c["matchings"] = v_matchings;
                if (verify->count("--seed")) c["seed"] = v_seed;
                if (v_precision >= 0) c["precision"] = v_precision;
                cmd = std::move(c);
            }
            return run_subcommand(vo, "verify", cmd);
        }
        if (homology->parsed()) {
            std::optional<Json> cmd;
            if (!h_complex.empty() || !h_circle.empty()) {
                Json c;
                c["run"] = "homology";
                if (!h_circle.empty()) c["circle_function"] = h_circle;
                else c["complex"] = h_complex;
                if (!h_field.empty()) c["field"] = h_field;
                if (h_precision >= 0) c["precision"] = h_precision;
                cmd = std::move(c);
            }
            return run_subcommand(ho, "homology", cmd);
        }
        if (assemble->parsed()) {
            std::optional<Json> cmd;
            if (!a_gamma.empty()) {
                Json c;
                c["run"] = "assemble";
                c["gamma"] = a_gamma;
                if (a_precision >= 0) c["precision"] = a_precision;
                cmd = std::move(c);
            }
            return run_subcommand(ao, "assemble", cmd);
        }
        if (glue->parsed()) {
            std::optional<Json> cmd;
            if (!g_splitting.empty()) {
                Json c;
                c["run"] = "glue-check";
                c["splitting"] = g_splitting;
                cmd = std::move(c);
            }
            return run_subcommand(go, "glue-check", cmd);
        }
        if (unroll->parsed()) {
            std::optional<Json> cmd;
            if (!u_domain.empty()) {
                Json c;
                c["run"] = "unroll-compare";
                c["domain"] = u_domain;
                if (u_stages >= 0) c["stages"] = u_stages;
                cmd = std::move(c);
            }
            return run_subcommand(uo, "unroll-compare", cmd);
        }
        if (invert->parsed()) {
            std::optional<Json> cmd;
            if (!i_element.empty()) {
                Json c;
                c["run"] = "invert";
                c["element"] = i_element;
                if (i_precision >= 0) c["precision"] = i_precision;
                if (!i_context.empty()) c["context"] = i_context;
                cmd = std::move(c);
            }
            return run_subcommand(io, "invert", cmd);
        }
        if (setting->parsed()) {
            std::optional<Json> cmd;
            if (!s_cylinder.empty()) {
                Json c;
                c["run"] = "setting-check";
                c["cylinder"] = s_cylinder;
                if (!s_epsilon.empty()) c["epsilon"] = s_epsilon;
                cmd = std::move(c);
            }
            return run_subcommand(so, "setting-check", cmd);
        }
        if (report->parsed()) return run_subcommand(ro, "", std::nullopt);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const novmorse::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
