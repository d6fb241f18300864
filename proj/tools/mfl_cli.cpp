// mfl: command-line front end.
//
// Exit status: 0 success / verdict holds, 2 verdict violated, 1 usage, input or precondition error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfl/acceptance.hpp"
#include "mfl/bol.hpp"
#include "mfl/config.hpp"
#include "mfl/continuation.hpp"
#include "mfl/experiments.hpp"
#include "mfl/grid_solver.hpp"
#include "mfl/io.hpp"
#include "mfl/pipeline.hpp"
#include "mfl/radial_solver.hpp"
#include "mfl/rearrange.hpp"
#include "mfl/report_json.hpp"

namespace {

using namespace mfl;

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_violated = 2;

struct UsageError : Error {
    using Error::Error;
};

// Problem flags shared by solve, uniqueness and sweep; flags override the config file.
struct ProblemFlags {
    std::string config;
    std::string rho;
    std::string domain;
    std::string mode;
    std::optional<double> inner;
    std::optional<double> outer;
    std::optional<std::size_t> radial_nodes;
    std::optional<int> grid_nodes;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "JSON configuration file");
        app->add_option("--rho", rho, "mass, e.g. 4pi or 12.5");
        app->add_option("--domain", domain, "disc or annulus");
        app->add_option("--mode", mode, "mean_field or liouville");
        app->add_option("--inner", inner, "annulus inner radius");
        app->add_option("--outer", outer, "outer radius");
        app->add_option("--radial-nodes", radial_nodes, "radial mesh nodes");
        app->add_option("--grid-nodes", grid_nodes, "grid nodes per side");
    }

    [[nodiscard]] RunConfig resolve() const {
        RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
        ProblemSpec& s = cfg.spec;
        if (!rho.empty()) {
            try {
                s.rho = parse_mass(rho);
            } catch (const ParseError& e) {
                throw UsageError(std::string("--rho: ") + e.what());
            }
        }
        if (!domain.empty()) {
            if (domain == "disc") {
                s.shape = DomainShape::disc;
                s.inner_radius = 0.0;
            } else if (domain == "annulus") {
                s.shape = DomainShape::annulus;
                if (s.inner_radius == 0.0 && !inner) s.inner_radius = 0.3;
            } else {
                throw UsageError("--domain must be disc or annulus");
            }
        }
        if (!mode.empty()) {
            if (mode == "mean_field") {
                s.mode = EquationMode::mean_field;
            } else if (mode == "liouville") {
                s.mode = EquationMode::liouville;
            } else {
                throw UsageError("--mode must be mean_field or liouville");
            }
        }
        if (inner) s.inner_radius = *inner;
        if (outer) s.outer_radius = *outer;
        if (radial_nodes) s.radial_nodes = *radial_nodes;
        if (grid_nodes) s.grid_nodes = *grid_nodes;
        s.validate();
        return cfg;
    }
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(path + ": cannot write");
    out << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(parse_mass(item));
        } catch (const ParseError& e) {
            throw UsageError(std::string(flag) + ": " + e.what());
        }
    }
    if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
    return out;
}

nlohmann::json solution_meta(const ProblemSpec& s, double mass, double normalization, const char* solver) {
    return {{"rho", s.rho}, {"mode", to_string(s.mode)}, {"mass", mass}, {"normalization", normalization}, {"solver", solver}};
}

// Mean-field solutions carry the factor rho / int(K e^u); adding its log gives the Liouville form
// Delta w + K e^w = f that the Bol and pipeline checks expect.
template <class Field>
Field liouville_form(const Field& u, const nlohmann::json& extra, bool as_is, std::string& note) {
    if (as_is || extra.value("mode", "") != "mean_field") return u;
    const double n = extra.value("normalization", 1.0);
    if (!(n > 0.0) || n == 1.0) return u;
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x += std::log(n);
    note = "shifted by ln(normalization) = " + std::to_string(std::log(n)) + " to the Liouville form";
    if constexpr (std::is_same_v<Field, RadialField>) {
        return RadialField(u.mesh(), std::move(v));
    } else {
        return ScalarField2D(u.grid_ptr(), std::move(v));
    }
}

int verdict_status(const std::vector<BolVerdict>& verdicts) {
    bool violated = false, refused = false;
    for (auto v : verdicts) {
        violated = violated || v == BolVerdict::violated;
        refused = refused || v == BolVerdict::not_applicable;
    }
    if (violated) return exit_violated;
    return refused ? exit_error : exit_ok;
}

// ---------------------------------------------------------------------------

int cmd_solve(const ProblemFlags& pf, const std::string& solver, const std::string& out, const std::string& report) {
    const RunConfig cfg = pf.resolve();
    const ProblemSpec& s = cfg.spec;
    nlohmann::json rep_json;
    std::ostringstream csv;
    bool ok = false;
    if (solver == "radial") {
        const auto rep = solve_radial(s);
        rep_json = to_json(rep);
        ok = rep.converged();
        if (ok) write_field_csv(csv, rep.field(), solution_meta(s, rep.mass, rep.normalization, "radial"));
    } else if (solver == "grid") {
        const auto rep = solve_2d(s);
        rep_json = to_json(rep);
        ok = rep.converged();
        if (ok) write_field_csv(csv, rep.field(), solution_meta(s, rep.mass, rep.normalization, "grid"));
    } else {
        throw UsageError("--solver must be radial or grid");
    }
    const auto doc = document("solve", {{"problem", to_json(s)}, {"solver", solver}, {"result", rep_json}});
    if (!ok) {
        std::cerr << "mfl solve: " << rep_json.value("status", "") << ": " << rep_json.value("message", "") << "\n";
        if (!report.empty()) write_text(report, dump(doc));
        return exit_error;
    }
    write_text(out, csv.str());
    if (!report.empty()) {
        write_text(report, dump(doc));
    } else if (!out.empty() && out != "-") {
        std::cout << dump(doc);
    }
    return exit_ok;
}

struct VerifyFlags {
    std::string field;
    std::string mode = "interior";
    std::string rho;
    std::size_t levels = 8;
    std::vector<double> level_values;
    bool as_is = false;
    bool csv = false;
    std::string out;
};

struct CheckRow {
    std::string mode;
    std::optional<double> level;
    nlohmann::json body;
    BolVerdict verdict;
};

std::vector<CheckRow> radial_checks(const RadialField& w, const VerifyFlags& f) {
    std::vector<CheckRow> rows;
    if (f.mode == "interior") {
        if (!w.mesh().is_disc()) throw UsageError("interior level checks need a disc field");
        auto levels = f.level_values.empty() ? interior_thresholds(w, f.levels) : f.level_values;
        if (levels.empty()) throw PreconditionFailed("no level lies strictly above the boundary value");
        for (double t : levels) {
            const auto r = check_interior_bol(w, w, t);
            rows.push_back({f.mode, t, to_json(r), r.bol.verdict});
        }
    } else if (f.mode == "radial-interior") {
        const auto r = check_radial_interior(w);
        rows.push_back({f.mode, std::nullopt, to_json(r), r.verdict});
    } else if (f.mode == "exterior") {
        const auto r = check_radial_exterior(w);
        rows.push_back({f.mode, std::nullopt, to_json(r), r.verdict});
    } else if (f.mode == "boundary") {
        if (f.rho.empty()) throw UsageError("--mode boundary needs --rho");
        const auto r = boundary_comparison(w, parse_mass(f.rho));
        rows.push_back({f.mode, std::nullopt, to_json(r), r.verdict});
    } else if (f.mode == "differential") {
        const auto d = w.mesh().is_disc() ? differential_condition_interior(w) : differential_condition_exterior(w);
        rows.push_back({f.mode, std::nullopt, to_json(d), d.holds() ? BolVerdict::holds : BolVerdict::violated});
    } else {
        throw UsageError("--mode must be interior, radial-interior, exterior, boundary or differential");
    }
    return rows;
}

std::vector<CheckRow> grid_checks(const ScalarField2D& w, const VerifyFlags& f) {
    if (f.mode != "interior") throw UsageError("grid fields support --mode interior only");
    auto levels = f.level_values.empty() ? interior_thresholds(w, f.levels) : f.level_values;
    if (levels.empty()) throw PreconditionFailed("no level set stays inside the domain");
    std::vector<CheckRow> rows;
    for (double t : levels) {
        const auto r = check_interior_bol(w, w, t);
        auto body = to_json(r);
        body["topology"] = {{"components", level_topology(w, t).components}, {"holes", level_topology(w, t).holes}};
        rows.push_back({f.mode, t, body, r.bol.verdict});
    }
    return rows;
}

int cmd_verify(const VerifyFlags& f) {
    const auto file = load_field(f.field);
    std::string note;
    std::vector<CheckRow> rows = file.is_radial() ? radial_checks(liouville_form(file.radial(), file.extra(), f.as_is, note), f)
                                                  : grid_checks(liouville_form(file.grid(), file.extra(), f.as_is, note), f);
    std::vector<BolVerdict> verdicts;
    for (const auto& r : rows) verdicts.push_back(r.verdict);
    const int status = verdict_status(verdicts);
    if (f.csv) {
        std::ostringstream os;
        os << "mode,level,lhs,rhs,defect,tolerance,mass,verdict\n";
        for (const auto& r : rows) {
            const auto& b = r.body;
            auto col = [&](const char* k) { return b.contains(k) ? b.at(k).dump() : std::string(); };
            os << r.mode << ',' << (r.level ? std::to_string(*r.level) : "") << ',' << col("lhs") << ',' << col("rhs") << ','
               << col("defect") << ',' << col("tolerance") << ',' << col("mass") << ',' << to_string(r.verdict) << '\n';
        }
        write_text(f.out, os.str());
    } else {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& r : rows) {
            auto c = r.body;
            c["mode"] = r.mode;
            c["level"] = r.level ? nlohmann::json(*r.level) : nlohmann::json(nullptr);
            c["verdict"] = to_string(r.verdict);
            checks.push_back(c);
        }
        write_text(f.out, dump(document("verify-bol", {{"field", f.field}, {"note", note}, {"checks", checks},
                                                       {"exit_status", status}})));
    }
    if (status == exit_error) std::cerr << "mfl verify-bol: a hypothesis of the check does not hold (not-applicable)\n";
    return status;
}

int cmd_rearrange(const std::string& phi_path, const std::string& u_path, std::optional<double> lambda, double R,
                  std::size_t thresholds, const std::string& out, const std::string& report) {
    const auto phi = load_field(phi_path);
    const auto u = load_field(u_path);
    if (phi.is_radial() != u.is_radial()) throw UsageError("phi and u must both be radial or both be grid fields");
    const RearrangeOptions opts{.thresholds = thresholds};
    auto run = [&](const auto& p, const auto& w) {
        const BubbleParam lam = lambda ? BubbleParam(*lambda) : lambda_from_ball_mass(rearrangement_mass(p, w), R);
        return rearrange(p, w, lam, R, opts);
    };
    const RearrangementResult res = phi.is_radial() ? run(phi.radial(), u.radial()) : run(phi.grid(), u.grid());
    std::ostringstream csv;
    write_rearrangement_csv(csv, res);
    write_text(out, csv.str());
    if (!report.empty()) write_text(report, dump(document("rearrange", to_json(res))));
    return exit_ok;
}

int cmd_pipeline(const std::string& a, const std::string& b, bool as_is, std::size_t thresholds, const std::string& out,
                 const std::string& psi_csv) {
    const auto f1 = load_field(a);
    const auto f2 = load_field(b);
    if (f1.is_radial() != f2.is_radial()) throw UsageError("both solutions must be radial or both grid fields");
    PipelineOptions opts;
    opts.thresholds = thresholds;
    std::string n1, n2;
    const PipelineReport rep =
        f1.is_radial()
            ? theorem_pipeline(liouville_form(f1.radial(), f1.extra(), as_is, n1), liouville_form(f2.radial(), f2.extra(), as_is, n2), opts)
            : theorem_pipeline(liouville_form(f1.grid(), f1.extra(), as_is, n1), liouville_form(f2.grid(), f2.extra(), as_is, n2), opts);
    const int status = !rep.applicable ? exit_error : rep.contradiction ? exit_violated : exit_ok;
    write_text(out, dump(document("pipeline", {{"w1", a}, {"w2", b}, {"report", to_json(rep)}, {"exit_status", status}})));
    if (!psi_csv.empty() && rep.psi) {
        std::ostringstream os;
        os << std::setprecision(12) << "r,psi,U_lambda\n";
        const BubbleParam lam(rep.lambda);
        for (std::size_t i = 0; i < rep.psi->size(); ++i) {
            const double r = rep.psi->mesh()[i];
            os << r << ',' << (*rep.psi)[i] << ',' << bubble_value(lam, r) << '\n';
        }
        write_text(psi_csv, os.str());
    }
    if (!rep.applicable) std::cerr << "mfl pipeline: not applicable: " << rep.failed_hypothesis << "\n";
    return status;
}

int cmd_uniqueness(const ProblemFlags& pf, std::optional<std::size_t> starts, std::optional<std::uint64_t> seed,
                   double cluster_tol, const std::string& out) {
    const RunConfig cfg = pf.resolve();
    const auto rep = uniqueness_experiment(cfg.spec, starts.value_or(cfg.starts), seed.value_or(cfg.seed), cluster_tol);
    write_text(out, dump(document("uniqueness", {{"problem", to_json(cfg.spec)}, {"report", to_json(rep)}})));
    if (rep.converged == 0) {
        std::cerr << "mfl uniqueness: no start converged\n" << rep.diagnostics;
        return exit_error;
    }
    return rep.distinct > 1 ? exit_violated : exit_ok;
}

int cmd_sweep(const ProblemFlags& pf, const std::string& rho_list, const std::string& eps_list, const std::string& solver,
              const std::string& csv_path, const std::string& out) {
    const RunConfig cfg = pf.resolve();
    if (rho_list.empty() == eps_list.empty()) throw UsageError("give exactly one of --rho-list and --eps-list");
    std::ostringstream csv;
    csv << std::setprecision(12);
    nlohmann::json body;
    bool truncated = false;
    if (!rho_list.empty()) {
        if (solver != "radial" && solver != "grid") throw UsageError("--solver must be radial or grid");
        const auto res = continuation_sweep(cfg.spec, parse_list(rho_list, "--rho-list"),
                                            solver == "radial" ? SolverKind::radial : SolverKind::grid);
        csv << "rho,u_max,center,status\n";
        for (const auto& p : res.points) csv << p.rho << ',' << p.u_max << ',' << p.center << ',' << p.status << '\n';
        body = {{"problem", to_json(cfg.spec)}, {"solver", solver}, {"sweep", to_json(res)}};
        truncated = res.truncated;
    } else {
        const auto res = critical_sweep(cfg.spec, parse_list(eps_list, "--eps-list"));
        csv << "eps,rho,u_max,exact_u_max,concentration_radius,exact_concentration,relative_error,status\n";
        for (const auto& r : res.rows) {
            csv << r.eps << ',' << r.rho << ',' << r.u_max << ',' << r.exact_u_max << ',' << r.concentration_radius << ','
                << r.exact_concentration << ',' << r.relative_error << ',' << r.status << '\n';
        }
        body = {{"problem", to_json(cfg.spec)}, {"critical_sweep", to_json(res)}};
        truncated = res.truncated;
    }
    if (!csv_path.empty()) write_text(csv_path, csv.str());
    write_text(out, dump(document("sweep", body)));
    return truncated ? exit_error : exit_ok;
}

int cmd_oracle(const std::vector<int>& which, bool as_json) {
    const auto results = run_acceptance(which);
    nlohmann::json rows = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        if (as_json) {
            rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"seconds", r.seconds}, {"detail", r.detail}});
        } else {
            std::printf("%s criterion %d (%s) [%.2f s]: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds,
                        r.detail.c_str());
            std::fflush(stdout);
        }
    }
    if (as_json) std::cout << dump(document("oracle", {{"criteria", rows}, {"pass", all}}));
    return all ? exit_ok : exit_violated;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-field equation solver, rearrangement and Bol inequality checks"};
    app.require_subcommand(1);

    ProblemFlags solve_pf;
    std::string solve_solver = "radial", solve_out, solve_report;
    auto* solve = app.add_subcommand("solve", "solve a problem; writes a solution CSV and a JSON report");
    solve_pf.attach(solve);
    solve->add_option("--solver", solve_solver, "radial or grid")->capture_default_str();
    solve->add_option("-o,--out", solve_out, "solution CSV (default stdout)");
    solve->add_option("--report", solve_report, "report JSON");

    VerifyFlags vf;
    auto* verify = app.add_subcommand("verify-bol", "check Bol-type inequalities on a field CSV");
    verify->add_option("field", vf.field, "field CSV")->required();
    verify->add_option("--mode", vf.mode, "interior, radial-interior, exterior, boundary or differential")->capture_default_str();
    verify->add_option("--rho", vf.rho, "bubble mass for --mode boundary");
    verify->add_option("--levels", vf.levels, "number of sampled level sets")->capture_default_str();
    verify->add_option("--level", vf.level_values, "explicit level (repeatable)");
    verify->add_flag("--as-is", vf.as_is, "do not shift mean-field solutions to the Liouville form");
    verify->add_flag("--csv", vf.csv, "one CSV row per check instead of JSON");
    verify->add_option("-o,--out", vf.out, "output file (default stdout)");

    std::string r_phi, r_u, r_out, r_report;
    std::optional<double> r_lambda;
    double r_R = 1.0;
    std::size_t r_thresholds = 0;
    auto* rearr = app.add_subcommand("rearrange", "equimeasurable rearrangement into a bubble; writes r,t,a CSV");
    rearr->add_option("--phi", r_phi, "field CSV to rearrange")->required();
    rearr->add_option("--u", r_u, "field CSV defining the source measure e^u")->required();
    rearr->add_option("--lambda", r_lambda, "bubble scale (default: matched to the mass of e^u)");
    rearr->add_option("--R", r_R, "target ball radius")->capture_default_str();
    rearr->add_option("--thresholds", r_thresholds, "0 uses every gap between sampled values")->capture_default_str();
    rearr->add_option("-o,--out", r_out, "result CSV (default stdout)");
    rearr->add_option("--report", r_report, "metadata JSON");

    std::string p_a, p_b, p_out, p_psi;
    bool p_as_is = false;
    std::size_t p_thresholds = 32;
    auto* pipe = app.add_subcommand("pipeline", "run the uniqueness pipeline on two solution CSVs");
    pipe->add_option("w1", p_a, "first solution CSV")->required();
    pipe->add_option("w2", p_b, "second solution CSV")->required();
    pipe->add_option("--thresholds", p_thresholds, "gradient-table rows")->capture_default_str();
    pipe->add_flag("--as-is", p_as_is, "do not shift mean-field solutions to the Liouville form");
    pipe->add_option("-o,--out", p_out, "report JSON (default stdout)");
    pipe->add_option("--psi", p_psi, "plot data r,psi,U_lambda");

    ProblemFlags uniq_pf;
    std::optional<std::size_t> u_starts;
    std::optional<std::uint64_t> u_seed;
    double u_tol = 1e-5;
    std::string u_out;
    auto* uniq = app.add_subcommand("uniqueness", "grid solves from seeded random starts, clustered");
    uniq_pf.attach(uniq);
    uniq->add_option("--starts", u_starts, "number of starts (config default 10)");
    uniq->add_option("--seed", u_seed, "generator seed (config default 42)");
    uniq->add_option("--cluster-tol", u_tol, "sup-distance for one cluster")->capture_default_str();
    uniq->add_option("-o,--out", u_out, "report JSON (default stdout)");

    ProblemFlags sweep_pf;
    std::string s_rho, s_eps, s_solver = "radial", s_csv, s_out;
    auto* sweep = app.add_subcommand("sweep", "solution branch over a list of masses");
    sweep_pf.attach(sweep);
    sweep->add_option("--rho-list", s_rho, "increasing masses, e.g. 2pi,4pi,7pi");
    sweep->add_option("--eps-list", s_eps, "decreasing eps for rho = 8 pi (1 - eps)");
    sweep->add_option("--solver", s_solver, "radial or grid (rho lists only)")->capture_default_str();
    sweep->add_option("--csv", s_csv, "plot data CSV");
    sweep->add_option("-o,--out", s_out, "report JSON (default stdout)");

    std::vector<int> o_which;
    bool o_json = false;
    auto* oracle = app.add_subcommand("oracle", "run the acceptance suite");
    oracle->add_option("--criteria", o_which, "subset of criteria 1-8")->delimiter(',');
    oracle->add_flag("--json", o_json, "JSON instead of PASS/FAIL lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (*solve) return cmd_solve(solve_pf, solve_solver, solve_out, solve_report);
        if (*verify) return cmd_verify(vf);
        if (*rearr) return cmd_rearrange(r_phi, r_u, r_lambda, r_R, r_thresholds, r_out, r_report);
        if (*pipe) return cmd_pipeline(p_a, p_b, p_as_is, p_thresholds, p_out, p_psi);
        if (*uniq) return cmd_uniqueness(uniq_pf, u_starts, u_seed, u_tol, u_out);
        if (*sweep) return cmd_sweep(sweep_pf, s_rho, s_eps, s_solver, s_csv, s_out);
        if (*oracle) return cmd_oracle(o_which, o_json);
    } catch (const UsageError& e) {
        std::cerr << "mfl: usage: " << e.what() << "\n";
    } catch (const ParseError& e) {
        std::cerr << "mfl: input: " << e.what() << "\n";
    } catch (const PreconditionFailed& e) {
        std::cerr << "mfl: precondition: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "mfl: error: " << e.what() << "\n";
    }
    return exit_error;
}
