#include "pbvp/config.hpp"

#include "pbvp/newton.hpp"
#include "pbvp/oracle.hpp"
#include "pbvp/reactor.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace pbvp {

using nlohmann::json;

Method method_from_string(const std::string& s) {
    if (s == "simple") return Method::kSimple;
    if (s == "newton-modified") return Method::kNewtonModified;
    if (s == "newton-classical") return Method::kNewtonClassical;
    throw ConfigError("unknown method '" + s + "' (simple | newton-modified | newton-classical)");
}

const char* to_string(Method m) {
    switch (m) {
        case Method::kSimple: return "simple";
        case Method::kNewtonModified: return "newton-modified";
        case Method::kNewtonClassical: return "newton-classical";
    }
    return "?";
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

Matrix parse_matrix(const json& rows, int n, const std::string& where) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
        throw ConfigError(where + ": expected " + std::to_string(n) + " rows");
    Matrix A(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ConfigError(where + ": row " + std::to_string(i) + " must have " +
                              std::to_string(n) + " entries");
        for (int j = 0; j < n; ++j) A(i, j) = row[j].get<double>();
    }
    return A;
}

Vector parse_vector(const json& arr, int n, const std::string& where) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
        throw ConfigError(where + ": expected " + std::to_string(n) + " entries");
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = arr[i].get<double>();
    return v;
}

Box parse_box(const json& j, int n, const std::string& where) {
    reject_unknown_keys(j, {"lower", "upper"}, where);
    Box b = Box::unbounded(n);
    if (j.contains("lower")) b.lower = parse_vector(j["lower"], n, where + ".lower");
    if (j.contains("upper")) b.upper = parse_vector(j["upper"], n, where + ".upper");
    return b;
}

SystemModel parse_system(const json& j) {
    reject_unknown_keys(j, {"builtin", "params", "n", "A", "nonlinearity", "domain"}, "system");
    if (j.contains("builtin")) {
        const std::string name = j["builtin"].get<std::string>();
        if (name != "reactor")
            throw ConfigError("unknown builtin system '" + name + "'");
        ReactorParams p;
        if (j.contains("params")) {
            const auto& jp = j["params"];
            reject_unknown_keys(jp,
                                {"gamma", "kappa", "phi1", "phi2", "k1", "k2", "u1_max", "u1_min",
                                 "u2_max", "u2_min"},
                                "system.params");
            if (jp.contains("gamma")) p.gamma = jp["gamma"].get<double>();
            if (jp.contains("kappa")) p.kappa = jp["kappa"].get<double>();
            if (jp.contains("phi1")) p.phi1 = jp["phi1"].get<double>();
            if (jp.contains("phi2")) p.phi2 = jp["phi2"].get<double>();
            if (jp.contains("k1")) p.k1 = jp["k1"].get<double>();
            if (jp.contains("k2")) p.k2 = jp["k2"].get<double>();
            if (jp.contains("u1_max")) p.u1_max = jp["u1_max"].get<double>();
            if (jp.contains("u1_min")) p.u1_min = jp["u1_min"].get<double>();
            if (jp.contains("u2_max")) p.u2_max = jp["u2_max"].get<double>();
            if (jp.contains("u2_min")) p.u2_min = jp["u2_min"].get<double>();
        }
        return build_reactor_model(p);
    }
    if (!j.contains("n") || !j.contains("A"))
        throw ConfigError("system: need either 'builtin' or explicit 'n' and 'A'");
    const int n = j["n"].get<int>();
    if (n < 1) throw ConfigError("system.n must be positive");
    const Matrix A = parse_matrix(j["A"], n, "system.A");
    Box domain = Box::unbounded(n);
    if (j.contains("domain")) domain = parse_box(j["domain"], n, "system.domain");

    if (!j.contains("nonlinearity")) {
        SystemModel m = make_linear_model(A);
        m.domain = domain;
        return m;
    }
    const auto& jn = j["nonlinearity"];
    reject_unknown_keys(jn, {"type", "components"}, "system.nonlinearity");
    const std::string type = jn.at("type").get<std::string>();
    if (type == "zero") {
        SystemModel m = make_linear_model(A);
        m.domain = domain;
        return m;
    }
    if (type != "polynomial")
        throw ConfigError("system.nonlinearity.type must be 'zero' or 'polynomial'");
    const auto& comps = jn.at("components");
    if (!comps.is_array() || static_cast<int>(comps.size()) != n)
        throw ConfigError("system.nonlinearity.components: one term list per component");
    std::vector<std::vector<PolyTerm>> components(n);
    for (int k = 0; k < n; ++k) {
        for (const auto& jt : comps[k]) {
            reject_unknown_keys(jt, {"coeff", "exponents"}, "polynomial term");
            PolyTerm t;
            t.coeff = jt.at("coeff").get<double>();
            for (const auto& e : jt.at("exponents")) t.exponents.push_back(e.get<int>());
            if (static_cast<int>(t.exponents.size()) != n)
                throw ConfigError("polynomial term: exponent list must have n entries");
            components[k].push_back(std::move(t));
        }
    }
    return make_polynomial_model(A, components, domain);
}

ControlSchedule parse_schedule(const json& j, int n) {
    reject_unknown_keys(j, {"tau", "switch_fractions", "values"}, "schedule");
    const double tau = j.at("tau").get<double>();
    std::vector<double> fracs;
    for (const auto& f : j.at("switch_fractions")) fracs.push_back(f.get<double>());
    std::vector<Vector> values;
    for (const auto& v : j.at("values"))
        values.push_back(parse_vector(v, n, "schedule.values"));
    return make_schedule(tau, fracs, values);
}

BoundaryCondition parse_bc(const json& j, int n) {
    if (!j.contains("type")) throw ConfigError("bc: missing 'type'");
    const std::string type = j["type"].get<std::string>();
    if (type == "periodic") {
        reject_unknown_keys(j, {"type"}, "bc");
        return BoundaryCondition::periodic(n);
    }
    if (type != "two-point") throw ConfigError("bc.type must be 'periodic' or 'two-point'");
    reject_unknown_keys(j, {"type", "M0", "M1", "beta"}, "bc");
    return BoundaryCondition::two_point(parse_matrix(j.at("M0"), n, "bc.M0"),
                                        parse_matrix(j.at("M1"), n, "bc.M1"),
                                        parse_vector(j.at("beta"), n, "bc.beta"));
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown_keys(doc,
                        {"system", "schedule", "bc", "grid", "solver", "output", "oracle",
                         "certificate", "seed"},
                        "config");
    RunConfig cfg;
    cfg.model = parse_system(doc.at("system"));
    cfg.schedule = parse_schedule(doc.at("schedule"), cfg.model.n);
    cfg.bc = doc.contains("bc") ? parse_bc(doc["bc"], cfg.model.n)
                                : BoundaryCondition::periodic(cfg.model.n);

    if (doc.contains("grid")) {
        reject_unknown_keys(doc["grid"], {"n_g"}, "grid");
        cfg.n_g = doc["grid"].at("n_g").get<int>();
        if (cfg.n_g < 1) throw ConfigError("grid.n_g must be positive");
    }
    if (doc.contains("solver")) {
        const auto& js = doc["solver"];
        reject_unknown_keys(js, {"method", "n_i", "tol", "initial", "enforce_domain"}, "solver");
        if (js.contains("method")) cfg.method = method_from_string(js["method"].get<std::string>());
        if (js.contains("n_i")) cfg.n_iter = js["n_i"].get<int>();
        if (cfg.n_iter < 1) throw ConfigError("solver.n_i must be positive");
        if (js.contains("tol")) {
            cfg.tol = js["tol"].get<double>();
            if (!(*cfg.tol > 0.0)) throw ConfigError("solver.tol must be positive");
        }
        if (js.contains("initial")) {
            const std::string init = js["initial"].get<std::string>();
            if (init == "flow")
                cfg.flow_warm_start = true;
            else if (init != "zero")
                throw ConfigError("solver.initial must be 'zero' or 'flow'");
        }
        if (js.contains("enforce_domain"))
            cfg.enforce_domain = js["enforce_domain"].get<bool>();
    }
    if (doc.contains("output")) {
        reject_unknown_keys(doc["output"], {"dir"}, "output");
        if (doc["output"].contains("dir")) cfg.out_dir = doc["output"]["dir"].get<std::string>();
    }
    if (doc.contains("oracle")) cfg.oracle = doc["oracle"].get<bool>();
    if (doc.contains("seed")) {
        cfg.seed = doc["seed"].get<unsigned>();
        cfg.certify_opts.seed = cfg.seed;
    }
    if (doc.contains("certificate")) {
        const auto& jc = doc["certificate"];
        reject_unknown_keys(jc, {"enabled", "dprime", "bounds"}, "certificate");
        cfg.certificate = jc.contains("enabled") ? jc["enabled"].get<bool>() : true;
        if (jc.contains("dprime"))
            cfg.certify_opts.working_box = parse_box(jc["dprime"], cfg.model.n, "certificate.dprime");
        else
            cfg.certify_opts.working_box = cfg.model.domain;
        if (jc.contains("bounds")) {
            const auto& jb = jc["bounds"];
            reject_unknown_keys(jb, {"M", "omega", "L", "H_bar", "r"}, "certificate.bounds");
            if (jb.contains("M") != jb.contains("omega"))
                throw ConfigError("certificate.bounds: M and omega must be given together");
            if (jb.contains("M"))
                cfg.certify_opts.growth_override = {jb["M"].get<double>(),
                                                    jb["omega"].get<double>()};
            if (jb.contains("L")) cfg.certify_opts.L_user = jb["L"].get<double>();
            if (jb.contains("H_bar")) cfg.certify_opts.hessian_user = jb["H_bar"].get<double>();
            if (jb.contains("r")) cfg.certify_opts.ball_radius = jb["r"].get<double>();
        }
    } else {
        cfg.certify_opts.working_box = cfg.model.domain;
    }
    cfg.echo = doc.dump(2);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

namespace {

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
    if (o.n_g) cfg.n_g = *o.n_g;
    if (o.n_iter) cfg.n_iter = *o.n_iter;
    if (o.method) cfg.method = method_from_string(*o.method);
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.oracle) cfg.oracle = true;
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.certify_opts.seed = *o.seed;
    }
}

json report_entry(const ResidualReport& r, int k) {
    json e;
    e["k"] = k;
    e["d"] = r.d;
    e["gap"] = r.periodicity_gap;
    if (r.iterate_gap) e["iterate_gap"] = *r.iterate_gap;
    return e;
}

json certificate_json(const Certificate& c) {
    json j;
    j["linearization_ok"] = c.a1_ok;
    j["contraction_ok"] = c.a4_ok;
    j["mass_matrix_ok"] = c.a5_ok;
    j["newton_ok"] = c.h_ok;
    j["heuristic"] = c.heuristic;
    j["growth"] = {{"M", c.M}, {"omega", c.omega}, {"source", to_string(c.growth_source)}};
    auto put = [&j](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v; else j[key] = nullptr;
    };
    put("q", c.q);
    put("S", c.S);
    put("R_tau", c.R_tau);
    put("B_tau_inv_norm", c.B_tau_inv_norm);
    if (c.L) j["L"] = {{"value", *c.L}, {"source", to_string(c.L_source)}};
    if (c.hessian_bound)
        j["H_bar"] = {{"value", *c.hessian_bound}, {"source", to_string(c.hessian_source)}};
    put("rho0", c.rho0);
    put("rho1", c.rho1);
    put("rho2", c.rho2);
    put("h", c.h);
    put("eta", c.eta);
    put("r0", c.r0);
    put("r1", c.r1);
    if (!c.rate_bound_modified.empty()) {
        j["rate_bound_modified"] = c.rate_bound_modified;
        j["rate_bound_classical"] = c.rate_bound_classical;
    }
    return j;
}

json bench_cells_json(const std::vector<BenchCell>& cells) {
    json arr = json::array();
    for (const auto& c : cells) {
        json e;
        e["k"] = c.k;
        e["d"] = c.d;
        e["gap"] = c.gap;
        if (c.reference) e["reference"] = *c.reference;
        if (c.rel_tol) e["rel_tol"] = *c.rel_tol;
        if (c.pass) e["pass"] = *c.pass;
        arr.push_back(e);
    }
    return arr;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

}  // namespace

int cmd_solve(RunConfig cfg, const CliOverrides& overrides) {
    apply_overrides(cfg, overrides);
    std::filesystem::create_directories(cfg.out_dir);
    const Grid grid(cfg.n_g, cfg.schedule.tau);

    SolveOptions opts;
    opts.n_iter = cfg.n_iter;
    opts.tol = cfg.tol;
    opts.enforce_domain = cfg.enforce_domain;

    try {
        if (cfg.flow_warm_start)
            opts.initial =
                integrate_dense(cfg.model, cfg.schedule, Vector::Zero(cfg.model.n), cfg.n_g);
        if (cfg.certificate) {
            Certificate cert = certify(cfg.model, cfg.schedule, cfg.bc, cfg.certify_opts);
            write_text(cfg.out_dir + "/certificate.json", certificate_json(cert).dump(2) + "\n");
        }
        auto t0 = std::chrono::steady_clock::now();
        IterationResult res;
        switch (cfg.method) {
            case Method::kSimple:
                res = solve_simple(cfg.model, cfg.bc, cfg.schedule, grid, opts);
                break;
            case Method::kNewtonModified:
                if (!cfg.bc.is_periodic)
                    throw ConfigError("newton methods require periodic boundary conditions");
                res = solve_newton_modified(cfg.model, cfg.schedule, grid, opts);
                break;
            case Method::kNewtonClassical:
                if (!cfg.bc.is_periodic)
                    throw ConfigError("newton methods require periodic boundary conditions");
                res = solve_newton_classical(cfg.model, cfg.schedule, grid, opts);
                break;
        }
        auto t1 = std::chrono::steady_clock::now();

        json report;
        report["method"] = to_string(cfg.method);
        report["n_g"] = cfg.n_g;
        report["n_i"] = cfg.n_iter;
        report["converged"] = res.converged;
        report["iterations_run"] = res.iterations_run;
        report["seconds"] = std::chrono::duration<double>(t1 - t0).count();
        report["history"] = json::array();
        for (size_t k = 0; k < res.history.size(); ++k)
            report["history"].push_back(report_entry(res.history[k], static_cast<int>(k)));
        report["final_d"] = res.history.back().d;
        report["periodicity_gap"] = res.history.back().periodicity_gap;
        report["config"] = json::parse(cfg.echo);

        if (cfg.oracle) {
            ShootingResult sr = shooting_solve(cfg.model, cfg.schedule, cfg.schedule.tau);
            json jo;
            jo["x0_star"] = std::vector<double>(sr.x0_star.data(),
                                                sr.x0_star.data() + sr.x0_star.size());
            jo["newton_steps"] = sr.newton_steps;
            jo["final_defect"] = sr.final_defect;
            jo["solver_x0_distance"] = (res.final.node(0) - sr.x0_star).norm();
            report["oracle"] = jo;
        }

        write_trajectory_csv(res.final, cfg.out_dir + "/trajectory.csv");
        write_text(cfg.out_dir + "/report.json", report.dump(2) + "\n");
        std::cout << "solve: method=" << to_string(cfg.method) << " n_g=" << cfg.n_g
                  << " iterations=" << res.iterations_run << " final_d=" << res.history.back().d
                  << " gap=" << res.history.back().periodicity_gap << "\n";
        return 0;
    } catch (const ConditioningError& e) {
        std::cerr << "assumption failure: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

int cmd_certify(RunConfig cfg, const CliOverrides& overrides) {
    apply_overrides(cfg, overrides);
    std::filesystem::create_directories(cfg.out_dir);
    try {
        Certificate cert = certify(cfg.model, cfg.schedule, cfg.bc, cfg.certify_opts);
        json j = certificate_json(cert);
        write_text(cfg.out_dir + "/certificate.json", j.dump(2) + "\n");
        std::cout << j.dump(2) << "\n";
        const bool newton_requested = cert.hessian_bound.has_value();
        bool pass = cert.a1_ok && cert.a4_ok && cert.a5_ok && (!newton_requested || cert.h_ok);
        return pass ? 0 : 2;
    } catch (const ConfigError&) {
        throw;  // caller maps to exit 1
    } catch (const ConditioningError& e) {
        std::cerr << "assumption failure: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

int cmd_bench(const std::string& which, const CliOverrides& overrides) {
    CliOverrides o = overrides;
    std::string out_dir = o.out_dir.value_or(".");
    std::filesystem::create_directories(out_dir);
    try {
        if (which == "table1") {
            const int n_g = o.n_g.value_or(100000);
            const int n_i = o.n_iter.value_or(9);
            const bool checks = (n_g >= 100000) && (n_i >= 9);
            Table1Report rep = run_table1(n_g, n_i, checks);
            json j;
            j["n_g"] = rep.n_g;
            j["n_i"] = rep.n_iter;
            j["checks_enabled"] = rep.checks_enabled;
            j["algorithm1"] = bench_cells_json(rep.algorithm1);
            j["algorithm2"] = bench_cells_json(rep.algorithm2);
            j["gaps_ok_alg1"] = rep.gaps_ok_alg1;
            j["gaps_ok_alg2"] = rep.gaps_ok_alg2;
            j["floor_ok_alg2"] = rep.floor_ok_alg2;
            j["seconds_alg1"] = rep.seconds_alg1;
            j["seconds_alg2"] = rep.seconds_alg2;
            write_text(out_dir + "/table1_report.json", j.dump(2) + "\n");

            std::printf("%-4s %-14s %-14s %-8s %-14s %-14s %-8s\n", "k", "d(simple)",
                        "ref", "verdict", "d(newton)", "ref", "verdict");
            const size_t rows = std::max(rep.algorithm1.size(), rep.algorithm2.size());
            for (size_t k = 0; k < rows; ++k) {
                auto cell = [&](const std::vector<BenchCell>& cs) -> const BenchCell* {
                    return k < cs.size() ? &cs[k] : nullptr;
                };
                const BenchCell* c1 = cell(rep.algorithm1);
                const BenchCell* c2 = cell(rep.algorithm2);
                auto verdict = [](const BenchCell* c) {
                    if (!c || !c->pass) return "-";
                    return *c->pass ? "pass" : "FAIL";
                };
                std::printf("%-4zu %-14.6e %-14.6e %-8s %-14.6e %-14.6e %-8s\n", k,
                            c1 ? c1->d : 0.0, c1 && c1->reference ? *c1->reference : 0.0,
                            verdict(c1), c2 ? c2->d : 0.0,
                            c2 && c2->reference ? *c2->reference : 0.0, verdict(c2));
            }
            std::printf("gaps: simple %s, newton %s; newton floor (k>=7): %s\n",
                        rep.gaps_ok_alg1 ? "ok" : "FAIL", rep.gaps_ok_alg2 ? "ok" : "FAIL",
                        rep.floor_ok_alg2 ? "ok" : "FAIL");
            if (!rep.checks_enabled) {
                std::printf("informational run (below reference grid); verdicts disabled\n");
                return 0;
            }
            return rep.all_pass() ? 0 : 2;
        }
        if (which == "figure1") {
            const int n_g = o.n_g.value_or(100000);
            const int n_i = o.n_iter.value_or(20);
            Figure1Report rep = run_figure1(10.0, n_g, n_i);
            write_trajectory_csv(rep.trajectory, out_dir + "/figure1_trajectory.csv");
            json j;
            j["final_d"] = rep.final_d;
            j["periodicity_gap"] = rep.periodicity_gap;
            j["iterations"] = rep.iterations;
            j["in_domain"] = rep.in_domain;
            j["seconds"] = rep.seconds;
            write_text(out_dir + "/figure1_report.json", j.dump(2) + "\n");
            std::printf("figure1: final_d=%.3e gap=%.3e in_domain=%s (%d iterations)\n",
                        rep.final_d, rep.periodicity_gap, rep.in_domain ? "yes" : "no",
                        rep.iterations);
            return 0;
        }
        throw ConfigError("unknown benchmark '" + which + "' (table1 | figure1)");
    } catch (const ConfigError&) {
        throw;
    } catch (const ConditioningError& e) {
        std::cerr << "assumption failure: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace pbvp
