#include "rmt/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "rmt/bogovskii.hpp"
#include "rmt/spectral.hpp"

namespace rmt {

namespace {

using json = nlohmann::ordered_json;

int log_level() {
    static int level = [] {
        const char* env = std::getenv("RMT_LOG");
        if (!env) return 1;
        std::string s(env);
        if (s == "quiet") return 0;
        if (s == "debug") return 2;
        return 1;
    }();
    return level;
}

} // namespace

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[rmt] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[rmt] " << msg << "\n";
}

namespace {

double need_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    return j.get<double>();
}

RunConfig parse_config_json(const json& j) {
    RunConfig cfg;
    if (!j.is_object()) throw ConfigError("config", "top level must be an object");

    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        if (!g.is_object()) throw ConfigError("geometry", "expected an object");
        std::string kind = g.value("kind", "disk");
        if (kind == "disk") {
            cfg.geometry = GeometryKind::Disk;
            if (g.contains("radius")) cfg.radius = need_number(g.at("radius"), "geometry.radius");
        } else if (kind == "rectangle") {
            cfg.geometry = GeometryKind::Rectangle;
            if (g.contains("lx")) cfg.lx = need_number(g.at("lx"), "geometry.lx");
            if (g.contains("ly")) cfg.ly = need_number(g.at("ly"), "geometry.ly");
        } else {
            throw ConfigError("geometry.kind", "must be disk or rectangle");
        }
        if (g.contains("h_target"))
            cfg.h_target = need_number(g.at("h_target"), "geometry.h_target");
    }

    if (j.contains("params")) {
        const json& p = j.at("params");
        if (!p.is_object()) throw ConfigError("params", "expected an object");
        for (const auto& [key, val] : p.items()) {
            if (key == "Ddamp") {
                if (!val.is_array() || val.size() != 4)
                    throw ConfigError("params.Ddamp", "expected 4 numbers, row-major");
                cfg.raw_params.ddamp << need_number(val[0], "params.Ddamp"),
                    need_number(val[1], "params.Ddamp"),
                    need_number(val[2], "params.Ddamp"),
                    need_number(val[3], "params.Ddamp");
                cfg.raw_params.has_ddamp = true;
            } else {
                cfg.raw_params.scalars[key] = need_number(val, "params." + key);
            }
        }
    }

    if (j.contains("ic")) {
        const json& ic = j.at("ic");
        if (!ic.is_object()) throw ConfigError("ic", "expected an object");
        std::string kind = ic.value("kind", "zero");
        if (kind == "zero") cfg.ic.kind = PresetKind::Zero;
        else if (kind == "radial-gaussian") cfg.ic.kind = PresetKind::RadialGaussian;
        else if (kind == "solenoidal-eigenmode") cfg.ic.kind = PresetKind::SolenoidalEigenmode;
        else if (kind == "random-clamped") cfg.ic.kind = PresetKind::RandomClamped;
        else throw ConfigError("ic.kind", "unknown preset: " + kind);
        if (ic.contains("amplitude"))
            cfg.ic.amplitude = need_number(ic.at("amplitude"), "ic.amplitude");
        if (ic.contains("width")) {
            cfg.ic.width = need_number(ic.at("width"), "ic.width");
            if (!(cfg.ic.width > 0)) throw ConfigError("ic.width", "must be positive");
        }
        if (ic.contains("seed")) {
            if (!ic.at("seed").is_number_integer())
                throw ConfigError("ic.seed", "expected an integer");
            cfg.ic.seed = ic.at("seed").get<std::uint64_t>();
        }
    }

    if (j.contains("time")) {
        const json& t = j.at("time");
        if (!t.is_object()) throw ConfigError("time", "expected an object");
        if (t.contains("dt")) {
            if (t.at("dt").is_string()) {
                if (t.at("dt").get<std::string>() != "auto")
                    throw ConfigError("time.dt", "must be a positive number or \"auto\"");
                cfg.dt = -1.0;
            } else {
                cfg.dt = need_number(t.at("dt"), "time.dt");
                if (!(cfg.dt > 0)) throw ConfigError("time.dt", "must be positive");
            }
        }
        if (t.contains("t_end")) cfg.t_end = need_number(t.at("t_end"), "time.t_end");
    }
    if (!(cfg.t_end > 0)) throw ConfigError("time.t_end", "must be positive");

    if (j.contains("thermal_bc")) {
        std::string bc = j.at("thermal_bc").get<std::string>();
        if (bc == "neumann") cfg.thermal_bc = ThermalBC::Neumann;
        else if (bc == "dirichlet") cfg.thermal_bc = ThermalBC::Dirichlet;
        else throw ConfigError("thermal_bc", "must be neumann or dirichlet");
    }

    if (j.contains("lyapunov")) {
        const json& l = j.at("lyapunov");
        if (l.contains("N")) cfg.lyapunov.N = need_number(l.at("N"), "lyapunov.N");
        if (l.contains("N4")) cfg.lyapunov.N4 = need_number(l.at("N4"), "lyapunov.N4");
        if (!(cfg.lyapunov.N > 0) || !(cfg.lyapunov.N4 > 0))
            throw ConfigError("lyapunov", "weights must be positive");
    }

    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("solver_tol")) {
        cfg.solver_tol = need_number(j.at("solver_tol"), "solver_tol");
        if (!(cfg.solver_tol > 0)) throw ConfigError("solver_tol", "must be positive");
    }
    return cfg;
}

json config_json(const RunConfig& cfg) {
    json j;
    json g;
    if (cfg.geometry == GeometryKind::Disk) {
        g["kind"] = "disk";
        g["radius"] = cfg.radius;
    } else {
        g["kind"] = "rectangle";
        g["lx"] = cfg.lx;
        g["ly"] = cfg.ly;
    }
    g["h_target"] = cfg.h_target;
    j["geometry"] = g;

    json p = json::object();
    for (const auto& [k, v] : cfg.raw_params.scalars) p[k] = v;
    if (cfg.raw_params.has_ddamp) {
        const auto& D = cfg.raw_params.ddamp;
        p["Ddamp"] = {D(0, 0), D(0, 1), D(1, 0), D(1, 1)};
    }
    j["params"] = p;

    json ic;
    switch (cfg.ic.kind) {
        case PresetKind::Zero: ic["kind"] = "zero"; break;
        case PresetKind::RadialGaussian: ic["kind"] = "radial-gaussian"; break;
        case PresetKind::SolenoidalEigenmode: ic["kind"] = "solenoidal-eigenmode"; break;
        case PresetKind::RandomClamped: ic["kind"] = "random-clamped"; break;
    }
    ic["amplitude"] = cfg.ic.amplitude;
    ic["width"] = cfg.ic.width;
    ic["seed"] = cfg.ic.seed;
    j["ic"] = ic;

    json t;
    if (cfg.dt > 0) t["dt"] = cfg.dt;
    else t["dt"] = "auto";
    t["t_end"] = cfg.t_end;
    j["time"] = t;

    j["thermal_bc"] = cfg.thermal_bc == ThermalBC::Neumann ? "neumann" : "dirichlet";
    j["lyapunov"] = {{"N", cfg.lyapunov.N}, {"N4", cfg.lyapunov.N4}};
    j["output_dir"] = cfg.output_dir;
    j["solver_tol"] = cfg.solver_tol;
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path.string());
    os << text;
}

int guarded(const std::function<void()>& fn) {
    try {
        fn();
        return 0;
    } catch (const NoConvergence& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError("json", e.what());
    }
    return parse_config_json(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("config", "cannot read file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

Mesh build_mesh_at(const RunConfig& cfg, double h_target) {
    if (cfg.geometry == GeometryKind::Disk) return mesh_disk(cfg.radius, h_target);
    return mesh_rectangle(cfg.lx, cfg.ly, h_target);
}

Mesh build_mesh(const RunConfig& cfg) { return build_mesh_at(cfg, cfg.h_target); }

int run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    return guarded([&] {
        std::filesystem::create_directories(out_dir);
        Mesh mesh = build_mesh(cfg);
        PlateParams p = validate_params(cfg.raw_params);
        if (!mu_physically_plausible(p))
            log_info("mu outside the physically plausible range (0, 1/2)");
        AssembledOperators ops = assemble(mesh, build_stiffness_S(p));
        log_info("mesh: " + std::to_string(mesh.num_vertices()) + " vertices, h = "
                 + std::to_string(mesh.h));

        EigenResult sol_eig;
        EigenResult inv_eig;
        bool has_eig = false;
        if (cfg.ic.kind == PresetKind::SolenoidalEigenmode) {
            sol_eig = solenoidal_eigenmode(ops, mesh);
            // snap the penalty mode to the nearby exact elastic eigenvector so
            // the state is an invariant of the undamped v-dynamics
            inv_eig = elastic_eigenmode(ops, mesh, p, &sol_eig);
            has_eig = true;
        }
        State s0 = build_initial(cfg.ic, mesh, has_eig ? &inv_eig : nullptr);

        double dt = cfg.dt > 0 ? cfg.dt : default_dt(p, mesh.h);
        DiagnosticsEngine engine(ops, mesh, p, cfg.lyapunov, true);
        simulate(ops, p, s0, dt, cfg.t_end, cfg.thermal_bc,
                 [&](const StepReport& rep) { engine.process(rep); });
        const TimeSeries& series = engine.series();

        {
            std::ofstream os(std::filesystem::path(out_dir) / "timeseries.csv",
                             std::ios::binary);
            write_timeseries_csv(series, os);
        }
        write_text(std::filesystem::path(out_dir) / "config_echo.json",
                   config_to_json(cfg));

        double e0 = series.rows.front().energy.total();
        double diss_residual = 0.0;
        for (size_t i = 1; i < series.rows.size(); ++i) {
            double de = series.rows[i].energy.total() - series.rows[i - 1].energy.total();
            diss_residual = std::max(
                diss_residual, std::abs(de + dt * series.rows[i].dissipation.total()));
        }
        double mean0 = series.rows.front().mean_theta;
        double mean_drift = 0.0;
        for (const auto& r : series.rows)
            mean_drift = std::max(mean_drift, std::abs(r.mean_theta - mean0));

        DecayFit fit;
        if (e0 > 0) {
            try {
                fit = fit_decay(series, 0.2 * cfg.t_end);
            } catch (const Error& e) {
                log_info(std::string("decay fit skipped: ") + e.what());
            }
        }
        GronwallReport gron = lyapunov_decay_check(series);

        double alpha1 = std::numeric_limits<double>::infinity(), alpha2 = 0.0;
        for (const auto& r : series.rows) {
            double e = r.energy.total();
            if (e > 0) {
                alpha1 = std::min(alpha1, r.lyapunov.total / e);
                alpha2 = std::max(alpha2, r.lyapunov.total / e);
            }
        }
        if (!std::isfinite(alpha1)) alpha1 = 0.0;

        json summary;
        summary["initial_energy"] = e0;
        summary["final_energy"] = series.rows.back().energy.total();
        summary["resolved_dt"] = dt;
        summary["steps"] = series.rows.size() - 1;
        summary["decay_fit"] = {{"alpha", fit.alpha}, {"C", fit.C}, {"r2", fit.r2},
                                {"t_start", fit.t_start}, {"t_end", fit.t_end}};
        summary["dissipation_identity_max_residual"] = diss_residual;
        summary["mean_theta_drift"] = mean_drift;
        summary["gronwall_margin"] = gron.c;
        summary["lyapunov_alpha1"] = alpha1;
        summary["lyapunov_alpha2"] = alpha2;
        if (has_eig) {
            summary["eigen_lambda"] = sol_eig.lambda;
            summary["elastic_lambda"] = inv_eig.lambda;
            summary["frequency_oracle"] =
                nondecay_frequency(sol_eig, p) / (2.0 * std::numbers::pi);
        }
        write_text(std::filesystem::path(out_dir) / "summary.json",
                   summary.dump(2) + "\n");
    });
}

int run_eigen(const RunConfig& cfg, const std::string& mode, const std::string& out_dir) {
    return guarded([&] {
        if (mode != "laplace" && mode != "stokes" && mode != "korn")
            throw ConfigError("mode", "must be stokes, korn or laplace");
        std::filesystem::create_directories(out_dir);
        json rep;
        rep["mode"] = mode;

        if (mode == "laplace") {
            std::vector<double> hs, lambdas;
            double residual = 0;
            for (double h : {cfg.h_target, cfg.h_target / 2, cfg.h_target / 4}) {
                Mesh mesh = build_mesh_at(cfg, h);
                PlateParams p = validate_params(cfg.raw_params);
                AssembledOperators ops = assemble(mesh, build_stiffness_S(p));
                EigenResult r = laplace_eigenmode(ops, mesh);
                hs.push_back(mesh.h);
                lambdas.push_back(r.lambda);
                residual = r.residual;
                log_info("laplace h=" + std::to_string(mesh.h) + " lambda="
                         + std::to_string(r.lambda));
            }
            rep["hs"] = hs;
            rep["lambdas"] = lambdas;
            rep["lambda"] = lambdas.back();
            rep["residual"] = residual;
            rep["h"] = hs.back();
            rep["extrapolated"] = richardson_extrapolate(lambdas[0], lambdas[1], lambdas[2]);
        } else if (mode == "stokes") {
            Mesh mesh = build_mesh(cfg);
            PlateParams p = validate_params(cfg.raw_params);
            AssembledOperators ops = assemble(mesh, build_stiffness_S(p));
            EigenResult s = solenoidal_eigenmode(ops, mesh);
            EigenResult l = laplace_eigenmode(ops, mesh);
            DofMap smap = make_dof_map(ops.n, ops.dirichlet_mask);
            DofMap vmap = vector_dof_map(smap, ops.n);
            Vec ur = restrict_vector(s.field, vmap);
            double h1 = std::sqrt(s.field.dot(ops.M2 * s.field)
                                  + s.field.dot(ops.A_gg * s.field));
            rep["lambda"] = s.lambda;
            rep["residual"] = s.residual;
            rep["h"] = s.h;
            rep["div_defect_ratio"] = (ops.B_div * s.field).norm() / h1;
            rep["laplace_lambda"] = l.lambda;
            (void)ur;
        } else {
            PlateParams p = validate_params(cfg.raw_params);
            StiffnessS S = build_stiffness_S(p);
            json levels = json::array();
            for (double h : {cfg.h_target, cfg.h_target / 2}) {
                Mesh mesh = build_mesh_at(cfg, h);
                AssembledOperators ops = assemble(mesh, S);
                KornEstimates k = korn_constants(ops, mesh, S);
                levels.push_back({{"h", mesh.h}, {"c_k1", k.c_k1}, {"c_k2", k.c_k2},
                                  {"c_k", k.c_k}, {"c_p", k.c_p}});
            }
            rep["levels"] = levels;
        }

        std::string text = rep.dump(2) + "\n";
        std::cout << text;
        write_text(std::filesystem::path(out_dir) / ("eigen_" + mode + ".json"), text);
    });
}

namespace {

struct BogLevel {
    double h = 0;
    double recon_error = 0;
    double residual_div = 0, residual_rot = 0, boundary_norm = 0;
    double continuity_max = 0;
    double cprime_max = 0;
    bool has_oracle = false;
};

BogLevel bogovskii_level(const RunConfig& cfg, double h_target) {
    Mesh mesh = build_mesh_at(cfg, h_target);
    PlateParams p = validate_params(cfg.raw_params);
    AssembledOperators ops = assemble(mesh, build_stiffness_S(p));
    BogovskiiOperator bog(ops, mesh);
    int n = ops.n;

    BogLevel lvl;
    lvl.h = mesh.h;

    if (cfg.geometry == GeometryKind::Disk) {
        double R = cfg.radius;
        Vec f(n), u0(2 * n);
        for (int i = 0; i < n; ++i) {
            double x = mesh.vertices[i][0], y = mesh.vertices[i][1];
            double r2 = x * x + y * y;
            f[i] = 16.0 * r2 - 8.0 * R * R;  // laplacian of (R^2 - r^2)^2
            u0[i] = -4.0 * (R * R - r2) * x;
            u0[n + i] = -4.0 * (R * R - r2) * y;
        }
        f = mean_zero_project(f, mesh);
        BogovskiiSolve sol = bog.apply(f);
        lvl.recon_error = mass_norm(ops.M2, Vec(sol.u - u0));
        lvl.residual_div = sol.residual_div;
        lvl.residual_rot = sol.residual_rot;
        lvl.boundary_norm = sol.boundary_norm;
        lvl.has_oracle = true;
    }

    // random smooth trigonometric fields, seeded per sample so the same
    // continuum functions are probed at every resolution
    auto trig_field = [&](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> amp(-1.0, 1.0);
        std::uniform_real_distribution<double> wave(-6.0, 6.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        std::array<std::array<double, 4>, 8> c;
        for (auto& row : c) row = {amp(rng), wave(rng), wave(rng), phase(rng)};
        Vec f(n);
        for (int i = 0; i < n; ++i) {
            double x = mesh.vertices[i][0], y = mesh.vertices[i][1];
            double v = 0.0;
            for (const auto& row : c) v += row[0] * std::cos(row[1] * x + row[2] * y + row[3]);
            f[i] = v;
        }
        return f;
    };
    auto bump = [&](int i) {
        double x = mesh.vertices[i][0], y = mesh.vertices[i][1];
        if (cfg.geometry == GeometryKind::Disk)
            return cfg.radius * cfg.radius - x * x - y * y;
        return x * (cfg.lx - x) * y * (cfg.ly - y);
    };

    for (int sample = 0; sample < 50; ++sample) {
        Vec f = mean_zero_project(trig_field(100 + sample), mesh);
        BogovskiiSolve sol = bog.apply(f);
        lvl.continuity_max = std::max(lvl.continuity_max, sol.continuity);
        if (!lvl.has_oracle && sample == 0) {
            lvl.residual_div = sol.residual_div;
            lvl.residual_rot = sol.residual_rot;
            lvl.boundary_norm = sol.boundary_norm;
        }
    }
    for (int sample = 0; sample < 20; ++sample) {
        Vec g1 = trig_field(200 + sample), g2 = trig_field(300 + sample);
        Vec u(2 * n);
        for (int i = 0; i < n; ++i) {
            double b = mesh.is_boundary[i] ? 0.0 : bump(i);
            u[i] = b * g1[i];
            u[n + i] = b * g2[i];
        }
        lvl.cprime_max = std::max(lvl.cprime_max,
                                  bogovskii_div_estimate_check(bog, ops, mesh, u));
    }
    return lvl;
}

} // namespace

int run_bogovskii(const RunConfig& cfg, const std::string& out_dir) {
    return guarded([&] {
        std::filesystem::create_directories(out_dir);
        BogLevel a = bogovskii_level(cfg, cfg.h_target);
        BogLevel b = bogovskii_level(cfg, cfg.h_target / 2);

        auto rate = [](double e1, double e2) {
            return (e1 > 0 && e2 > 0) ? std::log2(e1 / e2) : 0.0;
        };
        json rep;
        auto level_json = [](const BogLevel& l) {
            return json{{"h", l.h}, {"recon_error", l.recon_error},
                        {"residual_div", l.residual_div},
                        {"residual_rot", l.residual_rot},
                        {"boundary_norm", l.boundary_norm},
                        {"continuity_max", l.continuity_max},
                        {"cprime_max", l.cprime_max},
                        {"has_oracle", l.has_oracle}};
        };
        rep["levels"] = {level_json(a), level_json(b)};
        rep["recon_rate"] = rate(a.recon_error, b.recon_error);
        rep["residual_div_rate"] = rate(a.residual_div, b.residual_div);
        rep["residual_rot_rate"] = rate(a.residual_rot, b.residual_rot);
        rep["boundary_rate"] = rate(a.boundary_norm, b.boundary_norm);
        rep["continuity_variation"] =
            a.continuity_max > 0
                ? std::abs(a.continuity_max - b.continuity_max) / a.continuity_max
                : 0.0;
        rep["cprime_variation"] =
            a.cprime_max > 0 ? std::abs(a.cprime_max - b.cprime_max) / a.cprime_max : 0.0;

        std::string text = rep.dump(2) + "\n";
        std::cout << text;
        write_text(std::filesystem::path(out_dir) / "bogovskii.json", text);
    });
}

int run_decay_fit(const std::string& csv_path, double t_start) {
    return guarded([&] {
        std::ifstream is(csv_path, std::ios::binary);
        if (!is) throw ConfigError("csv", "cannot read file: " + csv_path);
        auto te = read_energy_csv(is);
        DecayFit fit = fit_decay_values(te, t_start);
        json rep = {{"alpha", fit.alpha}, {"C", fit.C}, {"r2", fit.r2},
                    {"t_start", fit.t_start}, {"t_end", fit.t_end}};
        std::cout << rep.dump(2) << "\n";
    });
}

} // namespace rmt
