#include "rmt/diagnostics.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rmt {

Vec poisson_auxiliary(const AssembledOperators& ops, const Vec& v) {
    DofMap map = make_dof_map(ops.n, ops.dirichlet_mask);
    SpMat A = restrict_matrix(ops.A_lap, map, map);
    Vec rhs = restrict_vector(ops.B_div * v, map);
    Vec u = solve_spd(A, rhs).x;
    return expand_vector(u, map);
}

namespace {

LyapunovParts lyapunov_from_fields(const AssembledOperators& ops, const PlateParams& p,
                                   const State& s, const LyapunovConfig& cfg,
                                   const Vec& u_poisson, const Vec* bog_theta) {
    LyapunovParts f;
    f.F1 = p.rho1 * s.wt.dot(ops.M * u_poisson) + p.rho2 * s.vt.dot(ops.M2 * s.v)
           - (p.gamma * p.tau0 / p.kappa) * s.v.dot(ops.M2 * s.q);
    f.F2 = p.rho1 * s.wt.dot(ops.M * s.w);
    if (bog_theta) {
        f.F3 = p.rho2 * p.rho3 * bog_theta->dot(ops.M2 * s.vt);
        f.F4 = -p.tau0 * p.rho3 * s.q.dot(ops.M2 * (*bog_theta));
    }
    f.total = cfg.N * energy(ops, p, s).total() + f.F1 + f.F2 + f.F3 + cfg.N4 * f.F4;
    return f;
}

// The continuous theta has zero mean; strip the roundoff mean so the
// Bogovskii mean guard never trips on noise.
Vec strip_mean(const AssembledOperators& ops, const Vec& theta) {
    double mean = ops.lumped.dot(theta) / ops.domain_area;
    return theta - mean * Vec::Ones(theta.size());
}

} // namespace

LyapunovParts lyapunov_F(const AssembledOperators& ops, const PlateParams& p,
                         const State& s, const LyapunovConfig& cfg,
                         const BogovskiiOperator& bog) {
    Vec u = poisson_auxiliary(ops, s.v);
    double tn = mass_norm(ops.M, s.theta);
    if (tn == 0.0)
        return lyapunov_from_fields(ops, p, s, cfg, u, nullptr);
    Vec bt = bog.apply_field(strip_mean(ops, s.theta));
    return lyapunov_from_fields(ops, p, s, cfg, u, &bt);
}

struct DiagnosticsEngine::Impl {
    const AssembledOperators& ops;
    PlateParams p;
    LyapunovConfig cfg;
    bool with_lyapunov;
    DofMap map;
    Eigen::SimplicialLDLT<SpMat> poisson;
    std::optional<BogovskiiOperator> bog;

    Impl(const AssembledOperators& o, const Mesh& m, const PlateParams& pp,
         const LyapunovConfig& c, bool lyap)
        : ops(o), p(pp), cfg(c), with_lyapunov(lyap) {
        if (!with_lyapunov) return;
        map = make_dof_map(ops.n, ops.dirichlet_mask);
        poisson.compute(restrict_matrix(ops.A_lap, map, map));
        if (poisson.info() != Eigen::Success)
            throw NoConvergence(0, std::numeric_limits<double>::infinity());
        bog.emplace(ops, m);
    }
};

DiagnosticsEngine::DiagnosticsEngine(const AssembledOperators& ops, const Mesh& m,
                                     const PlateParams& p, const LyapunovConfig& cfg,
                                     bool with_lyapunov)
    : impl_(std::make_unique<Impl>(ops, m, p, cfg, with_lyapunov)) {}
DiagnosticsEngine::~DiagnosticsEngine() = default;

const TimeSeriesRow& DiagnosticsEngine::process(const StepReport& rep) {
    const AssembledOperators& ops = impl_->ops;
    const State& s = rep.state;

    TimeSeriesRow row;
    row.t = rep.t;
    row.energy = rep.energy_parts;
    row.dissipation = rep.dissipation_parts;
    row.mean_theta = ops.lumped.dot(s.theta) / ops.domain_area;
    row.rot_v = std::sqrt(std::max(0.0, s.v.dot(ops.A_rr * s.v)));
    row.div_v = std::sqrt(std::max(0.0, s.v.dot(ops.A_dd * s.v)));

    if (impl_->with_lyapunov) {
        Vec u = expand_vector(
            impl_->poisson.solve(restrict_vector(ops.B_div * s.v, impl_->map)),
            impl_->map);
        double tn = mass_norm(ops.M, s.theta);
        if (tn == 0.0) {
            row.lyapunov = lyapunov_from_fields(ops, impl_->p, s, impl_->cfg, u, nullptr);
        } else {
            Vec bt = impl_->bog->apply_field(strip_mean(ops, s.theta));
            row.lyapunov = lyapunov_from_fields(ops, impl_->p, s, impl_->cfg, u, &bt);
        }
    }
    series_.rows.push_back(row);
    return series_.rows.back();
}

DecayFit fit_decay_values(const std::vector<std::pair<double, double>>& te,
                          double t_start) {
    if (te.empty()) throw InsufficientData("empty series");
    double e0 = te.front().second;

    std::vector<std::pair<double, double>> win;
    for (const auto& [t, e] : te)
        if (t >= t_start) win.emplace_back(t, e);
    if (win.size() < 10)
        throw InsufficientData("need at least 10 samples past t_start");
    for (const auto& [t, e] : win)
        if (!(e > 0.0)) throw NonPositiveEnergy();

    double n = static_cast<double>(win.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (const auto& [t, e] : win) {
        double y = std::log(e);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    double sxx = stt - st * st / n;
    double sxy = sty - st * sy / n;

    DecayFit fit;
    fit.t_start = win.front().first;
    fit.t_end = win.back().first;

    double slope = sxx > 0 ? sxy / sxx : 0.0;
    double intercept = (sy - slope * st) / n;
    double ss_res = 0, ss_tot = 0, ymean = sy / n;
    for (const auto& [t, e] : win) {
        double y = std::log(e);
        double r = y - (intercept + slope * t);
        ss_res += r * r;
        ss_tot += (y - ymean) * (y - ymean);
    }
    if (ss_tot <= 1e-28 * n) {  // flat series: no decay, fit undefined
        fit.alpha = 0.0;
        fit.r2 = 0.0;
        fit.C = e0 > 0 ? std::exp(ymean) / e0 : 0.0;
        return fit;
    }
    fit.alpha = -0.5 * slope;
    fit.C = e0 > 0 ? std::exp(intercept) / e0 : 0.0;
    fit.r2 = std::max(0.0, 1.0 - ss_res / ss_tot);
    return fit;
}

DecayFit fit_decay(const TimeSeries& series, double t_start) {
    std::vector<std::pair<double, double>> te;
    te.reserve(series.rows.size());
    for (const auto& r : series.rows) te.emplace_back(r.t, r.energy.total());
    return fit_decay_values(te, t_start);
}

GronwallReport lyapunov_decay_check(const TimeSeries& series, double t_start) {
    GronwallReport rep;
    if (series.rows.size() < 3) return rep;
    double t_end = series.rows.back().t;
    if (t_start < 0) t_start = 0.2 * t_end;
    rep.t_start = t_start;
    rep.t_end = t_end;

    double c = std::numeric_limits<double>::infinity();
    bool any = false;
    for (size_t i = 1; i + 1 < series.rows.size(); ++i) {
        const auto& a = series.rows[i - 1];
        const auto& m = series.rows[i];
        const auto& b = series.rows[i + 1];
        if (m.t < t_start) continue;
        double e = m.energy.total();
        if (!(e > 0)) continue;
        double df = (b.lyapunov.total - a.lyapunov.total) / (b.t - a.t);
        c = std::min(c, -df / e);
        any = true;
    }
    if (!any) return rep;
    rep.c = c;
    rep.pass = c > 0;
    return rep;
}

void write_timeseries_csv(const TimeSeries& series, std::ostream& os) {
    os << "t,E_total,E_kin_w,E_kin_v,E_bend,E_shear,E_theta,E_q,"
          "diss_w,diss_v,diss_theta,diss_q,mean_theta,rot_v,div_v,"
          "F_total,F1,F2,F3,F4\n";
    char buf[64];
    auto put = [&](double x, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g%c", x, sep);
        os << buf;
    };
    for (const auto& r : series.rows) {
        put(r.t, ',');
        put(r.energy.total(), ',');
        put(r.energy.kin_w, ',');
        put(r.energy.kin_v, ',');
        put(r.energy.bend, ',');
        put(r.energy.shear, ',');
        put(r.energy.thermal, ',');
        put(r.energy.flux, ',');
        put(r.dissipation.w, ',');
        put(r.dissipation.v, ',');
        put(r.dissipation.theta, ',');
        put(r.dissipation.q, ',');
        put(r.mean_theta, ',');
        put(r.rot_v, ',');
        put(r.div_v, ',');
        put(r.lyapunov.total, ',');
        put(r.lyapunov.F1, ',');
        put(r.lyapunov.F2, ',');
        put(r.lyapunov.F3, ',');
        put(r.lyapunov.F4, '\n');
    }
}

std::vector<std::pair<double, double>> read_energy_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ConfigError("csv", "empty file");

    std::vector<std::string> cols;
    std::stringstream hs(header);
    std::string tok;
    while (std::getline(hs, tok, ',')) cols.push_back(tok);
    int t_col = -1, e_col = -1;
    for (size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "t") t_col = static_cast<int>(i);
        if (cols[i] == "E_total") e_col = static_cast<int>(i);
    }
    if (t_col < 0 || e_col < 0)
        throw ConfigError("csv", "header must contain columns t and E_total");

    std::vector<std::pair<double, double>> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<std::string> vals;
        while (std::getline(ls, tok, ',')) vals.push_back(tok);
        if (static_cast<int>(vals.size()) <= std::max(t_col, e_col))
            throw ConfigError("csv", "row has fewer columns than the header");
        try {
            out.emplace_back(std::stod(vals[t_col]), std::stod(vals[e_col]));
        } catch (const std::exception&) {
            throw ConfigError("csv", "non-numeric value in row");
        }
    }
    return out;
}

} // namespace rmt
