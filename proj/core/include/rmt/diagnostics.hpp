#pragma once

#include <iosfwd>
#include <optional>

#include "rmt/bogovskii.hpp"
#include "rmt/dynamics.hpp"

namespace rmt {

struct LyapunovConfig {
    double N = 50.0;
    double N4 = 5.0;
};

struct LyapunovParts {
    double F1 = 0, F2 = 0, F3 = 0, F4 = 0;
    double total = 0;  // N * E + F1 + F2 + F3 + N4 * F4
};

struct TimeSeriesRow {
    double t = 0;
    EnergyParts energy;
    DissipationParts dissipation;
    double mean_theta = 0;  // lumped mean
    double rot_v = 0;       // || rot v ||_L2
    double div_v = 0;       // || div v ||_L2
    LyapunovParts lyapunov;
};

struct TimeSeries {
    std::vector<TimeSeriesRow> rows;
};

struct DecayFit {
    double alpha = 0;  // E(t) ~ C E(0) exp(-2 alpha t)
    double C = 0;
    double r2 = 0;
    double t_start = 0, t_end = 0;
};

struct GronwallReport {
    double c = 0;  // min of -dF/dt / E over the window (centered differences)
    bool pass = false;
    double t_start = 0, t_end = 0;
};

/// Clamped Poisson solve A_lap u = B_div v; satisfies ||grad u|| <= ||v||.
Vec poisson_auxiliary(const AssembledOperators& ops, const Vec& v);

LyapunovParts lyapunov_F(const AssembledOperators& ops, const PlateParams& p,
                         const State& s, const LyapunovConfig& cfg,
                         const BogovskiiOperator& bog);

/// Streaming diagnostics for a simulation run; caches the Poisson and
/// Bogovskii factorizations across steps.
class DiagnosticsEngine {
public:
    DiagnosticsEngine(const AssembledOperators& ops, const Mesh& m, const PlateParams& p,
                      const LyapunovConfig& cfg, bool with_lyapunov = true);
    ~DiagnosticsEngine();

    const TimeSeriesRow& process(const StepReport& rep);
    const TimeSeries& series() const { return series_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    TimeSeries series_;
};

/// Least squares on (t, log E) over [t_start, end of series].
DecayFit fit_decay(const TimeSeries& series, double t_start);
DecayFit fit_decay_values(const std::vector<std::pair<double, double>>& te, double t_start);

GronwallReport lyapunov_decay_check(const TimeSeries& series,
                                    double t_start = -1.0);

/// CSV with header t, E_total, E_kin_w, E_kin_v, E_bend, E_shear, E_theta,
/// E_q, diss_w, diss_v, diss_theta, diss_q, mean_theta, rot_v, div_v,
/// F_total, F1, F2, F3, F4. Floats at 17 significant digits.
void write_timeseries_csv(const TimeSeries& series, std::ostream& os);

/// Parse (t, E_total) pairs back from the CSV schema; throws ConfigError on
/// schema mismatch.
std::vector<std::pair<double, double>> read_energy_csv(std::istream& is);

} // namespace rmt
