#include <benchmark/benchmark.h>

#include "rmt/bogovskii.hpp"
#include "rmt/dynamics.hpp"
#include "rmt/initial_data.hpp"

namespace {

rmt::PlateParams default_params() {
    rmt::RawParams raw;
    raw.scalars["mu"] = 0.3;
    raw.scalars["d"] = 1.0;
    return rmt::validate_params(raw);
}

void BM_assemble(benchmark::State& state) {
    double h = 1.0 / static_cast<double>(state.range(0));
    rmt::Mesh mesh = rmt::mesh_disk(1.0, h);
    rmt::PlateParams p = default_params();
    rmt::StiffnessS S = rmt::build_stiffness_S(p);
    for (auto _ : state) {
        auto ops = rmt::assemble(mesh, S);
        benchmark::DoNotOptimize(ops.A_korn);
    }
    state.SetLabel(std::to_string(mesh.num_vertices()) + " vertices");
}
BENCHMARK(BM_assemble)->Arg(10)->Arg(20)->Arg(40);

void BM_pcg_poisson(benchmark::State& state) {
    double h = 1.0 / static_cast<double>(state.range(0));
    rmt::Mesh mesh = rmt::mesh_disk(1.0, h);
    rmt::PlateParams p = default_params();
    auto ops = rmt::assemble(mesh, rmt::build_stiffness_S(p));
    rmt::DofMap map = rmt::make_dof_map(ops.n, ops.dirichlet_mask);
    rmt::SpMat A = rmt::restrict_matrix(ops.A_lap, map, map);
    rmt::Vec b = rmt::Vec::Ones(map.n_reduced);
    for (auto _ : state) {
        auto res = rmt::solve_spd(A, b);
        benchmark::DoNotOptimize(res.x);
    }
}
BENCHMARK(BM_pcg_poisson)->Arg(10)->Arg(20)->Arg(40);

void BM_midpoint_step(benchmark::State& state) {
    double h = 1.0 / static_cast<double>(state.range(0));
    rmt::Mesh mesh = rmt::mesh_disk(1.0, h);
    rmt::PlateParams p = default_params();
    auto ops = rmt::assemble(mesh, rmt::build_stiffness_S(p));
    rmt::InitialPreset preset;
    preset.kind = rmt::PresetKind::RadialGaussian;
    rmt::State s = rmt::build_initial(preset, mesh);
    double dt = rmt::default_dt(p, mesh.h);
    rmt::MidpointStepper stepper(ops, p, rmt::ThermalBC::Neumann, dt);
    double t = 0;
    for (auto _ : state) {
        auto rep = stepper.step(s, t);
        t = rep.t;
        benchmark::DoNotOptimize(rep.energy_parts);
    }
}
BENCHMARK(BM_midpoint_step)->Arg(10)->Arg(20);

void BM_bogovskii_apply(benchmark::State& state) {
    double h = 1.0 / static_cast<double>(state.range(0));
    rmt::Mesh mesh = rmt::mesh_disk(1.0, h);
    rmt::PlateParams p = default_params();
    auto ops = rmt::assemble(mesh, rmt::build_stiffness_S(p));
    rmt::BogovskiiOperator bog(ops, mesh);
    rmt::Vec f(ops.n);
    for (int i = 0; i < ops.n; ++i)
        f[i] = mesh.vertices[i][0] * mesh.vertices[i][0];
    f = rmt::mean_zero_project(f, mesh);
    for (auto _ : state) {
        rmt::Vec u = bog.apply_field(f);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_bogovskii_apply)->Arg(10)->Arg(20);

} // namespace

BENCHMARK_MAIN();
