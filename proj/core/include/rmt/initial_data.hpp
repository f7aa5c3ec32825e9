#pragma once

#include <cstdint>

#include "rmt/dynamics.hpp"
#include "rmt/spectral.hpp"

namespace rmt {

enum class PresetKind { Zero, RadialGaussian, SolenoidalEigenmode, RandomClamped };

struct InitialPreset {
    PresetKind kind = PresetKind::Zero;
    double amplitude = 1.0;
    double width = 0.3;      // gaussian radial width
    std::uint64_t seed = 1;  // random-clamped
};

/// Vertex lumped areas (one third of each incident triangle).
Vec lumped_areas(const Mesh& m);

/// Subtract the lumped mean; the result integrates to zero exactly.
Vec mean_zero_project(const Vec& theta, const Mesh& m);

/// Build the preset's state. Radial presets need a disk mesh; the
/// solenoidal preset needs an eigenmode. Deterministic given its inputs.
State build_initial(const InitialPreset& preset, const Mesh& m,
                    const EigenResult* eig = nullptr);

} // namespace rmt
