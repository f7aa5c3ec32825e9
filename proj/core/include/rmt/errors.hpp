#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A physical coefficient violated its positivity constraint.
class NonPositiveCoefficient : public Error {
public:
    explicit NonPositiveCoefficient(const std::string& field)
        : Error("non-positive coefficient: " + field), field(field) {}
    std::string field;
};

/// mu outside the open interval (-1, 1).
class MuOutOfRange : public Error {
public:
    MuOutOfRange() : Error("mu must lie strictly inside (-1, 1)") {}
};

/// The angle-damping matrix is not symmetric positive semidefinite.
class DampNotPSD : public Error {
public:
    DampNotPSD() : Error("damping matrix is not symmetric positive semidefinite") {}
};

/// Mesh resolution too coarse to produce a valid triangulation.
class DegenerateResolution : public Error {
public:
    explicit DegenerateResolution(const std::string& msg)
        : Error("degenerate resolution: " + msg) {}
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class NoConvergence : public Error {
public:
    NoConvergence(int iterations, double residual)
        : Error("solver failed to converge after " + std::to_string(iterations)
                + " iterations (residual " + std::to_string(residual) + ")"),
          iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

/// Input scalar field has a nonzero mean where a zero-mean field is required.
class NonZeroMean : public Error {
public:
    explicit NonZeroMean(double defect)
        : Error("field has nonzero mean (defect " + std::to_string(defect) + ")"),
          defect(defect) {}
    double defect;
};

class MissingEigenmode : public Error {
public:
    MissingEigenmode() : Error("solenoidal-eigenmode preset requires an eigen result") {}
};

class GeometryMismatch : public Error {
public:
    explicit GeometryMismatch(const std::string& msg) : Error("geometry mismatch: " + msg) {}
};

/// Malformed or inconsistent run configuration; carries the offending field.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& field, const std::string& msg)
        : Error("config error in '" + field + "': " + msg), field(field) {}
    std::string field;
};

class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& msg) : Error("insufficient data: " + msg) {}
};

class NonPositiveEnergy : public Error {
public:
    NonPositiveEnergy() : Error("energy must be positive throughout the fit window") {}
};

} // namespace rmt
