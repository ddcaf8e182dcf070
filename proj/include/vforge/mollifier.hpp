#pragma once

#include <string>
#include <vector>

#include "vforge/functionals.hpp"
#include "vforge/profiles.hpp"
#include "vforge/solvers.hpp"

namespace vforge {

enum MollifyTarget : unsigned {
    kSmoothSpatial = 1u,
    kSmoothMomentum = 2u,
    kSmoothAngular = 4u,
    kSmoothAll = 7u,
};

enum class DeltaScale {
    Absolute,                // delta is the ramp half-width itself
    RelativeToSmallestPiece  // delta times the narrowest bounded piece of each factor
};

inline constexpr double kDefaultRelativeDelta = 1e-3;

struct MollifySpec {
    double delta = kDefaultRelativeDelta;
    DeltaScale scale = DeltaScale::RelativeToSmallestPiece;
    unsigned targets = kSmoothAll;
};

/// Replaces every jump or kink at an interior breakpoint b by a cubic Hermite ramp on
/// [b - delta, b + delta] matching the neighbouring values and slopes, so the result is C^1.
/// Between two plateaus the ramp is the smoothstep 3t^2 - 2t^3. Throws RampOverlap when a
/// piece is too narrow to host its ramps. delta = 0 returns the profile unchanged.
PiecewiseProfile mollify(const PiecewiseProfile& profile, double delta);
AngularProfile mollify(const AngularProfile& angular, double delta);

/// Half-width actually used for a factor under the given spec.
double resolved_delta(const PiecewiseProfile& profile, const MollifySpec& spec);
double resolved_delta(const AngularProfile& angular, const MollifySpec& spec);

SeparableAnsatz mollify(const SeparableAnsatz& ansatz, const MollifySpec& spec);

struct Rebalanced {
    Family family;  // free parameter re-solved on the mollified profiles
    SeparableAnsatz ansatz;
    FunctionalReport report;  // quadrature route
    Certificate certificate;
};

/// Mollifies the family's step profiles and re-solves its zero-energy parameter (R, alpha or
/// P) with quadrature-evaluated functionals on the smoothed profiles.
Rebalanced rebalance(const Family& family, const MollifySpec& spec,
                     double energy_tolerance = kDefaultEnergyTolerance);

struct Drift {
    std::string name;
    double step;
    double smooth;
    double abs_change() const;
};

/// mass, kinetic, potential, total energy, virial and L^{3/2} norm side by side.
std::vector<Drift> drift_table(const FunctionalReport& step, const FunctionalReport& smooth);

}  // namespace vforge
