#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vforge/solvers.hpp"

namespace vforge::scans {

struct ScanGrid {
    std::vector<double> P_values;
    std::vector<double> a_values;
};

/// count points from lo to hi, equally spaced in log(P); both ends included.
std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

/// 200 log-spaced P in [1e-2, 1e4] times 100 angles from -1 + 1e-6 to 0.9.
ScanGrid default_floor_grid();

/// One evaluated grid point. alpha is NaN for families without a halo weight; R is the outer
/// radius of the spatial support.
struct ScanRow {
    std::string family;
    double P;
    double a;
    double alpha;
    double R;
    double KE;
    double PE;
    double E;
    double V;
    double l32_norm;
};

inline constexpr const char* kCsvHeader = "family,P,a,alpha,R,KE,PE,E,V,l32_norm";

/// Header plus one row per point, 17 significant digits, NaN written as an empty field.
void write_csv(std::ostream& out, std::span<const ScanRow> rows);

struct FloorResult {
    double min_virial;
    double argmin_P;
    double argmin_a;
    std::vector<ScanRow> rows;  // grid order: P outer, a inner
    /// Largest relative closed-form/quadrature discrepancy at the cross-checked point.
    double crosscheck_discrepancy;
};

/// Zero-energy uniform balls R = R(P) over the grid (closed-form pipeline).
FloorResult uniform_ball_floor(const ScanGrid& grid);
/// Single-threaded reference for uniform_ball_floor.
FloorResult uniform_ball_floor_serial(const ScanGrid& grid);

/// Least-squares line through (log x, log y).
struct FitResult {
    double slope;
    double intercept;
    double max_residual;  // in log space
    double range_lo;
    double range_hi;
    std::size_t points;
};

FitResult fit_power_law(std::span<const double> x, std::span<const double> y);

/// Disjoint core-halo with R1 = P^-2, R2 = P, R3 = P^2 (alpha left at 0, to be solved).
CoreHalo scaling_family(double P, double a);

struct ScalingPoint {
    double P;
    bool solved;
    std::string error;
    ScanRow row;
};

struct ScalingResult {
    FitResult alpha_fit;   // log alpha against log P
    FitResult virial_fit;  // log(-V) against log P
    std::vector<ScalingPoint> points;
};

/// Solves alpha(P) for the scaling family at every P and fits both power laws over the
/// points that solved. Needs at least 8 grid points and 5 successful solves.
ScalingResult asymptotic_scaling(std::span<const double> P_grid, double a);
ScalingResult asymptotic_scaling_serial(std::span<const double> P_grid, double a);

/// Smallest grid P whose scaling family (a = -0.9 by default) has V < threshold.
double virial_unbounded_below(double threshold);
double virial_unbounded_below(double threshold, std::span<const double> P_grid, double a = -0.9);

/// Closed-form row for a fully specified family.
ScanRow evaluate_row(const Family& family);

/// Worker count for the parallel scans: VIRIAL_FORGE_THREADS if set to a positive
/// integer, else the OpenMP default.
int thread_cap();

}  // namespace vforge::scans
