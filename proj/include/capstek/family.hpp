#pragma once

#include <array>
#include <vector>

#include <nlohmann/json.hpp>

#include "capstek/assembly.hpp"
#include "capstek/mesh.hpp"

namespace capstek {

/// Profile functions of the rotational minimal annulus in S^3:
/// rho = sqrt(1/2 - a cos 2s), rho_bar = sqrt(1/2 + a cos 2s),
/// phi = sqrt(1/4 - a^2) int_0^s dt / ((1/2 - a cos 2t) sqrt(1/2 + a cos 2t)),
/// h = int_0^s (1/2 + a cos 2t)^{-3/2} dt.
struct RotationalProfile {
    double rho = 0.0;
    double rho_bar = 0.0;
    double phi = 0.0;
    double h = 0.0;
};

RotationalProfile rho_phi_h(double a, double s);

/// Member of the family meeting the sphere of radius r orthogonally.
struct FamilyPoint {
    double r = 0.0;
    double a = 0.0;
    double s0 = 0.0;
    double mu = 0.0;
    std::array<double, 4> residuals{};  // coordinate Robin residuals at s0
    bool embedded = false;
};

struct FamilyOptions {
    double r_step = 0.02;      // continuation step from pi/2
    double newton_tol = 1e-13; // on max(|F1|, |F2|)
    int max_newton = 60;
};

/// F1 = rho cos phi (s0) - cos r, F2 = d/ds[rho cos phi](s0) + sin r.
std::array<double, 2> family_equations(double a, double s0, double r);

/// Solve (F1, F2) = 0 by damped Newton with a finite-difference Jacobian,
/// continued downward in r from the closed-form point (0, pi/(2 sqrt 2)) at
/// r = pi/2.
FamilyPoint solve_family(double r, const FamilyOptions& opts = {});

/// Solve a batch of radii along one continuation chain (results follow the
/// input order).
std::vector<FamilyPoint> solve_family_grid(const std::vector<double>& radii, const FamilyOptions& opts = {});

/// Gap between the first two k = 1 eigenvalues:
/// 1 / ((1 - rho(s0)^2)^{3/2} int_0^{s0} (1 - rho^2)^{-3/2} dt).
double mu_coefficient(double a, double s0);

/// Robin residuals of the four coordinates at s = s0, written as
/// cos r phi_0' + sin r phi_0 and sin r phi_i' - cos r phi_i so that they stay
/// finite at r = pi/2.
std::array<double, 4> free_boundary_residuals(const FamilyPoint& point);

/// d/ds[rho cos phi] < 0 on a uniform grid of (0, s0].
bool is_embedded(double a, double s0, int samples = 2000);

/// Rotational annulus on the cylinder reference mesh with its induced metric
/// diag(1, 1 - rho^2) and the four coordinate fields.
struct ImmersedAnnulus {
    Mesh mesh;
    MetricField metric;
    std::array<std::vector<double>, 4> coordinates;
};

ImmersedAnnulus immerse(const FamilyPoint& point, int n_s, int n_angular);

/// Per-triangle first fundamental form of a piecewise-linear map into R^n,
/// (g11, g12, g22) in reference coordinates.
std::vector<std::array<double, 3>> induced_metric(const Mesh& mesh, const std::vector<std::vector<double>>& coords);

/// Area of the annulus, 2 pi int_{-s0}^{s0} rho_bar ds.
double family_area(double a, double s0);

/// Length of its boundary, 2 * 2 pi rho_bar(s0).
double family_boundary_length(double a, double s0);

nlohmann::ordered_json family_point_to_json(const FamilyPoint& p);

}  // namespace capstek
