#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "capstek/assembly.hpp"
#include "capstek/mesh.hpp"

namespace capstek {

/// Relative floor on the discrete Dirichlet gap. The discrete gap of a metric
/// with lambda_0^D = alpha is positive but O(h^2), so admissibility requires
/// gap > gap_floor * lambda_0^D.
inline constexpr double kDefaultGapFloor = 1e-2;

/// Certificate for lambda_0^D(g) > alpha on the discrete interior space.
struct AdmissibilityReport {
    double alpha = 0.0;
    double lambda0_dirichlet = 0.0;
    double gap = 0.0;  // lambda0_dirichlet - alpha
    bool admissible = false;  // gap > gap_floor * lambda0_dirichlet
};

struct SpectrumResult {
    double alpha = 0.0;
    std::vector<double> eigenvalues;  // ascending
    std::vector<int> boundary_vertices;  // vertex index of each boundary-mode row
    std::vector<Eigen::VectorXd> boundary_modes;  // B-orthonormal
    std::vector<Eigen::VectorXd> extensions;      // full vertex vectors
    AdmissibilityReport admissibility;
};

/// Smallest eigenvalue of K_II u = lambda M_II u by inverse iteration.
AdmissibilityReport dirichlet_gap(const Mesh& mesh, const MetricField& metric, double alpha,
                                  double gap_floor = kDefaultGapFloor);
AdmissibilityReport dirichlet_gap(const Mesh& mesh, const OperatorBundle& ops, double gap_floor = kDefaultGapFloor);

/// Lowest `count` eigenpairs of the Schur-complement pencil
/// S u = sigma B_GG u, S = A_GG - A_GI A_II^{-1} A_IG.
/// Throws NotAdmissible when A_II is not positive definite.
SpectrumResult steklov_spectrum(const Mesh& mesh, const MetricField& metric, double alpha, int count,
                                double gap_floor = kDefaultGapFloor);
SpectrumResult steklov_spectrum(const Mesh& mesh, const OperatorBundle& ops, int count,
                                double gap_floor = kDefaultGapFloor);

/// Connected components of {v > 0} and {v < 0} in the vertex graph. Values
/// with |v| <= zero_tol * max|v| belong to no component.
int nodal_domains(const Mesh& mesh, std::span<const double> values, double zero_tol = 0.0);
int nodal_domains(const Mesh& mesh, const Eigen::VectorXd& values, double zero_tol = 0.0);

/// Greedy clustering of a sorted list: neighbours join when their gap is at
/// most rel_tol * max(1, |sigma|).
std::vector<int> cluster_multiplicities(std::span<const double> eigenvalues, double rel_tol = 1e-2);

/// x^T A x / x_G^T B x_G for a full vertex vector.
double steklov_rayleigh_quotient(const OperatorBundle& ops, const Eigen::VectorXd& x);

}  // namespace capstek
