#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include "capstek/mesh.hpp"

namespace capstek {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class MetricKind { conformal, general };

/// Riemannian metric on a mesh.
///
/// Conformal: g = lambda * (flat reference metric), with log(lambda) stored per
/// vertex and lambda interpolated linearly inside triangles.
/// General: one symmetric 2x2 matrix (g11, g12, g22) per triangle, expressed in
/// reference coordinates.
struct MetricField {
    MetricKind kind = MetricKind::conformal;
    std::vector<double> log_factor;
    std::vector<std::array<double, 3>> g;

    bool is_conformal() const { return kind == MetricKind::conformal; }
};

MetricField flat_metric(const Mesh& mesh);
MetricField conformal_metric(std::vector<double> log_factor);
MetricField general_metric(std::vector<std::array<double, 3>> g);

/// Stereographic pull-back of the round cap of radius r to the unit disk:
/// lambda(w) = 4 T^2 / (1 + T^2 |w|^2)^2 with T = tan(r/2).
double cap_conformal_factor(double r, const Point2& point);

/// Conformal metric of the geodesic cap B^2(r) on a disk mesh.
MetricField cap_metric(const Mesh& mesh, double r);

/// log-factor + eps * w. Throws InvalidArgument on a general metric.
MetricField perturb_conformal(const MetricField& metric, std::span<const double> w, double eps);

/// Throws InvalidArgument naming the first offending vertex or triangle.
void check_metric(const Mesh& mesh, const MetricField& metric);

/// Finite-element matrices for the form  int <du,dv> - alpha int u v  and the
/// boundary pairing  int_{boundary} u v.
struct OperatorBundle {
    double alpha = 0.0;
    SparseMatrix K;  // stiffness
    SparseMatrix M;  // area mass
    SparseMatrix B;  // boundary mass (nonzero only between boundary vertices)
    SparseMatrix A;  // K - alpha M
};

OperatorBundle assemble_operator(const Mesh& mesh, const MetricField& metric, double alpha);

struct Measure {
    double area = 0.0;
    std::vector<double> loop_lengths;
    double boundary_length = 0.0;
};

Measure measure(const Mesh& mesh, const MetricField& metric);

/// Derivative of x^T M y with respect to each vertex log-factor (conformal only).
std::vector<double> mass_sensitivity(const Mesh& mesh, const MetricField& metric, std::span<const double> x,
                                     std::span<const double> y);

/// Derivative of x^T B y with respect to each vertex log-factor (conformal only).
std::vector<double> boundary_sensitivity(const Mesh& mesh, const MetricField& metric,
                                         std::span<const double> x, std::span<const double> y);

nlohmann::ordered_json metric_to_json(const MetricField& metric);
MetricField metric_from_json(const nlohmann::json& j);

}  // namespace capstek
