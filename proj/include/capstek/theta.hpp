#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "capstek/assembly.hpp"
#include "capstek/dtn.hpp"
#include "capstek/mesh.hpp"

namespace capstek {

inline constexpr double kThetaAlpha = 2.0;
inline constexpr int kThetaModes = 6;

struct Extremality {
    double res_bc = 0.0;  // |sigma1 + cot^2 r sigma0| / |sigma1|
    double res_v0 = 0.0;  // max deviation of the rescaled sigma0 boundary trace from cos r, relative
};

struct ThetaReport {
    double r = 0.0;
    double sigma0 = 0.0;
    double sigma1 = 0.0;
    double boundary_length = 0.0;
    double area = 0.0;
    double theta = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    double dirichlet_gap = 0.0;
    Extremality extremality;
};

double theta_bound(int genus, int boundary_count, double r);

/// (sigma0 cos^2 r + sigma1 sin^2 r) L + 2 A.
double theta_value(double sigma0, double sigma1, double boundary_length, double area, double r);

/// Theta_r at alpha = 2. When `spectrum_out` is given the spectrum used is
/// copied there.
ThetaReport theta_eval(const Mesh& mesh, const MetricField& metric, double r, double gap_floor = kDefaultGapFloor,
                       SpectrumResult* spectrum_out = nullptr);

Extremality extremality_check(const ThetaReport& report, const SpectrumResult& spectrum);

/// d sigma_k / dt for the conformal family e^{t w} g, from a precomputed
/// spectrum. Index 1 inside a multiple cluster throws AmbiguousDerivative
/// unless w acts as a scalar on the cluster.
double sigma_conformal_derivative(const Mesh& mesh, const MetricField& metric, const SpectrumResult& spectrum,
                                  int eigen_index, std::span<const double> w, double cluster_tol = 1e-2);
double sigma_conformal_derivative(const Mesh& mesh, const MetricField& metric, double alpha, int eigen_index,
                                  std::span<const double> w, double gap_floor = kDefaultGapFloor,
                                  double cluster_tol = 1e-2);

/// Per-vertex gradient of Theta_r with respect to the log conformal factor.
/// The sigma1 part is averaged over the sigma1 cluster.
std::vector<double> theta_gradient(const Mesh& mesh, const MetricField& metric, const SpectrumResult& spectrum,
                                   const ThetaReport& report, double cluster_tol = 1e-2);

struct OptimizeParams {
    int max_steps = 200;
    double step0 = 0.2;  // max change of the log factor on the first trial
    double gap_margin = 0.1;
    double smoothing = 100.0;  // implicit smoother strength, 0 disables
    double cluster_tol = 1e-2;
    double min_step = 1e-7;
    double gap_floor = kDefaultGapFloor;
};

struct OptimizeRow {
    int step = 0;
    double theta = 0.0;
    double sigma0 = 0.0;
    double sigma1 = 0.0;
    double gap = 0.0;
    double step_size = 0.0;
};

struct OptimizeTrace {
    std::vector<OptimizeRow> iterations;  // row 0 is the start metric
    MetricField final_metric;
    ThetaReport final_report;
    bool stalled = false;
};

OptimizeTrace optimize_conformal(const Mesh& mesh, const MetricField& metric0, double r,
                                 const OptimizeParams& params = {});

struct BlowdownRow {
    double r = 0.0;
    double sigma0 = 0.0;
};

std::vector<BlowdownRow> admissibility_blowdown(std::span<const double> r_values, int n_rings, int n_angular,
                                                double gap_floor = kDefaultGapFloor);

/// exp of a random trigonometric polynomial in the plane coordinates, scaled to
/// max |log factor| = amplitude. Redraws until admissible.
MetricField random_conformal_metric(const Mesh& mesh, std::uint64_t seed, double amplitude = 0.5, int degree = 3);

nlohmann::ordered_json theta_report_to_json(const ThetaReport& report);

}  // namespace capstek
