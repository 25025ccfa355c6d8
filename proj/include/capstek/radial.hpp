#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace capstek {

/// Geodesic cap B^2(r), metric dt^2 + sin^2(t) dtheta^2 on [0, r].
struct CapDomain {
    double r = 0.0;
};

/// Rotational annulus of the minimal family, metric ds^2 + (1 - rho(s)^2) dtheta^2
/// on [-s0, s0] with rho(s) = sqrt(1/2 - a cos 2s).
struct AnnulusDomain {
    double a = 0.0;
    double s0 = 0.0;
};

using RadialDomain = std::variant<CapDomain, AnnulusDomain>;

enum class Parity { none, even, odd };

struct RadialProblem {
    RadialDomain domain;
    int k = 0;
    double alpha = 2.0;
};

struct RadialOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int grid_points = 401;
};

/// One tabulated mode profile on a uniform grid over the integration interval
/// ([0, r] for caps, [0, s0] for annuli).
struct RadialProfile {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> derivative;
};

/// Separated Steklov spectrum of one angular mode.
///
/// The boundary data of a single angular mode is one number per boundary
/// circle, so a cap carries exactly one eigenvalue per k and an annulus one per
/// (k, parity). `count` truncates; it never produces more.
struct ModeSpectrum {
    RadialProblem problem;
    std::vector<double> eigenvalues;
    std::vector<RadialProfile> radial_profiles;
    std::vector<Parity> parity;
};

ModeSpectrum cap_mode_eigs(double r, int k, int count, double alpha = 2.0, const RadialOptions& opts = {});
ModeSpectrum annulus_mode_eigs(double a, double s0, int k, int count, double alpha = 2.0,
                               const RadialOptions& opts = {});

/// Explicit solutions of the k = 0 and k = 1 cap equations at frequency 2:
/// cos t and sin t (regular) and their singular partners y, z.
struct CapClosedForms {
    double cos_t;
    double sin_t;
    double y;
    double z;
};

CapClosedForms cap_closed_forms(double t);

/// Max-norm residual of the mode equation along a tabulated profile, relative
/// to max|value|. Second derivatives come from a fourth-order difference of
/// the tabulated first derivative.
double mode_residual(const RadialProblem& problem, const RadialProfile& profile);

struct LabeledEigenvalue {
    double value = 0.0;
    int k = 0;
    Parity parity = Parity::none;
};

/// Merge per-mode spectra into one ascending list; modes with k >= 1 appear
/// twice (cos and sin). Throws InvalidArgument when domains or alpha differ.
std::vector<LabeledEigenvalue> merge_modes(const std::vector<ModeSpectrum>& spectra, int count);

/// First Dirichlet eigenvalue of the cap B^2(r), located by bisection on the
/// first zero of the regular radial solution.
double cap_dirichlet_ground_state(double r, const RadialOptions& opts = {});

const char* parity_name(Parity p);
nlohmann::ordered_json mode_spectrum_to_json(const ModeSpectrum& spec);

}  // namespace capstek
