#include "capstek/family.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "capstek/errors.hpp"

namespace capstek {

namespace {

constexpr double kMinA = -0.5 + 1e-9;
constexpr double kQuadTol = 1e-12;
constexpr unsigned kQuadDepth = 10;

template <class F>
double integrate_from_zero(F&& f, double s) {
    if (s == 0.0) return 0.0;
    const double lo = std::min(0.0, s);
    const double hi = std::max(0.0, s);
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, kQuadDepth, kQuadTol);
    return s > 0.0 ? v : -v;
}

void check_a(double a) {
    if (!(a > -0.5) || a > 0.0 || !std::isfinite(a)) throw InvalidArgument("family: a must lie in (-1/2, 0]");
}

double phi_of(double a, double s) {
    const double c = std::sqrt(0.25 - a * a);
    return c * integrate_from_zero(
                   [a](double t) {
                       const double c2 = std::cos(2.0 * t);
                       return 1.0 / ((0.5 - a * c2) * std::sqrt(0.5 + a * c2));
                   },
                   s);
}

double h_of(double a, double s) {
    return integrate_from_zero([a](double t) { return std::pow(0.5 + a * std::cos(2.0 * t), -1.5); }, s);
}

// Values and s-derivatives of the four coordinates at s (theta = 0 for 2, 3).
struct CoordinateJet {
    std::array<double, 4> value;
    std::array<double, 4> deriv;
};

CoordinateJet coordinate_jet(double a, double s, double phi) {
    const double c2 = std::cos(2.0 * s);
    const double s2 = std::sin(2.0 * s);
    const double rho = std::sqrt(0.5 - a * c2);
    const double rho_bar = std::sqrt(0.5 + a * c2);
    const double drho = a * s2 / rho;
    const double drho_bar = -a * s2 / rho_bar;
    const double dphi = std::sqrt(0.25 - a * a) / (rho * rho * rho_bar);
    CoordinateJet j{};
    j.value = {rho * std::cos(phi), rho * std::sin(phi), rho_bar, rho_bar};
    j.deriv = {drho * std::cos(phi) - rho * dphi * std::sin(phi), drho * std::sin(phi) + rho * dphi * std::cos(phi),
               drho_bar, drho_bar};
    return j;
}

FamilyPoint finish_point(double r, double a, double s0) {
    FamilyPoint p;
    p.r = r;
    p.a = a;
    p.s0 = s0;
    p.mu = mu_coefficient(a, s0);
    p.residuals = free_boundary_residuals(p);
    p.embedded = is_embedded(a, s0);
    return p;
}

// F1, F2 plus the rho_bar Robin condition; the 2x2 system alone is nearly singular.
std::array<double, 3> augmented(double a, double s0, double r) {
    const auto f = family_equations(a, s0, r);
    const double c2 = std::cos(2.0 * s0);
    const double rho_bar = std::sqrt(0.5 + a * c2);
    const double drho_bar = -a * std::sin(2.0 * s0) / rho_bar;
    return {f[0], f[1], std::sin(r) * drho_bar - std::cos(r) * rho_bar};
}

double max_abs(const std::array<double, 3>& f) { return std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])}); }

// Gauss-Newton on (a, s0) at fixed r from the given seed; false on failure.
bool newton(double r, double& a, double& s0, const FamilyOptions& opts) {
    auto f = augmented(a, s0, r);
    for (int iter = 0; iter < opts.max_newton; ++iter) {
        if (max_abs(f) <= opts.newton_tol) return true;
        const double h = 1e-7;
        const double a_lo = std::max(kMinA, a - h);
        const double a_hi = std::min(0.0, a + h);
        const auto fa_hi = augmented(a_hi, s0, r);
        const auto fa_lo = augmented(a_lo, s0, r);
        const auto fs_hi = augmented(a, s0 + h, r);
        const auto fs_lo = augmented(a, s0 - h, r);
        Eigen::Matrix<double, 3, 2> jac;
        Eigen::Vector3d rhs;
        for (int i = 0; i < 3; ++i) {
            jac(i, 0) = (fa_hi[i] - fa_lo[i]) / (a_hi - a_lo);
            jac(i, 1) = (fs_hi[i] - fs_lo[i]) / (2.0 * h);
            rhs(i) = -f[i];
        }
        const Eigen::Vector2d d = jac.colPivHouseholderQr().solve(rhs);
        if (!d.allFinite()) return false;

        double step = 1.0;
        bool accepted = false;
        while (step > 1e-6) {
            const double a_new = std::clamp(a + step * d(0), kMinA, 0.0);
            const double s_new = s0 + step * d(1);
            if (s_new > 0.0) {
                const auto f_new = augmented(a_new, s_new, r);
                if (max_abs(f_new) < max_abs(f)) {
                    a = a_new;
                    s0 = s_new;
                    f = f_new;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) return max_abs(f) <= 1e3 * opts.newton_tol;
    }
    return max_abs(f) <= opts.newton_tol;
}

}  // namespace

RotationalProfile rho_phi_h(double a, double s) {
    check_a(a);
    RotationalProfile p;
    const double c2 = std::cos(2.0 * s);
    p.rho = std::sqrt(0.5 - a * c2);
    p.rho_bar = std::sqrt(0.5 + a * c2);
    p.phi = phi_of(a, s);
    p.h = h_of(a, s);
    return p;
}

std::array<double, 2> family_equations(double a, double s0, double r) {
    const auto jet = coordinate_jet(a, s0, phi_of(a, s0));
    return {jet.value[0] - std::cos(r), jet.deriv[0] + std::sin(r)};
}

std::vector<FamilyPoint> solve_family_grid(const std::vector<double>& radii, const FamilyOptions& opts) {
    // Radii within kSnap above pi/2 (decimal input of pi/2) are read as pi/2.
    constexpr double kSnap = 1e-9;
    std::vector<double> snapped = radii;
    for (double& r : snapped) {
        if (!(r > 0.0) || r > std::numbers::pi / 2 + kSnap) throw InvalidArgument("solve_family: r must lie in (0, pi/2]");
        r = std::min(r, std::numbers::pi / 2);
    }
    std::vector<double> order = snapped;
    std::sort(order.begin(), order.end(), std::greater<>());
    order.erase(std::unique(order.begin(), order.end()), order.end());

    std::map<double, FamilyPoint> solved;
    double r_cur = std::numbers::pi / 2;
    double a = 0.0;
    double s0 = std::numbers::pi / (2.0 * std::numbers::sqrt2);
    if (!newton(r_cur, a, s0, opts)) throw SolverFailure("solve_family: Newton failed at the seed r = pi/2");

    for (double target : order) {
        double step = opts.r_step;
        while (r_cur > target) {
            const double r_next = std::max(target, r_cur - step);
            double a_try = a, s_try = s0;
            if (newton(r_next, a_try, s_try, opts)) {
                r_cur = r_next;
                a = a_try;
                s0 = s_try;
                step = std::min(opts.r_step, 2.0 * step);
            } else {
                step *= 0.5;
                if (step < 1e-8)
                    throw SolverFailure("solve_family: continuation failed below r = " + std::to_string(r_cur));
            }
        }
        if (r_cur == target || std::abs(r_cur - target) < 1e-15) {
            // Polish at the exact target (also covers the seed itself).
            double a_fin = a, s_fin = s0;
            if (!newton(target, a_fin, s_fin, opts))
                throw SolverFailure("solve_family: Newton failed at r = " + std::to_string(target));
            solved[target] = finish_point(target, a_fin, s_fin);
        }
    }

    std::vector<FamilyPoint> out;
    out.reserve(radii.size());
    for (double r : snapped) out.push_back(solved.at(r));
    return out;
}

FamilyPoint solve_family(double r, const FamilyOptions& opts) { return solve_family_grid({r}, opts).front(); }

double mu_coefficient(double a, double s0) {
    check_a(a);
    if (!(s0 > 0.0)) throw InvalidArgument("mu_coefficient: s0 must be positive");
    const double rho_bar = std::sqrt(0.5 + a * std::cos(2.0 * s0));
    return 1.0 / (rho_bar * rho_bar * rho_bar * h_of(a, s0));
}

std::array<double, 4> free_boundary_residuals(const FamilyPoint& point) {
    const auto jet = coordinate_jet(point.a, point.s0, phi_of(point.a, point.s0));
    const double c = std::cos(point.r);
    const double s = std::sin(point.r);
    std::array<double, 4> res{};
    res[0] = c * jet.deriv[0] + s * jet.value[0];
    for (int i = 1; i < 4; ++i) res[i] = s * jet.deriv[i] - c * jet.value[i];
    return res;
}

bool is_embedded(double a, double s0, int samples) {
    double prev_s = 0.0;
    double phi = 0.0;
    const double c = std::sqrt(0.25 - a * a);
    for (int i = 1; i <= samples; ++i) {
        const double s = s0 * i / samples;
        // short smooth pieces: a fixed Gauss rule is exact to rounding
        phi += c * boost::math::quadrature::gauss<double, 15>::integrate(
                       [a](double t) {
                           const double c2 = std::cos(2.0 * t);
                           return 1.0 / ((0.5 - a * c2) * std::sqrt(0.5 + a * c2));
                       },
                       prev_s, s);
        prev_s = s;
        if (!(coordinate_jet(a, s, phi).deriv[0] < 0.0)) return false;
    }
    return true;
}

ImmersedAnnulus immerse(const FamilyPoint& point, int n_s, int n_angular) {
    ImmersedAnnulus out;
    out.mesh = build_cylinder_mesh(point.s0, n_s, n_angular);
    const auto& mesh = out.mesh;

    std::map<double, RotationalProfile> rows;
    for (const auto& v : mesh.vertices) {
        if (!rows.count(v[0])) rows.emplace(v[0], rho_phi_h(point.a, v[0]));
    }
    for (auto& c : out.coordinates) c.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& prof = rows.at(mesh.vertices[i][0]);
        const double theta = mesh.vertices[i][1];
        out.coordinates[0][i] = prof.rho * std::cos(prof.phi);
        out.coordinates[1][i] = prof.rho * std::sin(prof.phi);
        out.coordinates[2][i] = prof.rho_bar * std::cos(theta);
        out.coordinates[3][i] = prof.rho_bar * std::sin(theta);
    }

    std::vector<std::array<double, 3>> g(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double s_mid = (mesh.vertices[tri[0]][0] + mesh.vertices[tri[1]][0] + mesh.vertices[tri[2]][0]) / 3.0;
        g[t] = {1.0, 0.0, 0.5 + point.a * std::cos(2.0 * s_mid)};
    }
    out.metric = general_metric(std::move(g));
    return out;
}

std::vector<std::array<double, 3>> induced_metric(const Mesh& mesh, const std::vector<std::vector<double>>& coords) {
    std::vector<std::array<double, 3>> out(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Point2 e1 = edge_vector(mesh, tri[0], tri[1]);
        const Point2 e2 = edge_vector(mesh, tri[0], tri[2]);
        // Columns of the differential: d(coords) = D [e1 e2]; G = D^T D.
        const double det = e1[0] * e2[1] - e1[1] * e2[0];
        double g11 = 0.0, g12 = 0.0, g22 = 0.0;
        for (const auto& c : coords) {
            const double d1 = c[tri[1]] - c[tri[0]];
            const double d2 = c[tri[2]] - c[tri[0]];
            const double dx = (d1 * e2[1] - d2 * e1[1]) / det;
            const double dy = (-d1 * e2[0] + d2 * e1[0]) / det;
            g11 += dx * dx;
            g12 += dx * dy;
            g22 += dy * dy;
        }
        out[t] = {g11, g12, g22};
    }
    return out;
}

double family_area(double a, double s0) {
    check_a(a);
    const double half = integrate_from_zero([a](double t) { return std::sqrt(0.5 + a * std::cos(2.0 * t)); }, s0);
    return 2.0 * std::numbers::pi * 2.0 * half;
}

double family_boundary_length(double a, double s0) {
    check_a(a);
    return 2.0 * 2.0 * std::numbers::pi * std::sqrt(0.5 + a * std::cos(2.0 * s0));
}

nlohmann::ordered_json family_point_to_json(const FamilyPoint& p) {
    nlohmann::ordered_json j;
    j["r"] = p.r;
    j["a"] = p.a;
    j["s0"] = p.s0;
    j["mu"] = p.mu;
    j["residuals"] = p.residuals;
    j["embedded"] = p.embedded;
    return j;
}

}  // namespace capstek
