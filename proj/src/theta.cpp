#include "capstek/theta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Sparse>

#include "capstek/errors.hpp"

namespace capstek {

namespace {

void check_r(double r, const char* who) {
    if (!(r > 0.0) || !(r < std::numbers::pi / 2))
        throw InvalidArgument(std::string(who) + ": r must lie in (0, pi/2)");
}

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// Index range [first, last) of the cluster holding eigen_index.
std::pair<int, int> cluster_of(const SpectrumResult& spectrum, int eigen_index, double cluster_tol) {
    const auto sizes = cluster_multiplicities(spectrum.eigenvalues, cluster_tol);
    int first = 0;
    for (int s : sizes) {
        if (eigen_index < first + s) return {first, first + s};
        first += s;
    }
    throw InvalidArgument("eigen_index outside the computed spectrum");
}

// d(x_a^T A x_b)/dt - sigma d(u_a^T B u_b)/dt, per vertex.
std::vector<double> pair_density(const Mesh& mesh, const MetricField& metric, double alpha, double sigma,
                                 const Eigen::VectorXd& xa, const Eigen::VectorXd& xb) {
    const auto dm = mass_sensitivity(mesh, metric, as_span(xa), as_span(xb));
    const auto db = boundary_sensitivity(mesh, metric, as_span(xa), as_span(xb));
    std::vector<double> out(dm.size());
    for (std::size_t v = 0; v < dm.size(); ++v) out[v] = -alpha * dm[v] - sigma * db[v];
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Implicit graph-Laplacian smoother: (D + s (D - A)) out = mean(D) w. Symmetric
// positive definite, so it also serves as the inner product for ascent.
class Smoother {
public:
    Smoother(const Mesh& mesh, double strength) : strength_(strength) {
        if (strength_ <= 0.0) return;
        const auto adjacency = vertex_adjacency(mesh);
        const int n = static_cast<int>(adjacency.size());
        std::vector<Eigen::Triplet<double>> trip;
        double total = 0.0;
        for (int v = 0; v < n; ++v) {
            const double deg = static_cast<double>(adjacency[v].size());
            total += deg;
            trip.emplace_back(v, v, deg * (1.0 + strength_));
            for (int u : adjacency[v]) trip.emplace_back(v, u, -strength_);
        }
        mean_degree_ = total / n;
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(trip.begin(), trip.end());
        solver_.compute(A);
        if (solver_.info() != Eigen::Success) throw SolverFailure("smoother factorization failed");
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& w) const {
        if (strength_ <= 0.0) return w;
        return solver_.solve(mean_degree_ * w);
    }

private:
    double strength_;
    double mean_degree_ = 1.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

// Ascent direction for Theta: smallest element, in the smoother inner product,
// of the supergradient set {h + c * sum_ab Y_ab G_ab : Y psd, tr Y = 1} over the
// sigma1 cluster. Frank-Wolfe on the spectraplex.
Eigen::VectorXd ascent_direction(const Mesh& mesh, const MetricField& metric, const SpectrumResult& spectrum,
                                 const ThetaReport& report, double cluster_tol, const Smoother& smoother) {
    const double c2 = std::cos(report.r) * std::cos(report.r);
    const double s2 = 1.0 - c2;
    const double alpha = spectrum.alpha;
    const double L = report.boundary_length;

    const auto d0 = pair_density(mesh, metric, alpha, spectrum.eigenvalues[0], spectrum.extensions[0],
                                 spectrum.extensions[0]);
    const std::vector<double> ones(mesh.vertices.size(), 1.0);
    const auto d_area = mass_sensitivity(mesh, metric, ones, ones);
    const auto d_length = boundary_sensitivity(mesh, metric, ones, ones);
    const double boundary_term = report.sigma0 * c2 + report.sigma1 * s2;
    Eigen::VectorXd h(d0.size());
    for (std::size_t v = 0; v < d0.size(); ++v)
        h(v) = c2 * d0[v] * L + boundary_term * d_length[v] + 2.0 * d_area[v];

    const auto [first, last] = cluster_of(spectrum, 1, cluster_tol);
    const int m = last - first;
    double mean_sigma = 0.0;
    for (int a = first; a < last; ++a) mean_sigma += spectrum.eigenvalues[a] / m;

    // Basis: h, then G_ab (a <= b) scaled by s2 L.
    std::vector<Eigen::VectorXd> basis{h};
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
            const double sigma = a == b ? spectrum.eigenvalues[first + a] : mean_sigma;
            basis.push_back(s2 * L *
                            to_vector(pair_density(mesh, metric, alpha, sigma, spectrum.extensions[first + a],
                                                   spectrum.extensions[first + b])));
            pairs.emplace_back(a, b);
        }
    }
    std::vector<Eigen::VectorXd> smoothed;
    for (const auto& b : basis) smoothed.push_back(smoother.apply(b));
    const int nb = static_cast<int>(basis.size());
    Eigen::MatrixXd gram(nb, nb);
    for (int i = 0; i < nb; ++i)
        for (int j = i; j < nb; ++j) gram(i, j) = gram(j, i) = basis[i].dot(smoothed[j]);

    // Coefficients of the basis for a symmetric Y.
    auto coefficients = [&](const Eigen::MatrixXd& Y) {
        Eigen::VectorXd c(nb);
        c(0) = 1.0;
        for (int k = 0; k < nb - 1; ++k) {
            const auto [a, b] = pairs[k];
            c(k + 1) = a == b ? Y(a, a) : 2.0 * Y(a, b);
        }
        return c;
    };

    Eigen::MatrixXd Y = Eigen::MatrixXd::Identity(m, m) / m;
    if (m > 1) {
        for (int iter = 0; iter < 200; ++iter) {
            const Eigen::VectorXd gc = gram * coefficients(Y);
            Eigen::MatrixXd N(m, m);
            for (int k = 0; k < nb - 1; ++k) {
                const auto [a, b] = pairs[k];
                N(a, b) = N(b, a) = gc(k + 1);
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
            const Eigen::VectorXd v = es.eigenvectors().col(0);
            const Eigen::MatrixXd D = v * v.transpose() - Y;
            Eigen::VectorXd dc = coefficients(D + Y) - coefficients(Y);
            const double slope = dc.dot(gc);
            const double curv = dc.dot(gram * dc);
            if (!(slope < -1e-14 * std::abs(gc.dot(coefficients(Y)))) || !(curv > 0.0)) break;
            const double gamma = std::min(1.0, -slope / curv);
            Y += gamma * D;
        }
    }
    const Eigen::VectorXd c = coefficients(Y);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(h.size());
    for (int i = 0; i < nb; ++i) dir += c(i) * smoothed[i];
    return dir;
}

}  // namespace

double theta_bound(int genus, int boundary_count, double r) {
    if (genus < 0 || boundary_count < 1) throw InvalidArgument("theta_bound: need genus >= 0 and at least one boundary");
    return 4.0 * std::numbers::pi * (1.0 - std::cos(r)) * (genus + boundary_count);
}

double theta_value(double sigma0, double sigma1, double boundary_length, double area, double r) {
    const double c = std::cos(r);
    const double s = std::sin(r);
    return (sigma0 * c * c + sigma1 * s * s) * boundary_length + 2.0 * area;
}

ThetaReport theta_eval(const Mesh& mesh, const MetricField& metric, double r, double gap_floor,
                       SpectrumResult* spectrum_out) {
    check_r(r, "theta_eval");
    const OperatorBundle ops = assemble_operator(mesh, metric, kThetaAlpha);
    SpectrumResult spectrum = steklov_spectrum(mesh, ops, kThetaModes, gap_floor);
    const Measure meas = measure(mesh, metric);

    ThetaReport rep;
    rep.r = r;
    rep.sigma0 = spectrum.eigenvalues.at(0);
    rep.sigma1 = spectrum.eigenvalues.at(1);
    rep.boundary_length = meas.boundary_length;
    rep.area = meas.area;
    rep.theta = theta_value(rep.sigma0, rep.sigma1, rep.boundary_length, rep.area, r);
    rep.bound = theta_bound(mesh.genus, mesh.boundary_count, r);
    rep.slack = rep.bound - rep.theta;
    rep.dirichlet_gap = spectrum.admissibility.gap;
    rep.extremality = extremality_check(rep, spectrum);
    if (spectrum_out) *spectrum_out = std::move(spectrum);
    return rep;
}

Extremality extremality_check(const ThetaReport& report, const SpectrumResult& spectrum) {
    Extremality e;
    const double cot = std::cos(report.r) / std::sin(report.r);
    e.res_bc = std::abs(report.sigma1 + cot * cot * report.sigma0) / std::abs(report.sigma1);

    const Eigen::VectorXd& u = spectrum.boundary_modes.at(0);
    const double mean = u.mean();
    const double target = std::cos(report.r);
    double dev = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) dev = std::max(dev, std::abs(u(i) * target / mean - target));
    e.res_v0 = dev / target;
    return e;
}

double sigma_conformal_derivative(const Mesh& mesh, const MetricField& metric, const SpectrumResult& spectrum,
                                  int eigen_index, std::span<const double> w, double cluster_tol) {
    if (!metric.is_conformal()) throw InvalidArgument("sigma_conformal_derivative: metric is not conformal");
    if (eigen_index != 0 && eigen_index != 1)
        throw InvalidArgument("sigma_conformal_derivative: eigen_index must be 0 or 1");
    if (w.size() != mesh.vertices.size()) throw InvalidArgument("sigma_conformal_derivative: field size mismatch");

    const auto [first, last] = cluster_of(spectrum, eigen_index, cluster_tol);
    const double alpha = spectrum.alpha;
    if (eigen_index == 0 || last - first == 1) {
        const auto& x = spectrum.extensions.at(eigen_index);
        return dot(pair_density(mesh, metric, alpha, spectrum.eigenvalues[eigen_index], x, x), w);
    }

    const int m = last - first;
    double mean_sigma = 0.0;
    for (int a = first; a < last; ++a) mean_sigma += spectrum.eigenvalues[a] / m;
    Eigen::MatrixXd W(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
            const double sigma = a == b ? spectrum.eigenvalues[first + a] : mean_sigma;
            W(a, b) = dot(pair_density(mesh, metric, alpha, sigma, spectrum.extensions[first + a],
                                       spectrum.extensions[first + b]),
                          w);
            W(b, a) = W(a, b);
        }
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W).eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev(m - 1) - ev(0) > 1e-6 * scale)
        throw AmbiguousDerivative("sigma_1 has multiplicity " + std::to_string(m) +
                                  " and the direction splits the cluster");
    return ev.mean();
}

double sigma_conformal_derivative(const Mesh& mesh, const MetricField& metric, double alpha, int eigen_index,
                                  std::span<const double> w, double gap_floor, double cluster_tol) {
    const SpectrumResult spectrum = steklov_spectrum(mesh, metric, alpha, kThetaModes, gap_floor);
    return sigma_conformal_derivative(mesh, metric, spectrum, eigen_index, w, cluster_tol);
}

std::vector<double> theta_gradient(const Mesh& mesh, const MetricField& metric, const SpectrumResult& spectrum,
                                   const ThetaReport& report, double cluster_tol) {
    if (!metric.is_conformal()) throw InvalidArgument("theta_gradient: metric is not conformal");
    const double c2 = std::cos(report.r) * std::cos(report.r);
    const double s2 = 1.0 - c2;
    const double alpha = spectrum.alpha;

    const auto d0 = pair_density(mesh, metric, alpha, spectrum.eigenvalues[0], spectrum.extensions[0],
                                 spectrum.extensions[0]);
    const auto [first, last] = cluster_of(spectrum, 1, cluster_tol);
    std::vector<double> d1(d0.size(), 0.0);
    for (int a = first; a < last; ++a) {
        const auto da = pair_density(mesh, metric, alpha, spectrum.eigenvalues[a], spectrum.extensions[a],
                                     spectrum.extensions[a]);
        for (std::size_t v = 0; v < d1.size(); ++v) d1[v] += da[v] / (last - first);
    }

    const std::vector<double> ones(mesh.vertices.size(), 1.0);
    const auto d_area = mass_sensitivity(mesh, metric, ones, ones);
    const auto d_length = boundary_sensitivity(mesh, metric, ones, ones);
    const double boundary_term = report.sigma0 * c2 + report.sigma1 * s2;

    std::vector<double> g(d0.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        g[v] = (c2 * d0[v] + s2 * d1[v]) * report.boundary_length + boundary_term * d_length[v] + 2.0 * d_area[v];
    return g;
}

OptimizeTrace optimize_conformal(const Mesh& mesh, const MetricField& metric0, double r,
                                 const OptimizeParams& params) {
    check_r(r, "optimize_conformal");
    if (!metric0.is_conformal()) throw InvalidArgument("optimize_conformal: start metric is not conformal");
    if (params.max_steps < 0 || !(params.step0 > 0.0) || !(params.smoothing >= 0.0))
        throw InvalidArgument("optimize_conformal: bad parameters");

    OptimizeTrace trace;
    MetricField metric = metric0;
    SpectrumResult spectrum;
    ThetaReport report = theta_eval(mesh, metric, r, params.gap_floor, &spectrum);
    if (!(report.dirichlet_gap > params.gap_margin))
        throw NotAdmissible("optimize_conformal: start metric has Dirichlet gap " +
                                std::to_string(report.dirichlet_gap) + " below the margin",
                            report.dirichlet_gap);
    trace.iterations.push_back({0, report.theta, report.sigma0, report.sigma1, report.dirichlet_gap, 0.0});

    const Smoother smoother(mesh, params.smoothing);
    double tau = params.step0;
    for (int step = 1; step <= params.max_steps; ++step) {
        Eigen::VectorXd dir = ascent_direction(mesh, metric, spectrum, report, params.cluster_tol, smoother);
        const double dmax = dir.cwiseAbs().maxCoeff();
        if (!(dmax > 0.0)) {
            trace.stalled = true;
            break;
        }
        dir /= dmax;
        const std::span<const double> g = as_span(dir);

        bool accepted = false;
        while (tau >= params.min_step) {
            MetricField trial = perturb_conformal(metric, g, tau);
            try {
                SpectrumResult trial_spectrum;
                ThetaReport trial_report = theta_eval(mesh, trial, r, params.gap_floor, &trial_spectrum);
                if (trial_report.dirichlet_gap > params.gap_margin && trial_report.theta > report.theta) {
                    metric = std::move(trial);
                    spectrum = std::move(trial_spectrum);
                    report = trial_report;
                    accepted = true;
                    break;
                }
            } catch (const NotAdmissible&) {
            }
            tau *= 0.5;
        }
        if (!accepted) {
            trace.stalled = true;
            break;
        }
        trace.iterations.push_back({step, report.theta, report.sigma0, report.sigma1, report.dirichlet_gap, tau});
        tau = std::min(params.step0, 1.5 * tau);
    }
    trace.final_metric = std::move(metric);
    trace.final_report = report;
    return trace;
}

std::vector<BlowdownRow> admissibility_blowdown(std::span<const double> r_values, int n_rings, int n_angular,
                                                double gap_floor) {
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        if (!(r_values[i] > 0.0)) throw InvalidArgument("admissibility_blowdown: r must be positive");
        if (i > 0 && !(r_values[i] > r_values[i - 1]))
            throw InvalidArgument("admissibility_blowdown: r values must increase");
    }
    const Mesh mesh = build_disk_mesh(n_rings, n_angular);
    std::vector<BlowdownRow> rows;
    for (double r : r_values) {
        if (r >= std::numbers::pi / 2)
            throw NotAdmissible("admissibility_blowdown: r >= pi/2 has no Dirichlet gap at alpha = 2", 0.0);
        const SpectrumResult sp = steklov_spectrum(mesh, cap_metric(mesh, r), kThetaAlpha, 1, gap_floor);
        rows.push_back({r, sp.eigenvalues[0]});
    }
    return rows;
}

MetricField random_conformal_metric(const Mesh& mesh, std::uint64_t seed, double amplitude, int degree) {
    if (!(amplitude >= 0.0) || degree < 0) throw InvalidArgument("random_conformal_metric: bad amplitude or degree");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> level(0.5, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<double> f(mesh.vertices.size(), 0.0);
        for (int m = 0; m <= degree; ++m) {
            for (int n = 0; n <= degree; ++n) {
                const double c = coef(rng) / (1.0 + m + n);
                const double p = phase(rng);
                for (std::size_t v = 0; v < f.size(); ++v)
                    f[v] += c * std::cos(m * mesh.vertices[v][0] + n * mesh.vertices[v][1] + p);
            }
        }
        double fmax = 0.0;
        for (double x : f) fmax = std::max(fmax, std::abs(x));
        const double scale = fmax > 0.0 ? amplitude * level(rng) / fmax : 0.0;
        for (double& x : f) x *= scale;
        MetricField metric = conformal_metric(std::move(f));
        if (dirichlet_gap(mesh, metric, kThetaAlpha).admissible) return metric;
    }
    throw SolverFailure("random_conformal_metric: no admissible draw in 100 attempts");
}

nlohmann::ordered_json theta_report_to_json(const ThetaReport& rep) {
    nlohmann::ordered_json j;
    j["r"] = rep.r;
    j["sigma0"] = rep.sigma0;
    j["sigma1"] = rep.sigma1;
    j["boundary_length"] = rep.boundary_length;
    j["area"] = rep.area;
    j["theta"] = rep.theta;
    j["bound"] = rep.bound;
    j["slack"] = rep.slack;
    j["dirichlet_gap"] = rep.dirichlet_gap;
    j["extremality"] = {{"res_bc", rep.extremality.res_bc}, {"res_v0", rep.extremality.res_v0}};
    return j;
}

}  // namespace capstek
