#include "capstek/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "capstek/errors.hpp"

namespace capstek {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;

constexpr double kCapStart = 1e-6;

// Coefficients of a'' + p(t) a' + q(t) a = 0.
struct ModeCoefficients {
    const RadialProblem& problem;

    void operator()(double t, double& p, double& q) const {
        const double k2 = static_cast<double>(problem.k) * problem.k;
        if (const auto* cap = std::get_if<CapDomain>(&problem.domain)) {
            (void)cap;
            const double s = std::sin(t);
            p = std::cos(t) / s;
            q = problem.alpha - k2 / (s * s);
        } else {
            const auto& ann = std::get<AnnulusDomain>(problem.domain);
            const double w2 = 0.5 + ann.a * std::cos(2.0 * t);  // 1 - rho^2
            p = -ann.a * std::sin(2.0 * t) / w2;
            q = problem.alpha - k2 / w2;
        }
    }
};

void check_problem(const RadialProblem& problem) {
    if (problem.k < 0) throw InvalidArgument("radial: mode k must be nonnegative");
    if (const auto* cap = std::get_if<CapDomain>(&problem.domain)) {
        if (!(cap->r > 0.0) || cap->r > std::numbers::pi / 2 + 1e-12)
            throw InvalidArgument("radial: cap radius must lie in (0, pi/2]");
    } else {
        const auto& ann = std::get<AnnulusDomain>(problem.domain);
        if (!(ann.a > -0.5) || ann.a > 0.0) throw InvalidArgument("radial: annulus parameter a must lie in (-1/2, 0]");
        if (!(ann.s0 > 0.0)) throw InvalidArgument("radial: annulus half-length s0 must be positive");
    }
}

// Regular Frobenius start a = t^k (1 + c t^2) at t0, rescaled by t0^-k.
State cap_start(int k, double alpha) {
    const double kk = k;
    const double c = (kk * (kk + 1.0) / 3.0 - alpha) / (4.0 * (kk + 1.0));
    const double t0 = kCapStart;
    const double value = 1.0 + c * t0 * t0;
    const double deriv = (kk / t0) * (1.0 + c * t0 * t0) + 2.0 * c * t0;
    return {value, deriv};
}

RadialProfile integrate_profile(const RadialProblem& problem, State y, double t_begin, double t_end,
                                const RadialOptions& opts) {
    const ModeCoefficients coeff{problem};
    auto rhs = [&coeff](const State& s, State& ds, double t) {
        double p = 0.0, q = 0.0;
        coeff(t, p, q);
        ds[0] = s[1];
        ds[1] = -p * s[1] - q * s[0];
    };

    const int n = std::max(opts.grid_points, 5);
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i) times[i] = t_begin + (t_end - t_begin) * i / (n - 1);
    times.back() = t_end;

    RadialProfile prof;
    prof.t.reserve(n);
    auto observer = [&prof](const State& s, double t) {
        prof.t.push_back(t);
        prof.value.push_back(s[0]);
        prof.derivative.push_back(s[1]);
    };
    auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
    const double dt0 = (t_end - t_begin) / (10.0 * n);
    odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), dt0, observer);
    if (prof.t.size() != times.size()) throw SolverFailure("radial: integration did not reach the endpoint");
    return prof;
}

// Boundary values below this fraction of max|value| are integration noise
// around an exact zero.
bool vanishes_at_end(const RadialProfile& prof) {
    double scale = 0.0;
    for (double x : prof.value) scale = std::max(scale, std::abs(x));
    const double v = prof.value.back();
    return !std::isfinite(v) || std::abs(v) <= 1e-9 * scale;
}

double robin_ratio(const RadialProfile& prof) {
    const double v = prof.value.back();
    if (vanishes_at_end(prof)) throw SolverFailure("radial: profile vanishes at the boundary (eigenvalue is infinite)");
    return prof.derivative.back() / v;
}

}  // namespace

ModeSpectrum cap_mode_eigs(double r, int k, int count, double alpha, const RadialOptions& opts) {
    if (count < 1) throw InvalidArgument("cap_mode_eigs: count must be positive");
    ModeSpectrum spec;
    spec.problem = RadialProblem{CapDomain{r}, k, alpha};
    check_problem(spec.problem);
    auto prof = integrate_profile(spec.problem, cap_start(k, alpha), kCapStart, r, opts);
    spec.eigenvalues.push_back(robin_ratio(prof));
    spec.radial_profiles.push_back(std::move(prof));
    spec.parity.push_back(Parity::none);
    return spec;
}

ModeSpectrum annulus_mode_eigs(double a, double s0, int k, int count, double alpha, const RadialOptions& opts) {
    if (count < 1) throw InvalidArgument("annulus_mode_eigs: count must be positive");
    ModeSpectrum spec;
    spec.problem = RadialProblem{AnnulusDomain{a, s0}, k, alpha};
    check_problem(spec.problem);

    struct Entry {
        double sigma;
        RadialProfile prof;
        Parity parity;
    };
    std::vector<Entry> entries;
    for (Parity parity : {Parity::even, Parity::odd}) {
        const State start = parity == Parity::even ? State{1.0, 0.0} : State{0.0, 1.0};
        auto prof = integrate_profile(spec.problem, start, 0.0, s0, opts);
        if (vanishes_at_end(prof)) continue;  // eigenvalue at infinity
        entries.push_back({prof.derivative.back() / prof.value.back(), std::move(prof), parity});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.sigma < y.sigma; });
    for (std::size_t i = 0; i < entries.size() && static_cast<int>(i) < count; ++i) {
        spec.eigenvalues.push_back(entries[i].sigma);
        spec.radial_profiles.push_back(std::move(entries[i].prof));
        spec.parity.push_back(entries[i].parity);
    }
    return spec;
}

CapClosedForms cap_closed_forms(double t) {
    if (!(t > 0.0) || !(t < std::numbers::pi)) throw InvalidArgument("cap_closed_forms: t must lie in (0, pi)");
    const double c = std::cos(t);
    const double s = std::sin(t);
    const double half = 0.5 * t;
    const double sec_half = 1.0 / std::cos(half);
    const double csc_half = 1.0 / std::sin(half);
    CapClosedForms out{};
    out.cos_t = c;
    out.sin_t = s;
    out.y = 1.0 + 0.5 * c * std::log((1.0 - c) / (1.0 + c));
    out.z = s / 8.0 * (sec_half * sec_half + 4.0 * std::log(std::tan(half)) - csc_half * csc_half);
    return out;
}

double mode_residual(const RadialProblem& problem, const RadialProfile& prof) {
    const std::size_t n = prof.t.size();
    if (n < 5) throw InvalidArgument("mode_residual: profile needs at least 5 samples");
    const double h = prof.t[1] - prof.t[0];
    const ModeCoefficients coeff{problem};
    double scale = 0.0;
    for (double v : prof.value) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double second = (-prof.derivative[i + 2] + 8.0 * prof.derivative[i + 1] - 8.0 * prof.derivative[i - 1] +
                               prof.derivative[i - 2]) /
                              (12.0 * h);
        double p = 0.0, q = 0.0;
        coeff(prof.t[i], p, q);
        worst = std::max(worst, std::abs(second + p * prof.derivative[i] + q * prof.value[i]));
    }
    return worst / scale;
}

std::vector<LabeledEigenvalue> merge_modes(const std::vector<ModeSpectrum>& spectra, int count) {
    std::vector<LabeledEigenvalue> all;
    if (spectra.empty()) return all;
    const auto& ref = spectra.front().problem;
    for (const auto& spec : spectra) {
        const auto& p = spec.problem;
        bool same = p.domain.index() == ref.domain.index() && p.alpha == ref.alpha;
        if (same) {
            if (const auto* cap = std::get_if<CapDomain>(&p.domain)) {
                same = cap->r == std::get<CapDomain>(ref.domain).r;
            } else {
                const auto& x = std::get<AnnulusDomain>(p.domain);
                const auto& y = std::get<AnnulusDomain>(ref.domain);
                same = x.a == y.a && x.s0 == y.s0;
            }
        }
        if (!same) throw InvalidArgument("merge_modes: spectra belong to different problems");
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
            const LabeledEigenvalue item{spec.eigenvalues[i], p.k, spec.parity[i]};
            all.push_back(item);
            if (p.k >= 1) all.push_back(item);
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
        if (x.value != y.value) return x.value < y.value;
        return x.k < y.k;
    });
    if (count >= 0 && static_cast<int>(all.size()) > count) all.resize(static_cast<std::size_t>(count));
    return all;
}

double cap_dirichlet_ground_state(double r, const RadialOptions& opts) {
    const RadialProblem base{CapDomain{r}, 0, 0.0};
    check_problem(base);
    // The regular solution has a zero in (0, r] exactly when lambda >= lambda_0^D.
    auto has_zero = [&](double lambda) {
        const RadialProblem prob{CapDomain{r}, 0, lambda};
        RadialOptions o = opts;
        o.grid_points = 201;
        const auto prof = integrate_profile(prob, cap_start(0, lambda), kCapStart, r, o);
        return std::any_of(prof.value.begin(), prof.value.end(), [](double v) { return v <= 0.0; });
    };
    double lo = 0.0;
    double hi = 4.0;
    while (!has_zero(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) throw SolverFailure("cap_dirichlet_ground_state: no bracket");
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (has_zero(mid)) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

const char* parity_name(Parity p) {
    switch (p) {
        case Parity::even: return "even";
        case Parity::odd: return "odd";
        default: return "none";
    }
}

nlohmann::ordered_json mode_spectrum_to_json(const ModeSpectrum& spec) {
    nlohmann::ordered_json j;
    if (const auto* cap = std::get_if<CapDomain>(&spec.problem.domain)) {
        j["domain"] = {{"type", "cap"}, {"r", cap->r}};
    } else {
        const auto& ann = std::get<AnnulusDomain>(spec.problem.domain);
        j["domain"] = {{"type", "annulus"}, {"a", ann.a}, {"s0", ann.s0}};
    }
    j["k"] = spec.problem.k;
    j["alpha"] = spec.problem.alpha;
    j["eigenvalues"] = spec.eigenvalues;
    std::vector<std::string> par;
    for (auto p : spec.parity) par.emplace_back(parity_name(p));
    j["parity"] = par;
    return j;
}

}  // namespace capstek
