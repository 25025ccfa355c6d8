#include "capstek/assembly.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "capstek/errors.hpp"

namespace capstek {

namespace {

using Triplet = Eigen::Triplet<double>;

// Exact integrals of phi_i phi_j phi_k over a triangle, divided by its area.
double triple_integral_weight(int i, int j, int k) {
    if (i == j && j == k) return 1.0 / 10.0;
    if (i == j || j == k || i == k) return 1.0 / 30.0;
    return 1.0 / 60.0;
}

struct BoundaryEdge {
    int a;
    int b;
    int triangle;
};

std::vector<BoundaryEdge> collect_boundary_edges(const Mesh& mesh) {
    std::map<std::pair<int, int>, int> owner;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            owner[{std::min(a, b), std::max(a, b)}] = t;
        }
    }
    std::vector<BoundaryEdge> edges;
    for (const auto& loop : mesh.boundary_loops) {
        for (std::size_t k = 0; k < loop.size(); ++k) {
            int a = loop[k], b = loop[(k + 1) % loop.size()];
            auto it = owner.find({std::min(a, b), std::max(a, b)});
            if (it == owner.end()) throw InvalidArgument("boundary loop edge belongs to no triangle");
            edges.push_back({a, b, it->second});
        }
    }
    return edges;
}

// Metric length of a boundary edge.
double edge_length(const Mesh& mesh, const MetricField& metric, const BoundaryEdge& e) {
    const Point2 d = edge_vector(mesh, e.a, e.b);
    if (metric.is_conformal()) {
        const double flat = std::hypot(d[0], d[1]);
        return flat * 0.5 * (std::exp(0.5 * metric.log_factor[e.a]) + std::exp(0.5 * metric.log_factor[e.b]));
    }
    const auto& g = metric.g[e.triangle];
    return std::sqrt(g[0] * d[0] * d[0] + 2.0 * g[1] * d[0] * d[1] + g[2] * d[1] * d[1]);
}

// Reference gradients of the three barycentric functions.
std::array<Point2, 3> barycentric_gradients(const Mesh& mesh, int t, double& area) {
    const auto& tri = mesh.triangles[t];
    const Point2 e1 = edge_vector(mesh, tri[0], tri[1]);
    const Point2 e2 = edge_vector(mesh, tri[0], tri[2]);
    const double det = e1[0] * e2[1] - e1[1] * e2[0];
    area = 0.5 * det;
    // Rows of the inverse Jacobian [e1 e2]^{-1}.
    const Point2 g1{e2[1] / det, -e2[0] / det};
    const Point2 g2{-e1[1] / det, e1[0] / det};
    const Point2 g0{-g1[0] - g2[0], -g1[1] - g2[1]};
    return {g0, g1, g2};
}

}  // namespace

MetricField flat_metric(const Mesh& mesh) { return conformal_metric(std::vector<double>(mesh.vertices.size(), 0.0)); }

MetricField conformal_metric(std::vector<double> log_factor) {
    MetricField m;
    m.kind = MetricKind::conformal;
    m.log_factor = std::move(log_factor);
    return m;
}

MetricField general_metric(std::vector<std::array<double, 3>> g) {
    MetricField m;
    m.kind = MetricKind::general;
    m.g = std::move(g);
    return m;
}

double cap_conformal_factor(double r, const Point2& point) {
    if (!(r > 0.0) || r > M_PI / 2 + 1e-12) throw InvalidArgument("cap_conformal_factor: r must lie in (0, pi/2]");
    const double rr = point[0] * point[0] + point[1] * point[1];
    if (rr > 1.0 + 1e-12) throw InvalidArgument("cap_conformal_factor: point outside the unit disk");
    const double t = std::tan(0.5 * r);
    const double denom = 1.0 + t * t * rr;
    return 4.0 * t * t / (denom * denom);
}

MetricField cap_metric(const Mesh& mesh, double r) {
    std::vector<double> logf(mesh.vertices.size());
    for (std::size_t v = 0; v < logf.size(); ++v) logf[v] = std::log(cap_conformal_factor(r, mesh.vertices[v]));
    return conformal_metric(std::move(logf));
}

MetricField perturb_conformal(const MetricField& metric, std::span<const double> w, double eps) {
    if (!metric.is_conformal()) throw InvalidArgument("perturb_conformal: metric is not conformal");
    if (w.size() != metric.log_factor.size()) throw InvalidArgument("perturb_conformal: field size mismatch");
    MetricField out = metric;
    if (eps == 0.0) return out;
    for (std::size_t v = 0; v < w.size(); ++v) out.log_factor[v] += eps * w[v];
    return out;
}

void check_metric(const Mesh& mesh, const MetricField& metric) {
    if (metric.is_conformal()) {
        if (metric.log_factor.size() != mesh.vertices.size())
            throw InvalidArgument("conformal metric: expected one log-factor per vertex");
        for (std::size_t v = 0; v < metric.log_factor.size(); ++v) {
            const double f = std::exp(metric.log_factor[v]);
            if (!std::isfinite(f) || !(f > 0.0))
                throw InvalidArgument("conformal metric: non-finite factor at vertex " + std::to_string(v));
        }
        return;
    }
    if (metric.g.size() != mesh.triangles.size())
        throw InvalidArgument("general metric: expected one matrix per triangle");
    for (std::size_t t = 0; t < metric.g.size(); ++t) {
        const auto& g = metric.g[t];
        const double det = g[0] * g[2] - g[1] * g[1];
        if (!(g[0] > 0.0) || !(det > 0.0) || !std::isfinite(det))
            throw InvalidArgument("metric is not positive definite at triangle " + std::to_string(t));
    }
}

OperatorBundle assemble_operator(const Mesh& mesh, const MetricField& metric, double alpha) {
    check_metric(mesh, metric);
    const int n = mesh.num_vertices();
    std::vector<Triplet> kt, mt, bt;
    kt.reserve(9 * mesh.triangles.size());
    mt.reserve(9 * mesh.triangles.size());

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        double area = 0.0;
        const auto grad = barycentric_gradients(mesh, t, area);
        if (!(area > 0.0)) throw InvalidArgument("degenerate or flipped triangle " + std::to_string(t));

        // Stiffness weight g^{ij} sqrt(det g); identity for conformal metrics.
        double w11 = 1.0, w12 = 0.0, w22 = 1.0, vol = 1.0;
        if (!metric.is_conformal()) {
            const auto& g = metric.g[t];
            const double det = g[0] * g[2] - g[1] * g[1];
            vol = std::sqrt(det);
            w11 = g[2] / det * vol;
            w12 = -g[1] / det * vol;
            w22 = g[0] / det * vol;
        }

        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                const double kij = area * (grad[i][0] * (w11 * grad[j][0] + w12 * grad[j][1]) +
                                           grad[i][1] * (w12 * grad[j][0] + w22 * grad[j][1]));
                double mij = 0.0;
                if (metric.is_conformal()) {
                    for (int k = 0; k < 3; ++k)
                        mij += std::exp(metric.log_factor[tri[k]]) * triple_integral_weight(i, j, k);
                    mij *= area;
                } else {
                    mij = area * vol * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
                }
                kt.emplace_back(tri[i], tri[j], kij);
                mt.emplace_back(tri[i], tri[j], mij);
                if (i != j) {
                    kt.emplace_back(tri[j], tri[i], kij);
                    mt.emplace_back(tri[j], tri[i], mij);
                }
            }
        }
    }

    for (const auto& e : collect_boundary_edges(mesh)) {
        const double len = edge_length(mesh, metric, e);
        bt.emplace_back(e.a, e.a, len / 3.0);
        bt.emplace_back(e.b, e.b, len / 3.0);
        bt.emplace_back(e.a, e.b, len / 6.0);
        bt.emplace_back(e.b, e.a, len / 6.0);
    }

    OperatorBundle ops;
    ops.alpha = alpha;
    ops.K.resize(n, n);
    ops.M.resize(n, n);
    ops.B.resize(n, n);
    ops.K.setFromTriplets(kt.begin(), kt.end());
    ops.M.setFromTriplets(mt.begin(), mt.end());
    ops.B.setFromTriplets(bt.begin(), bt.end());
    ops.A = ops.K - alpha * ops.M;
    return ops;
}

Measure measure(const Mesh& mesh, const MetricField& metric) {
    check_metric(mesh, metric);
    Measure out;
    // 1^T M 1 reduces to the integral of the interpolated area density.
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double area = signed_area(mesh, t);
        if (metric.is_conformal()) {
            const auto& tri = mesh.triangles[t];
            double mean = 0.0;
            for (int k : tri) mean += std::exp(metric.log_factor[k]);
            out.area += area * mean / 3.0;
        } else {
            const auto& g = metric.g[t];
            out.area += area * std::sqrt(g[0] * g[2] - g[1] * g[1]);
        }
    }
    const auto edges = collect_boundary_edges(mesh);
    std::size_t offset = 0;
    for (const auto& loop : mesh.boundary_loops) {
        double len = 0.0;
        for (std::size_t k = 0; k < loop.size(); ++k) len += edge_length(mesh, metric, edges[offset + k]);
        offset += loop.size();
        out.loop_lengths.push_back(len);
        out.boundary_length += len;
    }
    return out;
}

std::vector<double> mass_sensitivity(const Mesh& mesh, const MetricField& metric, std::span<const double> x,
                                     std::span<const double> y) {
    if (!metric.is_conformal()) throw InvalidArgument("mass_sensitivity: metric is not conformal");
    std::vector<double> out(mesh.vertices.size(), 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = signed_area(mesh, t);
        for (int k = 0; k < 3; ++k) {
            double acc = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) acc += x[tri[i]] * y[tri[j]] * triple_integral_weight(i, j, k);
            out[tri[k]] += std::exp(metric.log_factor[tri[k]]) * area * acc;
        }
    }
    return out;
}

std::vector<double> boundary_sensitivity(const Mesh& mesh, const MetricField& metric,
                                         std::span<const double> x, std::span<const double> y) {
    if (!metric.is_conformal()) throw InvalidArgument("boundary_sensitivity: metric is not conformal");
    std::vector<double> out(mesh.vertices.size(), 0.0);
    for (const auto& e : collect_boundary_edges(mesh)) {
        const Point2 d = edge_vector(mesh, e.a, e.b);
        const double flat = std::hypot(d[0], d[1]);
        const double form = (2.0 * x[e.a] * y[e.a] + x[e.a] * y[e.b] + x[e.b] * y[e.a] + 2.0 * x[e.b] * y[e.b]) / 6.0;
        out[e.a] += 0.25 * flat * std::exp(0.5 * metric.log_factor[e.a]) * form;
        out[e.b] += 0.25 * flat * std::exp(0.5 * metric.log_factor[e.b]) * form;
    }
    return out;
}

nlohmann::ordered_json metric_to_json(const MetricField& metric) {
    nlohmann::ordered_json j;
    if (metric.is_conformal()) {
        j["kind"] = "conformal";
        j["log_factor"] = metric.log_factor;
    } else {
        j["kind"] = "general";
        j["g"] = metric.g;
    }
    return j;
}

MetricField metric_from_json(const nlohmann::json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "conformal") return conformal_metric(j.at("log_factor").get<std::vector<double>>());
        if (kind == "general") return general_metric(j.at("g").get<std::vector<std::array<double, 3>>>());
        throw InvalidArgument("metric JSON: unknown kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("metric JSON: ") + e.what());
    }
}

}  // namespace capstek
