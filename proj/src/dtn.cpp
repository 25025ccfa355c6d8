#include "capstek/dtn.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/SparseCholesky>

#include "capstek/errors.hpp"

namespace capstek {

namespace {

struct Partition {
    std::vector<int> interior;
    std::vector<int> boundary;
    std::vector<int> local;  // vertex -> index within its block
};

Partition partition_vertices(const Mesh& mesh) {
    Partition p;
    const auto flags = boundary_flags(mesh);
    p.local.assign(mesh.vertices.size(), -1);
    // Boundary rows follow loop order so modes read naturally along each loop.
    for (const auto& loop : mesh.boundary_loops) {
        for (int v : loop) {
            if (p.local[v] < 0) {
                p.local[v] = static_cast<int>(p.boundary.size());
                p.boundary.push_back(v);
            }
        }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!flags[v]) {
            p.local[v] = static_cast<int>(p.interior.size());
            p.interior.push_back(v);
        }
    }
    return p;
}

// Block of a sparse matrix selected by row/column kind (interior or boundary).
SparseMatrix extract(const SparseMatrix& m, const Partition& p, const std::vector<bool>& is_boundary,
                     bool rows_boundary, bool cols_boundary) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            const auto c = static_cast<std::size_t>(it.col());
            if (is_boundary[r] != rows_boundary || is_boundary[c] != cols_boundary) continue;
            trip.emplace_back(p.local[r], p.local[c], it.value());
        }
    }
    auto size_of = [&](bool boundary) {
        return static_cast<Eigen::Index>(boundary ? p.boundary.size() : p.interior.size());
    };
    SparseMatrix out(size_of(rows_boundary), size_of(cols_boundary));
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

struct Blocks {
    Partition part;
    std::vector<bool> is_boundary;
    SparseMatrix interior_interior;
    SparseMatrix interior_boundary;
    SparseMatrix boundary_boundary;
};

Blocks split(const Mesh& mesh, const SparseMatrix& m) {
    Blocks b;
    b.part = partition_vertices(mesh);
    b.is_boundary = boundary_flags(mesh);
    b.interior_interior = extract(m, b.part, b.is_boundary, false, false);
    b.interior_boundary = extract(m, b.part, b.is_boundary, false, true);
    b.boundary_boundary = extract(m, b.part, b.is_boundary, true, true);
    return b;
}

double lowest_dirichlet_eigenvalue(const SparseMatrix& k_ii, const SparseMatrix& m_ii) {
    if (k_ii.rows() == 0) throw InvalidArgument("dirichlet_gap: mesh has no interior vertices");
    Eigen::SimplicialLLT<SparseMatrix> chol(k_ii);
    if (chol.info() != Eigen::Success) throw SolverFailure("dirichlet_gap: interior stiffness is singular");

    Eigen::VectorXd x = Eigen::VectorXd::Ones(k_ii.rows());
    double lambda = 0.0;
    for (int iter = 0; iter < 2000; ++iter) {
        Eigen::VectorXd y = chol.solve(m_ii * x);
        const double mnorm = std::sqrt(y.dot(m_ii * y));
        if (!(mnorm > 0.0)) throw SolverFailure("dirichlet_gap: singular interior mass");
        y /= mnorm;
        const double next = y.dot(k_ii * y);
        x = std::move(y);
        if (iter > 2 && std::abs(next - lambda) <= 1e-13 * std::abs(next)) return next;
        lambda = next;
    }
    return lambda;
}

}  // namespace

AdmissibilityReport dirichlet_gap(const Mesh& mesh, const MetricField& metric, double alpha, double gap_floor) {
    return dirichlet_gap(mesh, assemble_operator(mesh, metric, alpha), gap_floor);
}

AdmissibilityReport dirichlet_gap(const Mesh& mesh, const OperatorBundle& ops, double gap_floor) {
    const Blocks k = split(mesh, ops.K);
    const Blocks m = split(mesh, ops.M);
    AdmissibilityReport rep;
    rep.alpha = ops.alpha;
    rep.lambda0_dirichlet = lowest_dirichlet_eigenvalue(k.interior_interior, m.interior_interior);
    rep.gap = rep.lambda0_dirichlet - ops.alpha;
    rep.admissible = rep.gap > gap_floor * std::abs(rep.lambda0_dirichlet);
    return rep;
}

SpectrumResult steklov_spectrum(const Mesh& mesh, const MetricField& metric, double alpha, int count,
                                double gap_floor) {
    return steklov_spectrum(mesh, assemble_operator(mesh, metric, alpha), count, gap_floor);
}

SpectrumResult steklov_spectrum(const Mesh& mesh, const OperatorBundle& ops, int count, double gap_floor) {
    if (count < 1) throw InvalidArgument("steklov_spectrum: count must be positive");
    SpectrumResult res;
    res.alpha = ops.alpha;
    res.admissibility = dirichlet_gap(mesh, ops, gap_floor);

    const Blocks a = split(mesh, ops.A);
    const Blocks b = split(mesh, ops.B);
    const auto& part = a.part;
    const auto n_gamma = static_cast<Eigen::Index>(part.boundary.size());

    Eigen::SimplicialLLT<SparseMatrix> chol(a.interior_interior);
    if (chol.info() != Eigen::Success || !res.admissibility.admissible) {
        throw NotAdmissible("lambda_0^D = " + std::to_string(res.admissibility.lambda0_dirichlet) +
                                " does not exceed alpha = " + std::to_string(ops.alpha),
                            res.admissibility.gap);
    }

    // Z = A_II^{-1} A_IG; extensions are x_I = -Z u.
    const Eigen::MatrixXd a_ig = Eigen::MatrixXd(a.interior_boundary);
    const Eigen::MatrixXd z = chol.solve(a_ig);
    if (chol.info() != Eigen::Success) throw SolverFailure("steklov_spectrum: interior solve failed");

    Eigen::MatrixXd s = Eigen::MatrixXd(a.boundary_boundary) - a_ig.transpose() * z;
    const double asym = (s - s.transpose()).norm();
    if (asym > 1e-10 * std::max(1.0, s.norm()))
        throw SolverFailure("steklov_spectrum: Schur complement lost symmetry");
    s = 0.5 * (s + s.transpose());
    const Eigen::MatrixXd b_gg = Eigen::MatrixXd(b.boundary_boundary);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, b_gg);
    if (eig.info() != Eigen::Success) throw SolverFailure("steklov_spectrum: boundary eigensolve failed");

    const int n = std::min<int>(count, static_cast<int>(n_gamma));
    const Eigen::VectorXd b_ones = b_gg * Eigen::VectorXd::Ones(n_gamma);
    res.boundary_vertices = part.boundary;
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd u = eig.eigenvectors().col(j);
        // First mode: positive boundary mean. Others: largest entry positive.
        double sign_probe = 0.0;
        if (j == 0) {
            sign_probe = b_ones.dot(u);
        } else {
            Eigen::Index idx = 0;
            u.cwiseAbs().maxCoeff(&idx);
            sign_probe = u(idx);
        }
        if (sign_probe < 0.0) u = -u;

        Eigen::VectorXd full(mesh.num_vertices());
        const Eigen::VectorXd interior = -z * u;
        for (std::size_t k = 0; k < part.boundary.size(); ++k) full(part.boundary[k]) = u(static_cast<Eigen::Index>(k));
        for (std::size_t k = 0; k < part.interior.size(); ++k) full(part.interior[k]) = interior(static_cast<Eigen::Index>(k));

        res.eigenvalues.push_back(eig.eigenvalues()(j));
        res.boundary_modes.push_back(std::move(u));
        res.extensions.push_back(std::move(full));
    }
    return res;
}

int nodal_domains(const Mesh& mesh, std::span<const double> values, double zero_tol) {
    if (values.size() != mesh.vertices.size()) throw InvalidArgument("nodal_domains: field size mismatch");
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, std::abs(v));
    if (!(vmax > 0.0)) throw InvalidArgument("nodal_domains: field is identically zero");
    const double cut = zero_tol * vmax;

    auto sign_of = [&](int v) {
        const double x = values[v];
        if (std::abs(x) <= cut) return 0;
        return x > 0.0 ? 1 : -1;
    };

    const auto adj = vertex_adjacency(mesh);
    std::vector<bool> seen(values.size(), false);
    int domains = 0;
    for (int start = 0; start < mesh.num_vertices(); ++start) {
        const int s = sign_of(start);
        if (s == 0 || seen[start]) continue;
        ++domains;
        std::queue<int> q;
        q.push(start);
        seen[start] = true;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int w : adj[v]) {
                if (!seen[w] && sign_of(w) == s) {
                    seen[w] = true;
                    q.push(w);
                }
            }
        }
    }
    return domains;
}

int nodal_domains(const Mesh& mesh, const Eigen::VectorXd& values, double zero_tol) {
    return nodal_domains(mesh, std::span<const double>(values.data(), static_cast<std::size_t>(values.size())),
                         zero_tol);
}

std::vector<int> cluster_multiplicities(std::span<const double> eigenvalues, double rel_tol) {
    std::vector<int> sizes;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (i > 0) {
            const double a = eigenvalues[i - 1];
            const double b = eigenvalues[i];
            const double scale = std::max({1.0, std::abs(a), std::abs(b)});
            if (b - a <= rel_tol * scale) {
                ++sizes.back();
                continue;
            }
        }
        sizes.push_back(1);
    }
    return sizes;
}

double steklov_rayleigh_quotient(const OperatorBundle& ops, const Eigen::VectorXd& x) {
    return x.dot(ops.A * x) / x.dot(ops.B * x);
}

}  // namespace capstek
