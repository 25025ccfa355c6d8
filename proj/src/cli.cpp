#include "capstek/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>

#include "capstek/assembly.hpp"
#include "capstek/dtn.hpp"
#include "capstek/errors.hpp"
#include "capstek/family.hpp"
#include "capstek/io.hpp"
#include "capstek/mesh.hpp"
#include "capstek/radial.hpp"
#include "capstek/theta.hpp"

namespace capstek::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
using Artifact = std::variant<ordered_json, CsvTable>;

struct Options {
    std::string out_path;
    std::string format;
    int threads = 0;
    bool degrees = false;
    double gap_floor = kDefaultGapFloor;
    double cluster_tol = 1e-2;
    int n_radial = 0;
    int n_angular = 0;
    std::optional<double> r;
    std::vector<double> r_grid;
    double alpha = kThetaAlpha;
    int count = kThetaModes;
    bool modes = false;
    std::string kind = "disk";
    std::string metric = "flat";
    std::string mesh_file;
    std::string metric_file;
    std::uint64_t seed = 1;
    std::vector<std::string> metrics{"flat", "cap"};
    std::string start = "flat";
    int steps = 200;
    double step0 = 0.2;
    double gap_margin = 0.1;
    double smoothing = 100.0;
};

struct Surface {
    Mesh mesh;
    MetricField metric;
};

constexpr double kDefaultR = std::numbers::pi / 4;

double angle(const Options& o, double value) { return o.degrees ? value * std::numbers::pi / 180.0 : value; }

double r_value(const Options& o, double fallback = kDefaultR) { return o.r ? angle(o, *o.r) : fallback; }

int resolved_threads(const Options& o) {
    if (o.threads > 0) return o.threads;
    if (const char* env = std::getenv("CAPSTEK_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 256));
    }
    return 1;
}

std::pair<int, int> disk_resolution(const Options& o) {
    return {o.n_radial > 0 ? o.n_radial : 40, o.n_angular > 0 ? o.n_angular : 80};
}

std::pair<int, int> annulus_resolution(const Options& o) {
    return {o.n_radial > 0 ? o.n_radial : 30, o.n_angular > 0 ? o.n_angular : 60};
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

Surface make_surface(const Options& o, const std::string& metric_name, double r) {
    if (metric_name == "annulus") {
        const auto [ns, na] = annulus_resolution(o);
        auto imm = immerse(solve_family(r), ns, na);
        return {std::move(imm.mesh), std::move(imm.metric)};
    }
    if (metric_name == "file") {
        if (o.mesh_file.empty() || o.metric_file.empty())
            throw InvalidArgument("--metric file needs --mesh-file and --metric-file");
        Surface s{mesh_from_json(read_json_file(o.mesh_file)), metric_from_json(read_json_file(o.metric_file))};
        const auto issues = validate_mesh(s.mesh);
        if (!issues.empty()) throw InvalidArgument("mesh file: " + issues.front());
        check_metric(s.mesh, s.metric);
        return s;
    }
    const auto [nr, na] = disk_resolution(o);
    Surface s{build_disk_mesh(nr, na), {}};
    if (metric_name == "flat") s.metric = flat_metric(s.mesh);
    else if (metric_name == "cap") s.metric = cap_metric(s.mesh, r);
    else s.metric = random_conformal_metric(s.mesh, o.seed);
    return s;
}

std::vector<std::string> theta_header() {
    return {"r", "sigma0", "sigma1", "boundary_length", "area", "theta", "bound", "slack", "dirichlet_gap", "res_bc",
            "res_v0"};
}

std::vector<std::string> theta_cells(const ThetaReport& t) {
    return {csv_cell(t.r),     csv_cell(t.sigma0), csv_cell(t.sigma1), csv_cell(t.boundary_length),
            csv_cell(t.area),  csv_cell(t.theta),  csv_cell(t.bound),  csv_cell(t.slack),
            csv_cell(t.dirichlet_gap), csv_cell(t.extremality.res_bc), csv_cell(t.extremality.res_v0)};
}

std::string summary_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// ---- commands -------------------------------------------------------------

Artifact cmd_mesh(const Options& o, std::string& summary) {
    Mesh mesh;
    if (o.kind == "disk") {
        const auto [nr, na] = disk_resolution(o);
        mesh = build_disk_mesh(nr, na);
    } else {
        const auto [ns, na] = annulus_resolution(o);
        mesh = immerse(solve_family(r_value(o, 1.2)), ns, na).mesh;
    }
    summary = "mesh: " + std::to_string(mesh.vertices.size()) + " vertices, " +
              std::to_string(mesh.triangles.size()) + " triangles";
    return mesh_to_json(mesh);
}

Artifact cmd_spectrum(const Options& o, std::string& summary) {
    const double r = r_value(o, o.metric == "annulus" ? 1.2 : kDefaultR);
    const Surface s = make_surface(o, o.metric, r);
    const SpectrumResult sp = steklov_spectrum(s.mesh, s.metric, o.alpha, o.count, o.gap_floor);
    const auto sizes = cluster_multiplicities(sp.eigenvalues, o.cluster_tol);
    std::vector<int> cluster_of_index;
    for (int sz : sizes) cluster_of_index.insert(cluster_of_index.end(), sz, sz);
    std::vector<int> nodal;
    for (const auto& x : sp.extensions) nodal.push_back(nodal_domains(s.mesh, x, 1e-8));

    summary = "spectrum: sigma0=" + summary_number(sp.eigenvalues.front()) +
              (sp.eigenvalues.size() > 1 ? " sigma1=" + summary_number(sp.eigenvalues[1]) : "");
    if (o.format == "csv") {
        CsvTable t{{"index", "sigma", "cluster_size", "nodal_domains"}, {}};
        for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i)
            t.add_row({csv_cell(static_cast<int>(i)), csv_cell(sp.eigenvalues[i]), csv_cell(cluster_of_index[i]),
                       csv_cell(nodal[i])});
        return t;
    }
    ordered_json j;
    j["alpha"] = sp.alpha;
    j["eigenvalues"] = sp.eigenvalues;
    j["gap"] = sp.admissibility.gap;
    j["admissible"] = sp.admissibility.admissible;
    j["lambda0_dirichlet"] = sp.admissibility.lambda0_dirichlet;
    j["clusters"] = sizes;
    j["nodal_domains"] = nodal;
    j["metric"] = o.metric;
    j["vertices"] = s.mesh.vertices.size();
    j["triangles"] = s.mesh.triangles.size();
    if (o.modes) {
        j["boundary_vertices"] = sp.boundary_vertices;
        ordered_json modes = ordered_json::array();
        for (const auto& u : sp.boundary_modes) modes.push_back(std::vector<double>(u.data(), u.data() + u.size()));
        j["boundary_modes"] = std::move(modes);
    }
    return j;
}

Artifact cmd_cap_verify(const Options& o, std::string& summary) {
    const double r = r_value(o);
    if (!(r > 0.0) || !(r < std::numbers::pi / 2)) throw InvalidArgument("cap-verify: r must lie in (0, pi/2)");
    const auto k0 = cap_mode_eigs(r, 0, 1, o.alpha);
    const auto k1 = cap_mode_eigs(r, 1, 1, o.alpha);
    const double s0 = k0.eigenvalues[0];
    const double s1 = k1.eigenvalues[0];

    const Surface s = make_surface(o, "cap", r);
    SpectrumResult sp;
    const ThetaReport rep = theta_eval(s.mesh, s.metric, r, o.gap_floor, &sp);
    const double e0 = -std::tan(r);
    const double e1 = 1.0 / std::tan(r);

    summary = "cap-verify: r=" + summary_number(r) + " sigma0=" + summary_number(s0) + " sigma1=" + summary_number(s1);
    if (o.format == "csv") {
        CsvTable t{{"r", "sigma0", "sigma1", "exact_sigma0", "exact_sigma1", "fem_sigma0", "fem_sigma1", "theta",
                    "bound"},
                   {}};
        t.add_row({csv_cell(r), csv_cell(s0), csv_cell(s1), csv_cell(e0), csv_cell(e1), csv_cell(rep.sigma0),
                   csv_cell(rep.sigma1), csv_cell(rep.theta), csv_cell(rep.bound)});
        return t;
    }
    const auto [nr, na] = disk_resolution(o);
    ordered_json j;
    j["r"] = r;
    j["sigma0"] = s0;
    j["sigma1"] = s1;
    j["exact"] = {{"sigma0", e0}, {"sigma1", e1}};
    j["radial"] = {{"error0", std::abs(s0 - e0)},
                   {"error1", std::abs(s1 - e1)},
                   {"residual0", mode_residual(k0.problem, k0.radial_profiles[0])},
                   {"residual1", mode_residual(k1.problem, k1.radial_profiles[0])}};
    j["fem"] = {{"n_radial", nr},
                {"n_angular", na},
                {"sigma0", rep.sigma0},
                {"sigma1", rep.sigma1},
                {"rel_error0", std::abs(rep.sigma0 - e0) / std::abs(e0)},
                {"rel_error1", std::abs(rep.sigma1 - e1) / std::abs(e1)}};
    j["theta"] = theta_report_to_json(rep);
    return j;
}

std::vector<double> default_family_grid() { return {0.4, 0.6, 0.8, 1.0, 1.2, 1.4, std::numbers::pi / 2}; }

struct CatalogRow {
    FamilyPoint point;
    double area = 0.0;
    double boundary_length = 0.0;
    double theta = 0.0;
    double bound = 0.0;
};

// Theta from the radial eigenvalues of the rotational metric; at r = pi/2 the
// boundary term is cos^2 r * sigma0 + sin^2 r * sigma1 = 0 with sigma1 = 0.
CatalogRow catalog_row(const FamilyPoint& p) {
    CatalogRow row{p, family_area(p.a, p.s0), family_boundary_length(p.a, p.s0), 0.0, theta_bound(0, 2, p.r)};
    double boundary_term = 0.0;
    if (p.r < std::numbers::pi / 2) {
        const auto k0 = annulus_mode_eigs(p.a, p.s0, 0, 2);
        const auto k1 = annulus_mode_eigs(p.a, p.s0, 1, 1);
        const double sigma0 = k0.eigenvalues[0];
        const double sigma1 = std::min(k0.eigenvalues[1], k1.eigenvalues[0]);
        const double c = std::cos(p.r);
        const double s = std::sin(p.r);
        boundary_term = sigma0 * c * c + sigma1 * s * s;
    }
    row.theta = boundary_term * row.boundary_length + 2.0 * row.area;
    return row;
}

Artifact cmd_annulus_family(const Options& o, std::string& summary) {
    std::vector<double> radii;
    if (o.r) radii.push_back(r_value(o));
    for (double x : o.r_grid) radii.push_back(angle(o, x));
    if (radii.empty()) radii = default_family_grid();
    std::vector<CatalogRow> rows;
    for (const auto& p : solve_family_grid(radii)) rows.push_back(catalog_row(p));

    summary = "annulus-family: " + std::to_string(rows.size()) + " point(s)";
    if (o.format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json j = family_point_to_json(row.point);
            j["area"] = row.area;
            j["boundary_length"] = row.boundary_length;
            j["theta"] = row.theta;
            j["bound"] = row.bound;
            j["slack"] = row.bound - row.theta;
            arr.push_back(std::move(j));
        }
        return ordered_json{{"points", std::move(arr)}};
    }
    CsvTable t{{"r", "a", "s0", "mu", "res0", "res1", "res2", "res3", "embedded", "theta", "bound", "slack"}, {}};
    for (const auto& row : rows) {
        const auto& p = row.point;
        t.add_row({csv_cell(p.r), csv_cell(p.a), csv_cell(p.s0), csv_cell(p.mu), csv_cell(p.residuals[0]),
                   csv_cell(p.residuals[1]), csv_cell(p.residuals[2]), csv_cell(p.residuals[3]), csv_cell(p.embedded),
                   csv_cell(row.theta), csv_cell(row.bound), csv_cell(row.bound - row.theta)});
    }
    return t;
}

Artifact cmd_theta(const Options& o, std::string& summary) {
    const double r = r_value(o, o.metric == "annulus" ? 1.2 : kDefaultR);
    const Surface s = make_surface(o, o.metric, r);
    const ThetaReport rep = theta_eval(s.mesh, s.metric, r, o.gap_floor);
    summary = "theta: " + summary_number(rep.theta) + " bound " + summary_number(rep.bound);
    if (o.format == "csv") {
        CsvTable t{theta_header(), {}};
        t.add_row(theta_cells(rep));
        return t;
    }
    return theta_report_to_json(rep);
}

Artifact cmd_optimize(const Options& o, std::string& summary) {
    const double r = r_value(o);
    if (o.start == "annulus") throw InvalidArgument("optimize: the start metric must be conformal");
    const Surface s = make_surface(o, o.start, r);
    OptimizeParams params;
    params.max_steps = o.steps;
    params.step0 = o.step0;
    params.gap_margin = o.gap_margin;
    params.smoothing = o.smoothing;
    params.cluster_tol = o.cluster_tol;
    params.gap_floor = o.gap_floor;
    const OptimizeTrace tr = optimize_conformal(s.mesh, s.metric, r, params);

    summary = "optimize: theta " + summary_number(tr.iterations.front().theta) + " -> " +
              summary_number(tr.final_report.theta) + " in " + std::to_string(tr.iterations.size() - 1) +
              " step(s)" + (tr.stalled ? ", stalled" : "");
    if (o.format == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& it : tr.iterations)
            rows.push_back({{"step", it.step},
                            {"theta", it.theta},
                            {"sigma0", it.sigma0},
                            {"sigma1", it.sigma1},
                            {"gap", it.gap},
                            {"step_size", it.step_size}});
        ordered_json j;
        j["iterations"] = std::move(rows);
        j["stalled"] = tr.stalled;
        j["final"] = theta_report_to_json(tr.final_report);
        j["final_metric"] = metric_to_json(tr.final_metric);
        return j;
    }
    CsvTable t{{"step", "theta", "sigma0", "sigma1", "gap", "step_size"}, {}};
    for (const auto& it : tr.iterations)
        t.add_row({csv_cell(it.step), csv_cell(it.theta), csv_cell(it.sigma0), csv_cell(it.sigma1), csv_cell(it.gap),
                   csv_cell(it.step_size)});
    return t;
}

struct SweepCell {
    double r = 0.0;
    std::string metric;
    std::optional<ThetaReport> report;
    std::string status = "ok";
};

Artifact cmd_sweep(const Options& o, std::string& summary) {
    std::vector<double> radii;
    for (double x : o.r_grid) radii.push_back(angle(o, x));
    if (o.r) radii.push_back(r_value(o));
    if (radii.empty()) radii = {std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 3};

    std::vector<SweepCell> cells;
    for (double r : radii)
        for (const auto& m : o.metrics) cells.push_back({r, m, std::nullopt, "ok"});

    auto work = [&](SweepCell& cell) {
        try {
            const Surface s = make_surface(o, cell.metric, cell.r);
            cell.report = theta_eval(s.mesh, s.metric, cell.r, o.gap_floor);
        } catch (const NotAdmissible&) {
            cell.status = "not_admissible";
        } catch (const InvalidArgument&) {
            cell.status = "invalid";
        } catch (const Error&) {
            cell.status = "solver_failure";
        }
    };
    const int threads = std::min<int>(resolved_threads(o), static_cast<int>(cells.size()));
    if (threads <= 1) {
        for (auto& c : cells) work(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cells.size(); i = next++) work(cells[i]);
            });
        for (auto& th : pool) th.join();
    }

    int ok = 0;
    for (const auto& c : cells) ok += c.report.has_value();
    summary = "sweep: " + std::to_string(ok) + "/" + std::to_string(cells.size()) + " cells evaluated";
    if (o.format == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& c : cells) {
            ordered_json j;
            j["r"] = c.r;
            j["metric"] = c.metric;
            j["status"] = c.status;
            if (c.report) j["report"] = theta_report_to_json(*c.report);
            rows.push_back(std::move(j));
        }
        return ordered_json{{"rows", std::move(rows)}};
    }
    auto header = theta_header();
    header.insert(header.begin() + 1, "metric");
    header.push_back("status");
    CsvTable t{header, {}};
    for (const auto& c : cells) {
        std::vector<std::string> row;
        if (c.report) {
            row = theta_cells(*c.report);
        } else {
            row.assign(header.size() - 2, "");
            row[0] = csv_cell(c.r);
        }
        row.insert(row.begin() + 1, c.metric);
        row.push_back(c.status);
        t.add_row(std::move(row));
    }
    return t;
}

// ---- parsing ----------------------------------------------------------------

void add_common(CLI::App* sub, Options& o, bool csv_allowed) {
    sub->add_option("--out", o.out_path, "Write the artifact to this path (default: stdout)");
    if (csv_allowed)
        sub->add_option("--format", o.format, "Artifact format")->check(CLI::IsMember({"json", "csv"}));
    else
        sub->add_option("--format", o.format, "Artifact format")->check(CLI::IsMember({"json"}));
    sub->add_option("--threads", o.threads, "Worker threads (fallback: CAPSTEK_THREADS)")->check(CLI::PositiveNumber);
    sub->add_flag("--degrees", o.degrees, "Read angles in degrees");
    sub->add_option("--gap-floor", o.gap_floor, "Relative Dirichlet gap floor")->check(CLI::NonNegativeNumber);
    sub->add_option("--cluster-tol", o.cluster_tol, "Relative tolerance for eigenvalue clusters")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--n-radial", o.n_radial, "Radial (disk) or axial (annulus) subdivisions")
        ->check(CLI::PositiveNumber);
    sub->add_option("--n-angular", o.n_angular, "Angular subdivisions")->check(CLI::Range(3, 1 << 20));
}

void add_surface(CLI::App* sub, Options& o) {
    sub->add_option("--metric", o.metric, "Metric source")
        ->check(CLI::IsMember({"flat", "cap", "random", "annulus", "file"}));
    sub->add_option("--seed", o.seed, "Seed for --metric random");
    sub->add_option("--mesh-file", o.mesh_file, "Mesh JSON for --metric file");
    sub->add_option("--metric-file", o.metric_file, "Metric JSON for --metric file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Steklov-with-frequency spectra and the Theta_r functional on caps and annuli", "capstek"};
    app.require_subcommand(1, 1);
    app.fallthrough(false);

    std::map<CLI::App*, std::function<Artifact(const Options&, std::string&)>> handlers;
    std::map<CLI::App*, std::string> default_format;

    auto* mesh = app.add_subcommand("mesh", "Emit a mesh as JSON");
    add_common(mesh, o, false);
    mesh->add_option("--kind", o.kind, "disk or annulus")->check(CLI::IsMember({"disk", "annulus"}));
    mesh->add_option("--r", o.r, "Cap radius selecting the annulus");
    handlers[mesh] = cmd_mesh;

    auto* spectrum = app.add_subcommand("spectrum", "Steklov-with-frequency spectrum of a surface");
    add_common(spectrum, o, true);
    add_surface(spectrum, o);
    spectrum->add_option("--r", o.r, "Cap radius (cap and annulus metrics)");
    spectrum->add_option("--alpha", o.alpha, "Frequency");
    spectrum->add_option("--count", o.count, "Number of eigenvalues")->check(CLI::PositiveNumber);
    spectrum->add_flag("--modes", o.modes, "Include boundary mode vectors");
    handlers[spectrum] = cmd_spectrum;

    auto* cap = app.add_subcommand("cap-verify", "Radial and FEM eigenvalues of a spherical cap");
    add_common(cap, o, true);
    cap->add_option("--r", o.r, "Cap radius");
    cap->add_option("--alpha", o.alpha, "Frequency");
    handlers[cap] = cmd_cap_verify;

    auto* family = app.add_subcommand("annulus-family", "Free-boundary rotational annuli");
    add_common(family, o, true);
    family->add_option("--r", o.r, "Cap radius");
    family->add_option("--r-grid", o.r_grid, "Comma-separated cap radii")->delimiter(',');
    handlers[family] = cmd_annulus_family;
    default_format[family] = "csv";

    auto* theta = app.add_subcommand("theta", "Evaluate Theta_r and its bound");
    add_common(theta, o, true);
    add_surface(theta, o);
    theta->add_option("--r", o.r, "Cap radius");
    handlers[theta] = cmd_theta;

    auto* optimize = app.add_subcommand("optimize", "Conformal ascent on Theta_r");
    add_common(optimize, o, true);
    optimize->add_option("--r", o.r, "Cap radius");
    optimize->add_option("--start", o.start, "Start metric")->check(CLI::IsMember({"flat", "cap", "random"}));
    optimize->add_option("--seed", o.seed, "Seed for --start random");
    optimize->add_option("--steps", o.steps, "Maximum steps")->check(CLI::NonNegativeNumber);
    optimize->add_option("--step0", o.step0, "Initial max log-factor change")->check(CLI::PositiveNumber);
    optimize->add_option("--gap-margin", o.gap_margin, "Dirichlet gap safeguard")->check(CLI::NonNegativeNumber);
    optimize->add_option("--smoothing", o.smoothing, "Smoother strength (0 disables)")->check(CLI::NonNegativeNumber);
    handlers[optimize] = cmd_optimize;
    default_format[optimize] = "csv";

    auto* sweep = app.add_subcommand("sweep", "Theta_r over a grid of radii and metric families");
    add_common(sweep, o, true);
    sweep->add_option("--r", o.r, "Single cap radius");
    sweep->add_option("--r-grid", o.r_grid, "Comma-separated cap radii")->delimiter(',');
    sweep->add_option("--metrics", o.metrics, "Comma-separated metric families")
        ->delimiter(',')
        ->check(CLI::IsMember({"flat", "cap", "random", "annulus"}));
    sweep->add_option("--seed", o.seed, "Seed for the random family");
    handlers[sweep] = cmd_sweep;
    default_format[sweep] = "csv";

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run with --help for usage\n";
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (o.format.empty()) o.format = default_format.count(chosen) ? default_format[chosen] : "json";

    std::string summary;
    std::ostringstream payload;
    try {
        const Artifact artifact = handlers.at(chosen)(o, summary);
        if (const auto* j = std::get_if<ordered_json>(&artifact)) payload << to_json_text(*j);
        else write_csv(payload, std::get<CsvTable>(artifact));
    } catch (const Error& e) {
        ordered_json j;
        j["error"] = {{"kind", e.kind()}, {"message", e.what()}};
        if (const auto* na = dynamic_cast<const NotAdmissible*>(&e)) j["error"]["gap"] = na->gap();
        out << to_json_text(j);
        err << chosen->get_name() << ": " << e.kind() << ": " << e.what() << "\n";
        return kExitComputation;
    } catch (const std::exception& e) {
        ordered_json j;
        j["error"] = {{"kind", "InternalError"}, {"message", e.what()}};
        out << to_json_text(j);
        err << chosen->get_name() << ": " << e.what() << "\n";
        return kExitComputation;
    }

    if (o.out_path.empty()) {
        out << payload.str();
    } else {
        std::ofstream file(o.out_path, std::ios::binary);
        file << payload.str();
        if (!file) {
            ordered_json j;
            j["error"] = {{"kind", "IOError"}, {"message", "cannot write " + o.out_path}};
            out << to_json_text(j);
            err << chosen->get_name() << ": cannot write " << o.out_path << "\n";
            return kExitComputation;
        }
    }
    err << summary << "\n";
    return kExitOk;
}

}  // namespace capstek::cli
