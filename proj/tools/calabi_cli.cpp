// Command-line front end: machine-readable invariant and classification
// reports on stdout (JSON), human-readable progress on stderr.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid input.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "calabi/affine.hpp"
#include "calabi/catalog.hpp"
#include "calabi/jet.hpp"
#include "calabi/normal_form.hpp"
#include "calabi/reconstruct.hpp"
#include "calabi/simdiag.hpp"
#include "calabi/tensor.hpp"

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct ResolvedSpec {
    std::optional<calabi::CatalogSurface> surface;
    calabi::FunctionSpec func;
    std::string label;
};

ResolvedSpec resolve_spec(const std::string& text, int dim_hint) {
    ResolvedSpec r;
    if (text.find(':') != std::string::npos) {
        r.surface = calabi::CatalogSurface::parse(text);
        r.func = r.surface->as_function();
        r.label = r.surface->id();
        return r;
    }
    r.func = dim_hint > 0 ? calabi::parse(text, dim_hint) : calabi::parse(text);
    r.label = text;
    return r;
}

std::vector<std::vector<double>> load_points_file(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in)
        throw calabi::InvalidArgument("cannot open points file '" + path + "'");
    json j;
    in >> j;
    const json& arr = j.is_object() && j.contains("points") ? j.at("points") : j;
    if (!arr.is_array())
        throw calabi::InvalidArgument("points file must hold an array of points");
    std::vector<std::vector<double>> pts;
    for (const auto& row : arr) {
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw calabi::InvalidArgument("every point must have " + std::to_string(dim) +
                                          " coordinates");
        std::vector<double> x;
        for (const auto& v : row)
            x.push_back(v.get<double>());
        pts.push_back(std::move(x));
    }
    return pts;
}

std::vector<std::vector<double>> sample_box(int dim, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> pts;
    for (int p = 0; p < count; ++p) {
        std::vector<double> x(dim);
        for (int i = 0; i < dim; ++i)
            x[i] = 0.6 + 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53);
        pts.push_back(std::move(x));
    }
    return pts;
}

std::vector<std::vector<double>> gather_points(const ResolvedSpec& spec, int random_count,
                                               std::uint64_t seed, const std::string& points_file) {
    if (!points_file.empty())
        return load_points_file(points_file, spec.func.dim);
    const int count = random_count > 0 ? random_count : 10;
    if (spec.surface)
        return spec.surface->sample_points(count, seed);
    return sample_box(spec.func.dim, count, seed);
}

json vec_to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v)
        a.push_back(x);
    return a;
}

json eigen_vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back(v(i));
    return a;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

bool all_finite(const json& j) {
    if (j.is_number_float())
        return std::isfinite(j.get<double>());
    if (j.is_array() || j.is_object()) {
        for (const auto& v : j)
            if (!all_finite(v))
                return false;
    }
    return true;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw calabi::InvalidArgument("invalid " + what + " '" + s + "'");
    }
    if (used != s.size())
        throw calabi::InvalidArgument("invalid " + what + " '" + s + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    if (text.empty())
        return out;
    std::size_t pos = 0;
    for (;;) {
        std::size_t next = text.find(',', pos);
        std::string tok =
            next == std::string::npos ? text.substr(pos) : text.substr(pos, next - pos);
        out.push_back(parse_double(tok, what));
        if (next == std::string::npos)
            return out;
        pos = next + 1;
    }
}

// ---------------------------------------------------------------------------
// invariants / classify
// ---------------------------------------------------------------------------

int cmd_invariants(const std::string& spec_text, int dim_hint, int random_count,
                   std::uint64_t seed, const std::string& points_file, double tol,
                   bool classify_only) {
    ResolvedSpec spec = resolve_spec(spec_text, dim_hint);
    auto points = gather_points(spec, random_count, seed, points_file);

    json report;
    report["surface"] = spec.label;
    report["tool_version"] = kToolVersion;
    report["seed"] = seed;
    report["tolerance"] = tol;
    json recs = json::array();
    json rejected = json::array();

    double max_cov = 0.0, max_riem = 0.0, max_abs_r = 0.0, max_ext = 0.0;

    for (const auto& x : points) {
        try {
            calabi::Jet4 jet = calabi::eval_jet(spec.func, x, 4);
            calabi::TensorBundle b = calabi::bundle_at(jet);

            json rec;
            rec["x"] = vec_to_json(x);

            calabi::NormalFormOptions opts;
            calabi::MaximizeResult mx = calabi::maximize_cubic(b, opts);
            calabi::NormalForm nf = calabi::build_basis(b, mx.direction, opts);
            rec["mu"] = eigen_vec_to_json(nf.spectrum);
            try {
                rec["case"] = calabi::case_name(calabi::classify_case(nf.spectrum, opts.tie_tol));
            } catch (const calabi::PatternMismatch&) {
                rec["case"] = nullptr;
            }

            if (classify_only) {
                rec["max_offdiag"] = nf.max_offdiag;
                rec["criticality_residual"] = mx.residual;
            } else {
                const double cov = std::sqrt(b.cubic.covA_norm2);
                const double riem = std::sqrt(b.curv.riem_norm2);
                const double ext = calabi::extremal_residual(jet);
                rec["J"] = b.curv.pick_J;
                rec["R"] = b.curv.scalar_trace;
                rec["T_norm2"] = b.curv.tcheb_norm2;
                rec["covA_norm"] = cov;
                rec["riem_norm"] = riem;
                rec["extremal_residual"] = ext;
                max_cov = std::max(max_cov, cov);
                max_riem = std::max(max_riem, riem);
                max_abs_r = std::max(max_abs_r, std::abs(b.curv.scalar_trace));
                max_ext = std::max(max_ext, std::abs(ext));
            }

            if (!all_finite(rec)) {
                json rej;
                rej["x"] = vec_to_json(x);
                rej["error"] = "non-finite value in record";
                rejected.push_back(rej);
                continue;
            }
            recs.push_back(rec);
        } catch (const calabi::Error& e) {
            json rej;
            rej["x"] = vec_to_json(x);
            rej["error"] = e.what();
            rejected.push_back(rej);
        }
    }

    report["points"] = recs;
    report["rejected"] = rejected;
    if (!classify_only) {
        json summary;
        summary["max_covA_norm"] = max_cov;
        summary["max_riem_norm"] = max_riem;
        summary["max_abs_R"] = max_abs_r;
        summary["max_extremal_residual"] = max_ext;
        summary["parallel"] = max_cov < tol;
        summary["flat"] = max_riem < tol;
        summary["extremal"] = max_ext < tol;
        report["summary"] = summary;
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify-catalog
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    bool pass;
    double worst;
    double bound;
};

json check_to_json(const Check& c) {
    json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["worst"] = c.worst;
    j["bound"] = c.bound;
    return j;
}

std::vector<Check> verify_surface(const calabi::CatalogSurface& s, int count, std::uint64_t seed,
                                  double tol) {
    const calabi::ExpectedInvariants exp = s.expected_invariants();
    const calabi::FunctionSpec f = s.as_function();
    auto points = s.sample_points(count, seed);

    double dev_j = 0.0, dev_r = 0.0, dev_t = 0.0, dev_consistency = 0.0;
    double max_cov = 0.0, dev_riem2 = 0.0, max_ext = 0.0;
    double rhs1 = 0.0, rhs2 = 0.0, dev_mu1 = 0.0;
    int label_mismatches = 0;

    const double expected_riem2 =
        s.kind() == calabi::SurfaceKind::LogCone
            ? 4.0 * s.params()[0] * s.params()[0] * s.params()[0] * s.params()[0]
            : 0.0;

    for (const auto& x : points) {
        calabi::Jet4 jet = calabi::eval_jet(f, x, 4);
        calabi::TensorBundle b = calabi::bundle_at(jet);
        dev_j = std::max(dev_j, std::abs(b.curv.pick_J - exp.pick_J));
        dev_r = std::max(dev_r, std::abs(b.curv.scalar_trace - exp.scalar_R));
        dev_t = std::max(dev_t, std::abs(b.curv.tcheb_norm2 - exp.tcheb_norm2));
        dev_consistency = std::max(dev_consistency, b.curv.scalar_discrepancy);
        max_cov = std::max(max_cov, std::sqrt(b.cubic.covA_norm2));
        dev_riem2 = std::max(dev_riem2, std::abs(b.curv.riem_norm2 - expected_riem2));
        max_ext = std::max(max_ext, std::abs(calabi::extremal_residual(jet)));
        auto rhs = calabi::parallel_rhs_checks(b);
        rhs1 = std::max(rhs1, rhs.first);
        rhs2 = std::max(rhs2, rhs.second);

        calabi::NormalForm nf = calabi::normal_form_at(b);
        if (nf.case_index != exp.case_index)
            ++label_mismatches;
        dev_mu1 = std::max(dev_mu1, std::abs(nf.spectrum(0) - exp.mu1));
    }

    std::vector<Check> checks;
    auto add = [&checks](const std::string& name, double worst, double bound) {
        checks.push_back({name, worst < bound, worst, bound});
    };
    add("pick_invariant", dev_j, tol * (1.0 + std::abs(exp.pick_J)));
    add("scalar_curvature", dev_r, tol * (1.0 + std::abs(exp.scalar_R)));
    add("tchebychev_norm", dev_t, tol * (1.0 + exp.tcheb_norm2));
    add("scalar_consistency", dev_consistency, tol * (1.0 + std::abs(exp.scalar_R)));
    add("parallel_cubic", max_cov, tol);
    add("flatness_norm", dev_riem2, tol * (1.0 + expected_riem2));
    add("extremal_pde", max_ext, tol);
    add("parallel_rhs_first", rhs1, tol);
    add("parallel_rhs_second", rhs2, tol);
    add("mu1", dev_mu1, 1e-6 * (1.0 + exp.mu1));
    checks.push_back({"classification", label_mismatches == 0,
                      static_cast<double>(label_mismatches), 1.0});

    if (s.kind() == calabi::SurfaceKind::LogCone) {
        const double c = s.params()[0];
        std::mt19937_64 rng(seed ^ 0x10c0199u);
        auto uniform = [&rng](double lo, double hi) {
            return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
        };
        double graph_res = 0.0, metric_dev = 0.0, oracle_dev = 0.0;
        for (int p = 0; p < count; ++p) {
            const double y1 = uniform(-1.0 / c, 1.0 / c);
            const double y2 = uniform(0.1, 3.0 / c);
            const double y3 = uniform(0.0, 2.0 * M_PI / c);
            Eigen::Vector4d x = calabi::logcone_param(c, y1, y2, y3);
            graph_res = std::max(graph_res,
                                 std::abs(x(3) + std::log(x(0) * x(0) - x(1) * x(1) - x(2) * x(2)) /
                                                     (2.0 * c * c)));

            std::vector<double> base{x(0), x(1), x(2)};
            calabi::Jet4 jet = calabi::eval_jet(f, base, 2);
            Eigen::Matrix3d H;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    H(i, j) = jet.d2(i, j);
            Eigen::Matrix3d J = calabi::logcone_param_jacobian(c, y1, y2, y3);
            Eigen::Matrix3d pulled = J.transpose() * H * J;
            Eigen::Matrix3d target = Eigen::Matrix3d::Identity();
            const double sh = std::sinh(c * y2);
            target(2, 2) = sh * sh;
            metric_dev = std::max(metric_dev, (pulled - target).cwiseAbs().maxCoeff());
        }
        for (int p = 0; p < 10; ++p) {
            Eigen::Vector3d y_from(uniform(-0.5, 0.5), uniform(0.2, 1.0), uniform(0.0, 1.0));
            Eigen::Vector3d y_to(uniform(-0.5, 0.5), uniform(0.2, 2.0), uniform(0.0, 2.0));
            Eigen::Vector4d xi = calabi::integrate_hyperbolic_frames(c, y_from, y_to, 2000);
            Eigen::Vector4d xc = calabi::logcone_param(c, y_to(0), y_to(1), y_to(2));
            oracle_dev = std::max(oracle_dev, (xi - xc).norm());
        }
        add("parametrization_graph", graph_res, 1e-10);
        add("parametrization_metric", metric_dev, 1e-8);
        add("hyperbolic_frame_oracle", oracle_dev, 1e-8);
    }
    return checks;
}

int cmd_verify_catalog(const std::string& id, bool all, int count, std::uint64_t seed, double tol) {
    std::vector<calabi::CatalogSurface> surfaces;
    if (all) {
        surfaces.push_back(calabi::CatalogSurface::paraboloid(2));
        surfaces.push_back(calabi::CatalogSurface::paraboloid(3));
        surfaces.push_back(calabi::CatalogSurface::q({1.0}, 2));
        surfaces.push_back(calabi::CatalogSurface::q({0.5, 2.0}, 2));
        surfaces.push_back(calabi::CatalogSurface::q({2.0}, 3));
        surfaces.push_back(calabi::CatalogSurface::q({2.0, 3.0}, 3));
        surfaces.push_back(calabi::CatalogSurface::q({1.0, 1.0, 1.0}, 3));
        surfaces.push_back(calabi::CatalogSurface::log_cone(0.5));
        surfaces.push_back(calabi::CatalogSurface::log_cone(1.0));
        surfaces.push_back(calabi::CatalogSurface::log_cone(2.0));
    } else {
        surfaces.push_back(calabi::CatalogSurface::parse(id));
    }

    json out;
    out["tool_version"] = kToolVersion;
    out["seed"] = seed;
    out["tolerance"] = tol;
    json results = json::array();
    bool all_pass = true;

    for (const auto& s : surfaces) {
        std::vector<Check> checks = verify_surface(s, count, seed, tol);
        json sj;
        sj["surface"] = s.id();
        json cj = json::array();
        bool surface_pass = true;
        for (const auto& c : checks) {
            cj.push_back(check_to_json(c));
            surface_pass = surface_pass && c.pass;
            std::fprintf(stderr, "[%s] %-14s %-24s worst %.3e (bound %.1e)\n",
                         c.pass ? "PASS" : "FAIL", s.id().c_str(), c.name.c_str(), c.worst,
                         c.bound);
        }
        sj["checks"] = cj;
        sj["pass"] = surface_pass;
        results.push_back(sj);
        all_pass = all_pass && surface_pass;
    }
    out["results"] = results;
    out["pass"] = all_pass;
    std::cout << out.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

int cmd_reconstruct(const std::string& a_text, int n, const std::string& v_text, int steps) {
    calabi::FlatParallelData data;
    data.dim = n;
    data.diag = parse_list(a_text, "diagonal cubic value");
    data.v = v_text.empty() ? std::vector<double>(n, 1.0) : parse_list(v_text, "coordinate");
    data.validate();

    Eigen::VectorXd xc = calabi::closed_form(data);
    calabi::IntegrationResult ir = calabi::integrate_frames(data, steps);
    calabi::CatalogSurface s = calabi::recovered_surface(data);

    json out;
    out["tool_version"] = kToolVersion;
    out["n"] = n;
    out["a"] = vec_to_json(data.diag);
    json c = json::array();
    for (double ai : data.diag)
        c.push_back(1.0 / (ai * ai));
    out["c"] = c;
    out["surface"] = s.id();
    out["x_closed"] = eigen_vec_to_json(xc);
    out["x_integrated"] = eigen_vec_to_json(ir.x_end);
    out["integration_deviation"] = (xc - ir.x_end).norm();
    out["error_estimate"] = ir.error_estimate;

    // Round trip: the frame cubic of the recovered surface must reproduce the
    // diagonal values, padded with zeros.
    std::vector<double> point(n, 1.0);
    calabi::TensorBundle b = calabi::bundle_at(calabi::eval_jet(s.as_function(), point, 4));
    std::vector<double> diag = calabi::frame_cubic_diagonal(b);
    double max_dev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double want = i < data.r() ? data.diag[i] : 0.0;
        max_dev = std::max(max_dev, std::abs(diag[i] - want));
    }
    json rt;
    rt["point"] = vec_to_json(point);
    rt["frame_diagonal"] = vec_to_json(diag);
    rt["max_deviation"] = max_dev;
    out["roundtrip"] = rt;

    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// diag
// ---------------------------------------------------------------------------

int cmd_diag(const std::string& file, std::uint64_t seed, double tol) {
    std::ifstream in(file);
    if (!in)
        throw calabi::InvalidArgument("cannot open matrix file '" + file + "'");
    json j;
    in >> j;
    if (!j.contains("matrices") || !j.at("matrices").is_array() || j.at("matrices").empty())
        throw calabi::InvalidArgument("matrix file needs a non-empty 'matrices' array");

    calabi::SymFamily fam;
    if (j.contains("tol"))
        fam.commute_tol = j.at("tol").get<double>();
    else
        fam.commute_tol = tol;
    for (const auto& mj : j.at("matrices")) {
        const int d = static_cast<int>(mj.size());
        Eigen::MatrixXd m(d, d);
        for (int r = 0; r < d; ++r) {
            if (static_cast<int>(mj.at(r).size()) != d)
                throw calabi::InvalidArgument("matrices must be square");
            for (int c = 0; c < d; ++c)
                m(r, c) = mj.at(r).at(c).get<double>();
        }
        fam.matrices.push_back(std::move(m));
    }

    calabi::SimDiagResult res = calabi::simultaneous_diagonalize(fam, seed);
    json out;
    out["tool_version"] = kToolVersion;
    out["seed"] = seed;
    out["P"] = matrix_to_json(res.P);
    out["eigenvalues"] = matrix_to_json(res.eigenvalues);
    out["max_offdiag"] = res.max_offdiag;
    out["orthogonality"] = res.orthogonality;
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariant calculus and classification checks for Calabi graph hypersurfaces"};
    app.require_subcommand(1);
    app.fallthrough(); // --seed/--tol may follow the subcommand

    std::uint64_t seed = 1;
    double tol = 1e-8;
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--tol", tol, "residual tolerance")
        ->envname("CALABI_TOL")
        ->capture_default_str();

    std::string spec_text, points_file;
    int random_count = 0;
    int dim_hint = 0;

    CLI::App* inv = app.add_subcommand("invariants", "per-point invariant report (JSON)");
    inv->add_option("spec", spec_text, "catalog id (paraboloid:n, q:c1,..:n, logcone:c) or DSL expression")
        ->required();
    inv->add_option("--random", random_count, "number of seeded random domain points");
    inv->add_option("--points", points_file, "JSON file with explicit points");
    inv->add_option("--dim", dim_hint, "dimension override for DSL expressions");

    CLI::App* cls = app.add_subcommand("classify", "per-point Ejiri spectrum and case label (JSON)");
    cls->add_option("spec", spec_text, "catalog id or DSL expression")->required();
    cls->add_option("--random", random_count, "number of seeded random domain points");
    cls->add_option("--points", points_file, "JSON file with explicit points");
    cls->add_option("--dim", dim_hint, "dimension override for DSL expressions");

    std::string catalog_id;
    bool verify_all = false;
    int verify_count = 100;
    CLI::App* ver = app.add_subcommand("verify-catalog", "run the catalog property suite");
    ver->add_option("id", catalog_id, "catalog id to verify");
    ver->add_flag("--all", verify_all, "verify the whole representative catalog");
    ver->add_option("--random", verify_count, "points per surface")->capture_default_str();

    std::string a_text, v_text = "";
    int recon_n = 0, recon_steps = 10000;
    CLI::App* rec = app.add_subcommand("reconstruct", "rebuild a flat-parallel surface from cubic data");
    rec->add_option("--a", a_text, "comma-separated diagonal cubic values (may be empty)");
    rec->add_option("--n", recon_n, "dimension")->required();
    rec->add_option("--v", v_text, "target coordinates (default: all ones)");
    rec->add_option("--steps", recon_steps, "integration steps")->capture_default_str();

    std::string diag_file;
    CLI::App* dg = app.add_subcommand("diag", "simultaneously diagonalize matrices from a JSON file");
    dg->add_option("--file", diag_file, "JSON file with a 'matrices' array")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (inv->parsed())
            return cmd_invariants(spec_text, dim_hint, random_count, seed, points_file, tol, false);
        if (cls->parsed())
            return cmd_invariants(spec_text, dim_hint, random_count, seed, points_file, tol, true);
        if (ver->parsed()) {
            if (!verify_all && catalog_id.empty())
                throw calabi::InvalidArgument("verify-catalog needs an id or --all");
            return cmd_verify_catalog(catalog_id, verify_all, verify_count, seed, tol);
        }
        if (rec->parsed())
            return cmd_reconstruct(a_text, recon_n, v_text, recon_steps);
        if (dg->parsed())
            return cmd_diag(diag_file, seed, tol);
    } catch (const calabi::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const calabi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
