#include "tdbem/harness.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "tdbem/block_io.hpp"
#include "tdbem/potential.hpp"
#include "tdbem/sigma_terms.hpp"

namespace tdbem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec3 mesh_centre(const SurfaceMesh& mesh) {
    Vec3 c = Vec3::Zero();
    for (const auto& v : mesh.vertices()) c += v;
    return c / static_cast<double>(mesh.num_vertices());
}

// Loads blocks from the cache directory, or assembles and stores them.
ToeplitzBlocks cached(const ExperimentConfig& cfg, const std::string& key, const std::function<ToeplitzBlocks()>& make) {
    if (cfg.cache_dir.empty()) return make();
    std::filesystem::create_directories(cfg.cache_dir);
    std::ostringstream name;
    name << "blocks_" << std::hex << std::hash<std::string>{}(key) << ".bin";
    const auto path = cfg.cache_dir / name.str();
    if (std::filesystem::exists(path)) return load_blocks(path);
    ToeplitzBlocks b = make();
    save_blocks(b, path);
    return b;
}

std::string level_key(const ExperimentConfig& cfg, const Level& l, const std::string& op) {
    std::ostringstream k;
    k.precision(17);
    k << op << '|' << std::filesystem::absolute(cfg.mesh).string() << '|' << l.level << '|' << l.grid.nt << '|'
      << l.grid.dt << '|' << cfg.alpha_inf << '|' << cfg.alpha;
    return k.str();
}

void add_signals(ExperimentResult& r, const FieldComparison& f, int level) {
    for (std::size_t i = 0; i < f.computed.size(); ++i) {
        Table s;
        s.name = "signal_L" + std::to_string(level) + "_P" + std::to_string(i);
        s.columns = {"t", "computed", "reference"};
        for (std::size_t k = 0; k < f.t.size(); ++k) s.add_row({f.t[k], f.computed[i][k], f.reference[i][k]});
        r.tables.push_back(std::move(s));
    }
}

double two_point_rate(double e0, double e1, double h0, double h1) {
    if (!(e0 > 0.0) || !(e1 > 0.0)) return kNaN;
    return std::log(e0 / e1) / std::log(h0 / h1);
}

}  // namespace

double fitted_rate(const std::vector<double>& errors, const std::vector<double>& steps) {
    if (errors.size() < 3) return kNaN;
    for (double e : errors)
        if (!(e > 0.0)) return kNaN;
    return estimate_rate(errors, steps);
}

std::vector<Level> make_levels(const ExperimentConfig& cfg) {
    cfg.validate();
    SurfaceMesh mesh = load_mesh(cfg.mesh);
    const int nt0 = static_cast<int>(std::ceil(cfg.horizon / (cfg.dt_factor * mesh.h()) - 1e-9));
    std::vector<Level> levels;
    for (int l = 0; l < cfg.levels; ++l) {
        if (l > 0) mesh = refine_uniform(mesh);
        const int nt = nt0 << l;
        levels.push_back({l, mesh, TimeGrid{cfg.horizon / nt, nt, cfg.sigma}});
    }
    return levels;
}

double winding_number(const SurfaceMesh& mesh, const Vec3& x) {
    double w = 0.0;
    for (std::size_t i = 0; i < mesh.num_triangles(); ++i) {
        const PanelGeometry g = mesh.panel(i);
        const Vec3 a = g.vertices[0] - x, b = g.vertices[1] - x, c = g.vertices[2] - x;
        const double la = a.norm(), lb = b.norm(), lc = c.norm();
        const double num = a.dot(b.cross(c));
        const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
        w += 2.0 * std::atan2(num, den);
    }
    // outward orientation: an enclosed point sees +4 pi
    return w / (4.0 * std::numbers::pi);
}

void check_source(const ExperimentConfig& cfg, const SurfaceMesh& mesh) {
    if (!mesh.closed()) throw HarnessError("manufactured source needs a closed mesh");
    if (std::abs(winding_number(mesh, cfg.source) - 1.0) > 1e-6) throw HarnessError("source is not inside the obstacle");
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.num_triangles(); ++i)
        d = std::min(d, distance_range(cfg.source, mesh.panel(i)).first);
    if (d < 0.25 * mesh.h()) throw HarnessError("source is closer than h/4 to the boundary");
}

PointSourceField manufactured_source(const ExperimentConfig& cfg) {
    return PointSourceField(cfg.source, Pulse{cfg.pulse_amplitude, cfg.pulse_tau}, cfg.alpha_inf);
}

SpaceTimeFunction manufactured_dirichlet_data(const ExperimentConfig& cfg) {
    auto src = std::make_shared<PointSourceField>(manufactured_source(cfg));
    return [src](double t, const Vec3& x) { return src->value(t, x); };
}

std::vector<Vec3> surrogate_points(const ExperimentConfig& cfg, const SurfaceMesh& mesh) {
    const double g = std::numbers::phi;
    const std::vector<Vec3> dirs = {{0, 1, g}, {0, -1, g},  {0, 1, -g}, {0, -1, -g}, {1, g, 0},  {-1, g, 0},
                                    {1, -g, 0}, {-1, -g, 0}, {g, 0, 1},  {-g, 0, 1},  {g, 0, -1}, {-g, 0, -1}};
    const Vec3 c = mesh_centre(mesh);
    std::vector<Vec3> pts;
    for (int i = 0; i < cfg.surrogate_points; ++i) {
        const Vec3 x = c + cfg.surrogate_radius * dirs[i].normalized();
        if (!(x.z() > 0.0)) throw HarnessError("surrogate point below the plane; reduce surrogate_radius");
        if (mesh.closed() && winding_number(mesh, x) > 0.5) throw HarnessError("surrogate point inside the obstacle");
        pts.push_back(x);
    }
    return pts;
}

FieldComparison compare_field(const std::function<double(double, const Vec3&)>& computed,
                              const std::function<double(double, const Vec3&)>& reference,
                              const std::vector<Vec3>& points, const TimeGrid& grid, int oversample) {
    FieldComparison f;
    f.t = observation_times(grid.dt, grid.nt, oversample);
    double num = 0.0, den = 0.0;
    for (const auto& x : points) {
        std::vector<double> c(f.t.size()), r(f.t.size());
        double n1 = 0.0, d1 = 0.0;
        for (std::size_t k = 0; k < f.t.size(); ++k) {
            c[k] = computed(f.t[k], x);
            r[k] = reference(f.t[k], x);
            n1 += (c[k] - r[k]) * (c[k] - r[k]);
            d1 += r[k] * r[k];
        }
        f.point_error.push_back(d1 > 0.0 ? std::sqrt(n1 / d1) : (n1 > 0.0 ? INFINITY : 0.0));
        num += n1;
        den += d1;
        f.computed.push_back(std::move(c));
        f.reference.push_back(std::move(r));
    }
    f.error = den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? INFINITY : 0.0);
    return f;
}

DirichletSolution solve_dirichlet(const ExperimentConfig& cfg, const Level& level) {
    check_source(cfg, level.mesh);
    const KernelParams kp{cfg.alpha_inf, 1.0};
    const SpaceTimeBasis b = make_basis(level.mesh, level.grid, 0, 0);
    DirichletSolution s;
    auto t0 = Clock::now();
    s.V = cached(cfg, level_key(cfg, level, "V_dt"),
                 [&] { return assemble_V_blocks(level.mesh, level.grid, b, b, kp, {}, 1); });
    const auto f = manufactured_dirichlet_data(cfg);
    const Eigen::MatrixXd rhs =
        assemble_rhs_dirichlet([&f](double t, const Vec3& x) { return 2.0 * f(t, x); }, level.mesh, level.grid, b,
                               cfg.sigma);
    s.assembly_s = seconds_since(t0);
    t0 = Clock::now();
    try {
        s.mot = mot_solve({s.V, rhs});
    } catch (const SolverError& e) {
        throw HarnessError("level " + std::to_string(level.level) + ": " + e.what());
    }
    s.solve_s = seconds_since(t0);
    s.phi = Density(b, level.grid.dt);
    s.phi.coeffs = s.mot.x;
    return s;
}

AcousticSolution solve_acoustic(const ExperimentConfig& cfg, const Level& level) {
    check_source(cfg, level.mesh);
    if (!level.mesh.elevated()) throw HarnessError("acoustic problem needs an elevated mesh");
    if (!(cfg.alpha > 0.0)) throw HarnessError("acoustic problem needs alpha > 0");
    const KernelParams kp{cfg.alpha_inf, 1.0};
    const MaterialField mat = MaterialField::constant(level.mesh, cfg.alpha);
    AcousticSolution s;
    auto t0 = Clock::now();
    AcousticBlocks ab;
    ToeplitzBlocks A;
    if (cfg.cache_dir.empty()) {
        ab = assemble_acoustic_blocks(level.mesh, level.grid, kp, mat);
        A = ab.monolithic();
    } else {
        // the bases are cheap; only the blocks are cached
        bool built = false;
        A = cached(cfg, level_key(cfg, level, "acoustic"), [&] {
            ab = assemble_acoustic_blocks(level.mesh, level.grid, kp, mat);
            built = true;
            return ab.monolithic();
        });
        if (!built) {
            ab.phi_basis = make_basis(level.mesh, level.grid, 1, 1);
            ab.p_basis = make_basis(level.mesh, level.grid, 0, 0);
            ab.test1_basis = make_basis(level.mesh, level.grid, 1, 0);
            ab.test2_basis = make_basis(level.mesh, level.grid, 0, 0);
        }
    }
    const PointSourceField src = manufactured_source(cfg);
    const double a = cfg.alpha;
    std::vector<Vec3> normals(level.mesh.num_triangles());
    for (std::size_t i = 0; i < normals.size(); ++i) normals[i] = level.mesh.panel(i).normal;
    const BoundaryFunction F = [&](double t, const Vec3& x, int panel) {
        return src.dn(t, x, normals[panel]) - a * src.dt(t, x);
    };
    const BoundaryFunction G = [&](double t, const Vec3& x, int panel) { return -F(t, x, panel); };
    const auto [r1, r2] = assemble_rhs_acoustic(F, G, level.mesh, level.grid, ab, mat, cfg.sigma);
    Eigen::MatrixXd rhs(r1.rows(), r1.cols() + r2.cols());
    rhs << r1, r2;
    s.assembly_s = seconds_since(t0);
    t0 = Clock::now();
    try {
        s.mot = mot_solve({A, rhs});
    } catch (const SolverError& e) {
        throw HarnessError("level " + std::to_string(level.level) + ": " + e.what());
    }
    s.solve_s = seconds_since(t0);
    const int n1 = ab.phi_basis.n_space();
    s.phi = Density(ab.phi_basis, level.grid.dt);
    s.p = Density(ab.p_basis, level.grid.dt);
    s.phi.coeffs = s.mot.x.leftCols(n1);
    s.p.coeffs = s.mot.x.rightCols(s.mot.x.cols() - n1);
    return s;
}

ExperimentResult run_dirichlet_convergence(const ExperimentConfig& cfg) {
    const auto levels = make_levels(cfg);
    const KernelParams kp{cfg.alpha_inf, 1.0};
    const PointSourceField src = manufactured_source(cfg);
    const auto reference = [&src](double t, const Vec3& x) { return src.value(t, x); };
    ExperimentResult r;
    Table t;
    t.name = "dirichlet_convergence";
    t.columns = {"level", "panels", "h", "dt", "nt", "field_error_max", "surrogate_error", "cauchy_energy",
                 "condition", "residual", "energy_growth", "assembly_s", "solve_s", "field_s"};
    for (std::size_t i = 0; i < cfg.observers.size(); ++i) t.columns.push_back("field_error_" + std::to_string(i));
    std::vector<DirichletSolution> sols;
    std::vector<std::vector<double>> rows;
    for (const auto& l : levels) {
        sols.push_back(solve_dirichlet(cfg, l));
        const auto& s = sols.back();
        auto t0 = Clock::now();
        const auto field = [&](double tt, const Vec3& x) { return eval_single_layer(s.phi, l.mesh, x, tt, kp); };
        const FieldComparison obs = compare_field(field, reference, cfg.observers, l.grid, cfg.oversample);
        const FieldComparison sur =
            compare_field(field, reference, surrogate_points(cfg, l.mesh), l.grid, std::max(1, cfg.oversample / 2));
        add_signals(r, obs, l.level);
        double emax = 0.0;
        for (double e : obs.point_error) emax = std::max(emax, e);
        std::vector<double> row = {double(l.level), double(l.mesh.num_triangles()), l.mesh.h(), l.grid.dt,
                                   double(l.grid.nt), emax, sur.error, kNaN, s.mot.condition, s.mot.residual,
                                   s.mot.energy_growth ? 1.0 : 0.0, s.assembly_s, s.solve_s, seconds_since(t0)};
        row.insert(row.end(), obs.point_error.begin(), obs.point_error.end());
        rows.push_back(std::move(row));
        r.manifest.timings["level" + std::to_string(l.level)] = s.assembly_s + s.solve_s + seconds_since(t0);
    }
    // Cauchy differences in the energy surrogate, measured on the finer level
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const auto& fine = levels[k + 1];
        const Density up = prolongate(sols[k].phi, levels[k].mesh, fine.mesh, sols[k + 1].phi.basis, fine.grid.dt);
        Density diff = up;
        diff.coeffs -= sols[k + 1].phi.coeffs;
        const double e = std::sqrt(std::max(0.0, energy_form(sols[k + 1].V, diff.coeffs)));
        const double n = std::sqrt(std::max(0.0, energy_form(sols[k + 1].V, sols[k + 1].phi.coeffs)));
        rows[k][7] = n > 0.0 ? e / n : 0.0;
    }
    for (auto& row : rows) t.add_row(row);
    std::vector<double> hs = t.column("h");
    r.manifest.metrics["field_rate"] = fitted_rate(t.column("field_error_max"), hs);
    r.manifest.metrics["surrogate_rate"] = fitted_rate(t.column("surrogate_error"), hs);
    if (levels.size() >= 3)
        r.manifest.metrics["cauchy_rate"] = two_point_rate(rows[0][7], rows[1][7], hs[0], hs[1]);
    r.manifest.config = cfg.to_map();
    r.tables.insert(r.tables.begin(), std::move(t));
    return r;
}

ExperimentResult run_acoustic_convergence(const ExperimentConfig& cfg) {
    const auto levels = make_levels(cfg);
    const KernelParams kp{cfg.alpha_inf, 1.0};
    const PointSourceField src = manufactured_source(cfg);
    AcousticExact exact;
    exact.phi = [&src](double t, const Vec3& x) { return -src.value(t, x); };
    exact.dt_phi = [&src](double t, const Vec3& x) { return -src.dt(t, x); };
    ExperimentResult r;
    Table t;
    t.name = "acoustic_convergence";
    t.columns = {"level", "panels", "h", "dt", "nt", "error_star", "error_p", "error_phi_half", "error_dt_phi",
                 "cauchy_star", "field_error_max", "condition", "residual", "energy_growth", "assembly_s", "solve_s"};
    std::vector<AcousticSolution> sols;
    std::vector<std::vector<double>> rows;
    for (const auto& l : levels) {
        sols.push_back(solve_acoustic(cfg, l));
        const auto& s = sols.back();
        std::vector<Vec3> normals(l.mesh.num_triangles());
        for (std::size_t i = 0; i < normals.size(); ++i) normals[i] = l.mesh.panel(i).normal;
        exact.p = [&src, normals](double tt, const Vec3& x, int panel) { return -src.dn(tt, x, normals[panel]); };
        const Eigen::MatrixXd Y = assemble_yukawa(l.mesh, SpaceBasis(l.mesh, 0), 1.0);
        const AcousticNorm e = acoustic_error(s.phi, s.p, exact, l.mesh, cfg.sigma, Y);
        const AcousticNorm n = acoustic_error(s.phi, s.p, {
            [](double, const Vec3&) { return 0.0; }, [](double, const Vec3&) { return 0.0; },
            [](double, const Vec3&, int) { return 0.0; }}, l.mesh, cfg.sigma, Y);
        const double scale = n.total() > 0.0 ? n.total() : 1.0;
        const auto field = [&](double tt, const Vec3& x) {
            return eval_single_layer(s.p, l.mesh, x, tt, kp) - eval_double_layer(s.phi, l.mesh, x, tt, kp);
        };
        const FieldComparison obs = compare_field(
            field, [&src](double tt, const Vec3& x) { return src.value(tt, x); }, cfg.observers, l.grid, cfg.oversample);
        add_signals(r, obs, l.level);
        double emax = 0.0;
        for (double v : obs.point_error) emax = std::max(emax, v);
        rows.push_back({double(l.level), double(l.mesh.num_triangles()), l.mesh.h(), l.grid.dt, double(l.grid.nt),
                        e.total() / scale, e.p / scale, e.phi_half / scale, e.dt_phi / scale, kNaN, emax,
                        s.mot.condition, s.mot.residual, s.mot.energy_growth ? 1.0 : 0.0, s.assembly_s, s.solve_s});
        r.manifest.timings["level" + std::to_string(l.level)] = s.assembly_s + s.solve_s;
    }
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const auto& fine = levels[k + 1];
        Density dphi = prolongate(sols[k].phi, levels[k].mesh, fine.mesh, sols[k + 1].phi.basis, fine.grid.dt);
        Density dp = prolongate(sols[k].p, levels[k].mesh, fine.mesh, sols[k + 1].p.basis, fine.grid.dt);
        dphi.coeffs -= sols[k + 1].phi.coeffs;
        dp.coeffs -= sols[k + 1].p.coeffs;
        const Eigen::MatrixXd G = half_norm_gram(fine.mesh, sols[k + 1].phi.basis.space, 1.0);
        const double d = energy_norm_acoustic(dphi, dp, fine.mesh, cfg.sigma, G).total();
        const double n = energy_norm_acoustic(sols[k + 1].phi, sols[k + 1].p, fine.mesh, cfg.sigma, G).total();
        rows[k][9] = n > 0.0 ? d / n : 0.0;
    }
    for (auto& row : rows) t.add_row(row);
    const std::vector<double> hs = t.column("h");
    r.manifest.metrics["error_rate"] = fitted_rate(t.column("error_star"), hs);
    r.manifest.metrics["field_rate"] = fitted_rate(t.column("field_error_max"), hs);
    if (levels.size() >= 3)
        r.manifest.metrics["cauchy_rate"] = two_point_rate(rows[0][9], rows[1][9], hs[0], hs[1]);
    r.manifest.config = cfg.to_map();
    r.tables.insert(r.tables.begin(), std::move(t));
    return r;
}

ExperimentResult run_solve(const ExperimentConfig& cfg) {
    const auto levels = make_levels(cfg);
    const Level& l = levels.back();
    const KernelParams kp{cfg.alpha_inf, 1.0};
    const PointSourceField src = manufactured_source(cfg);
    const auto reference = [&src](double t, const Vec3& x) { return src.value(t, x); };
    ExperimentResult r;
    Table t;
    t.name = "solve";
    t.columns = {"level", "panels", "h", "dt", "nt", "field_error_max", "condition", "residual", "energy_growth",
                 "assembly_s", "solve_s"};
    FieldComparison obs;
    std::vector<double> row;
    if (cfg.problem == Problem::Dirichlet) {
        const DirichletSolution s = solve_dirichlet(cfg, l);
        obs = compare_field([&](double tt, const Vec3& x) { return eval_single_layer(s.phi, l.mesh, x, tt, kp); },
                            reference, cfg.observers, l.grid, cfg.oversample);
        row = {s.mot.condition, s.mot.residual, s.mot.energy_growth ? 1.0 : 0.0, s.assembly_s, s.solve_s};
    } else {
        const AcousticSolution s = solve_acoustic(cfg, l);
        obs = compare_field(
            [&](double tt, const Vec3& x) {
                return eval_single_layer(s.p, l.mesh, x, tt, kp) - eval_double_layer(s.phi, l.mesh, x, tt, kp);
            },
            reference, cfg.observers, l.grid, cfg.oversample);
        row = {s.mot.condition, s.mot.residual, s.mot.energy_growth ? 1.0 : 0.0, s.assembly_s, s.solve_s};
    }
    double emax = 0.0;
    for (double v : obs.point_error) emax = std::max(emax, v);
    row.insert(row.begin(), {double(l.level), double(l.mesh.num_triangles()), l.mesh.h(), l.grid.dt,
                             double(l.grid.nt), emax});
    t.add_row(row);
    add_signals(r, obs, l.level);
    r.manifest.config = cfg.to_map();
    r.tables.insert(r.tables.begin(), std::move(t));
    return r;
}

ExperimentResult run_diagnose(const ExperimentConfig& cfg, cplx omega, int trials) {
    const auto levels = make_levels(cfg);
    const SurfaceMesh& mesh = levels.front().mesh;
    const KernelParams kp{cfg.alpha_inf, std::max(cfg.sigma, 1e-12)};
    const MaterialField mat = MaterialField::constant(mesh, cfg.alpha);
    ExperimentResult r;
    const auto t0 = Clock::now();
    const CoercivityReport c = coercivity_check(mesh, omega, kp, mat, trials);
    const ContinuityReport k = continuity_check(mesh, omega, kp, mat, trials);
    Table t;
    t.name = "diagnose";
    t.columns = {"omega_re", "omega_im", "hypotheses_hold", "min_re_form", "min_re_single_layer", "max_continuity_ratio",
                 "trials"};
    t.add_row({omega.real(), omega.imag(), c.hypotheses_hold ? 1.0 : 0.0, c.min_form, c.min_single_layer, k.max_ratio,
               double(trials)});
    r.manifest.timings["diagnose"] = seconds_since(t0);
    r.manifest.config = cfg.to_map();
    r.tables.push_back(std::move(t));
    return r;
}

}  // namespace tdbem
