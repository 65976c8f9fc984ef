// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any fails.
// Optional arguments select criteria by name.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle_systems.hpp"
#include "oracles.hpp"
#include "tdbem/analysis.hpp"
#include "tdbem/harness.hpp"

using namespace tdbem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    std::function<Outcome()> run;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string data(const std::string& name) { return std::string(TDBEM_DATA_DIR) + "/" + name; }

ExperimentConfig study_config(const std::string& name) {
    ExperimentConfig c = load_config(std::string(TDBEM_DATA_DIR) + "/../configs/" + name);
    c.mesh = data("octahedron.mesh");
    c.threads = 1;
    return c;
}

template <class... T>
std::string str(const T&... v) {
    std::ostringstream s;
    s.precision(4);
    (s << ... << v);
    return s.str();
}

Vec3 elevated_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> h(-2.0, 2.0), z(0.1, 2.0);
    return {h(rng), h(rng), z(rng)};
}

Outcome kernel_oracle() {
    const auto t0 = Clock::now();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(0.5, 2.0), al(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Vec3 x = elevated_point(rng), y = elevated_point(rng);
        const cplx w(re(rng), im(rng));
        const double a = al(rng);
        const cplx v = eval_G_omega(PointPair::make(x, y), w, KernelParams{a, 1.0});
        const cplx ref = oracle::half_space_green(x, y, w, a);
        worst = std::max(worst, std::abs(v - ref) / std::abs(ref));
    }
    const double s = since(t0);
    return {worst <= 1e-8 && s < 10.0, str("max relative error ", worst, ", ", s, " s")};
}

Outcome sigma_closed_form() {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> lag(1e-3, 20.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto pp = PointPair::make(elevated_point(rng), elevated_point(rng));
        const double tau = pp.r_minus + lag(rng);
        const double ref = 1.0 / (2.0 * std::numbers::pi * std::pow(tau + pp.z_plus, 2));
        worst = std::max(worst, std::abs(eval_sigma_smooth(tau, pp, 1.0) - ref) / ref);
    }
    return {worst <= 1e-10, str("max relative error ", worst)};
}

double transform_error(const SurfaceMesh& m, double dt, int q, const std::vector<cplx>& omegas) {
    // e^{-Im w T} < 1e-5 keeps the lag truncation below the tolerance
    const TimeGrid g{dt, static_cast<int>(std::lround(12.0 / dt))};
    const KernelParams kp{0.3, 1.0};
    const SpaceTimeBasis b = make_basis(m, g, 0, q);
    AssemblyOptions o;
    o.lag_min = -q;  // overlapping hats couple to the next step
    const ToeplitzBlocks V = assemble_V_blocks(m, g, b, b, kp, o, 0);
    return transform_consistency(V, time_correlation(q, q, dt, 0), omegas,
                                 [&](cplx w) { return assemble_V_omega(m, b.space, b.space, w, kp); });
}

Outcome transform() {
    const auto t0 = Clock::now();
    const std::vector<cplx> omegas = {cplx(1.3, 1.0), cplx(0.6, 0.9), cplx(2.0, 1.2)};
    const SurfaceMesh m = load_mesh(data("octahedron.mesh"));
    const SurfaceMesh f = refine_uniform(m);
    bool pass = true;
    std::string detail;
    for (int q : {0, 1}) {
        const double coarse = transform_error(m, 0.1, q, omegas), fine = transform_error(f, 0.05, q, omegas);
        pass = pass && coarse <= 1e-3 && fine < coarse;
        detail += str(q == 0 ? "box" : "hat", ": 8 panels ", coarse, ", 32 panels ", fine, "; ");
    }
    const double s = since(t0);
    return {pass && s < 120.0, detail + str(s, " s")};
}

Outcome coercivity() {
    const SurfaceMesh m = load_mesh(data("octahedron.mesh"));
    const MaterialField good = MaterialField::constant(m, 1.0), bad = MaterialField::constant(m, -1.0);
    const std::vector<cplx> omegas = {cplx(0.8, 1.0), cplx(2.5, 1.5)};
    bool pass = true;
    std::string detail;
    for (double a : {0.0, 0.3}) {
        const KernelParams kp{a, 1.0};
        for (const cplx& w : omegas) {
            const auto r = coercivity_check(m, w, kp, good, 100);
            pass = pass && r.hypotheses_hold && r.min_form > 0.0 && r.min_single_layer > 0.0;
            detail += str("a_inf=", a, " w=", w, ": form ", r.min_form, " V ", r.min_single_layer, "; ");
        }
        const auto t = time_coercivity_check(m, TimeGrid{0.25, 16, 1.0}, kp, good, 100);
        pass = pass && t.min_form > 0.0;
        detail += str("time ", t.min_form, "; ");
    }
    const auto r = coercivity_check(m, omegas.front(), KernelParams{0.3, 1.0}, bad, 100);
    pass = pass && !r.hypotheses_hold && r.min_form < 0.0;
    detail += str("alpha=-1: form ", r.min_form);
    return {pass, detail};
}

Outcome solver_equivalence() {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> size(1, 8), steps(1, 32);
    double worst = 0.0, lin = 0.0;
    bool causal = true;
    for (int k = 0; k < 20; ++k) {
        const int n = size(rng), nt = steps(rng);
        std::uniform_int_distribution<int> lags(1, nt);
        const MOTSystem s = test::random_system(rng, n, nt, lags(rng));
        const Eigen::MatrixXd x = mot_solve(s).x;
        const Eigen::MatrixXd d = dense_solve(s).x;
        worst = std::max(worst, (x - d).norm() / d.norm());

        // a change of the data from step m on leaves the earlier steps bit-identical
        const int m0 = nt / 2;
        MOTSystem p = s;
        p.rhs.bottomRows(nt - m0).setRandom();
        const Eigen::MatrixXd xp = mot_solve(p).x;
        causal = causal && (xp.topRows(m0).array() == x.topRows(m0).array()).all();
        MOTSystem z = s;
        z.rhs.topRows(m0).setZero();
        causal = causal && (mot_solve(z).x.topRows(m0).array() == 0.0).all();

        MOTSystem c = s;
        c.rhs = 2.0 * s.rhs - 3.0 * p.rhs;
        const Eigen::MatrixXd xc = mot_solve(c).x, ref = 2.0 * x - 3.0 * xp;
        lin = std::max(lin, (xc - ref).norm() / ref.norm());
    }
    return {worst <= 1e-10 && causal && lin <= 1e-10,
            str("mot vs dense ", worst, ", linearity ", lin, ", causality ", causal ? "exact" : "broken")};
}

Outcome field_reproduction() {
    const auto t0 = Clock::now();
    ExperimentConfig c = study_config("dirichlet.cfg");
    c.levels = 2;
    c.alpha_inf = 0.3;
    const ExperimentResult r = run_dirichlet_convergence(c);
    const Table& t = r.tables.front();
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < c.observers.size(); ++i) {
        const auto e = t.column("field_error_" + std::to_string(i));
        pass = pass && e[0] <= 0.1 && e[1] < e[0];
        detail += str("observer ", i, ": ", e[0], " -> ", e[1], "; ");
    }
    const double s = since(t0);
    pass = pass && s < 900.0;
    return {pass, detail + str(s, " s")};
}

bool monotone(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

Outcome convergence() {
    ExperimentConfig d = study_config("dirichlet.cfg");
    d.levels = 3;
    d.dt_factor = 0.5;
    const ExperimentResult rd = run_dirichlet_convergence(d);
    const auto se = rd.tables.front().column("surrogate_error");
    const double sd = rd.manifest.metrics.at("surrogate_rate");

    ExperimentConfig a = study_config("acoustic.cfg");
    a.levels = 3;
    a.dt_factor = 0.5;
    const ExperimentResult ra = run_acoustic_convergence(a);
    auto cs = ra.tables.front().column("cauchy_star");
    cs.pop_back();  // the finest level has no successor
    const double sa = ra.manifest.metrics.at("cauchy_rate");

    const bool pass = monotone(se) && sd > 0.5 && monotone(cs) && sa > 0.5;
    return {pass, str("Dirichlet surrogate ", se[0], ", ", se[1], ", ", se[2], " slope ", sd, "; acoustic Cauchy ",
                      cs[0], ", ", cs[1], " slope ", sa)};
}

Outcome projection() {
    std::vector<double> et, es, ht, hs;
    SurfaceMesh m = load_mesh(data("octahedron.mesh"));
    const auto f = [](const Vec3& x) { return std::sin(2.0 * x.x()) * std::cos(x.y()) + x.z() * x.z(); };
    const auto g = [](double t) { return std::sin(1.3 * t) + 0.1 * t * t; };
    for (int l = 0; l < 4; ++l) {
        const TimeGrid grid{0.4 / (1 << l), 10 << l};
        et.push_back(time_l2_error(g, grid, 0, project_time(g, grid, 0)));
        ht.push_back(grid.dt);
        const SpaceBasis b(m, 0);
        es.push_back(space_l2_error(f, m, b, project_space(f, m, b)));
        hs.push_back(m.h());
        if (l < 3) m = refine_uniform(m);
    }
    const double st = estimate_rate(et, ht), ss = estimate_rate(es, hs);
    return {std::abs(st - 1.0) <= 0.1 && std::abs(ss - 1.0) <= 0.1, str("time slope ", st, ", space slope ", ss)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {"kernel_oracle", kernel_oracle},
        {"sigma_closed_form", sigma_closed_form},
        {"transform_consistency", transform},
        {"coercivity", coercivity},
        {"solver_equivalence", solver_equivalence},
        {"field_reproduction", field_reproduction},
        {"convergence_rates", convergence},
        {"projection_rates", projection},
    };
    int failed = 0, ran = 0;
    for (const auto& c : all) {
        bool selected = argc < 2;
        for (int i = 1; i < argc; ++i) selected = selected || c.name == argv[i];
        if (!selected) continue;
        ++ran;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
    }
    if (ran == 0) {
        std::cerr << "no criterion matches the arguments\n";
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
