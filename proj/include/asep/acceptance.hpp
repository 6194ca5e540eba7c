#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "block_stats.hpp"
#include "ctmc.hpp"
#include "ensemble.hpp"
#include "qcalc/identities.hpp"
#include "qcalc/pjw.hpp"
#include "qcalc/plz.hpp"
#include "sim.hpp"
#include "tw.hpp"

namespace asep::acceptance {

struct Check {
    std::string what;
    double measured;
    std::string expected;
    bool ok;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;
    double time_limit = 0.0; // 0: none
    std::string error;

    bool passed() const {
        if (!error.empty()) return false;
        if (time_limit > 0.0 && seconds > time_limit) return false;
        for (const auto& c : checks)
            if (!c.ok) return false;
        return !checks.empty();
    }

    // Worst check, for the one-line summary.
    std::string summary() const {
        if (!error.empty()) return "error: " + error;
        const Check* worst = nullptr;
        for (const auto& c : checks)
            if (!c.ok && !worst) worst = &c;
        if (!worst && !checks.empty()) worst = &checks.back();
        char buf[512];
        std::snprintf(buf, sizeof buf, "%zu checks, %s: measured %.6g, expected %s; %.1fs", checks.size(),
                      worst ? worst->what.c_str() : "-", worst ? worst->measured : 0.0,
                      worst ? worst->expected.c_str() : "-", seconds);
        return buf;
    }
};

struct Options {
    std::uint64_t seed = 20240611;
    unsigned workers = default_workers();
    double mc_scale = 1.0; // multiplies every Monte Carlo trajectory count
};

namespace detail {

inline std::string fmt(const char* f, double a) {
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

inline Check below(std::string what, double v, double tol) {
    return {std::move(what), v, fmt("< %.3g", tol), std::abs(v) < tol};
}

inline Check within(std::string what, double v, double target, double tol) {
    char b[128];
    std::snprintf(b, sizeof b, "%.6g +- %.3g", target, tol);
    return {std::move(what), v, b, std::abs(v - target) <= tol};
}

inline std::size_t scaled(double n, const Options& o) {
    return static_cast<std::size_t>(std::max(1000.0, std::round(n * o.mc_scale)));
}

inline std::string label(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

} // namespace detail

inline CriterionResult criterion1() {
    CriterionResult r{1, "mu-integral identity"};
    r.time_limit = 5.0;
    for (int L = 1; L <= 5; ++L)
        for (double tau : {0.2, 0.5, 0.8})
            r.checks.push_back(detail::below(detail::label("L=%g tau=%g |lhs-rhs|", L, tau),
                                             std::abs(qcalc::mint_lhs(L, tau) - qcalc::mint_rhs(L, tau)), 1e-10));
    return r;
}

inline CriterionResult criterion2() {
    CriterionResult r{2, "nested-residue integrals F0, F and the induction claim"};
    r.time_limit = 30.0;
    const std::vector<cplx> xis{-1.0, -0.5};
    for (int L = 1; L <= 4; ++L)
        for (double tau : {0.2, 0.4, 0.7}) {
            auto v = qcalc::f_integrals(L, tau, xis, qcalc::ResidueTree::rational(L, tau));
            r.checks.push_back(detail::below(detail::label("f0 L=%g tau=%g", L, tau), std::abs(v[0]), 1e-10));
            for (std::size_t k = 0; k < xis.size(); ++k) {
                const cplx ref = qcalc::result_closed_form(L, tau, xis[k]);
                r.checks.push_back(detail::below(detail::label("f rel err L=%g tau=%g xi=%g", L, tau, xis[k].real()),
                                                 std::abs(v[k + 1] / ref - 1.0), 1e-9));
            }
        }
    for (double tau : {0.2, 0.4, 0.7})
        for (cplx xi : xis) {
            const cplx base = qcalc::claim_step_value(3, 0, tau, xi);
            double worst = 0.0;
            for (int k = 1; k <= 3; ++k)
                worst = std::max(worst, std::abs(qcalc::claim_step_value(3, k, tau, xi) / base - 1.0));
            r.checks.push_back(
                detail::below(detail::label("claim L=3 tau=%g xi=%g max rel stage spread", tau, xi.real()), worst, 1e-9));
        }
    return r;
}

inline CriterionResult criterion3() {
    CriterionResult r{3, "G_L integral: pole order at w1=1 and growth"};
    r.time_limit = 30.0;
    const double tau = 0.4;
    for (int L : {2, 3}) {
        auto probe_max = [&](double rho) {
            double mx = 0.0;
            for (int k = 0; k < 8; ++k) {
                const cplx w1 = 1.0 + std::polar(rho, 2 * std::numbers::pi * (k + 0.5) / 8);
                mx = std::max(mx, std::abs(std::pow(w1 - 1.0, L - 1) * qcalc::gl_pole_probe(L, tau, w1)));
            }
            return mx;
        };
        const double a = probe_max(1e-2), b = probe_max(1e-3);
        r.checks.push_back({detail::label("L=%g relative variation rho=1e-2 vs 1e-3", L), std::abs(a - b) / std::max(a, b),
                            "<= 0.05", std::abs(a - b) <= 0.05 * std::max(a, b)});
        const double g3 = std::abs(qcalc::gl_pole_probe(L, tau, 1e3)), g4 = std::abs(qcalc::gl_pole_probe(L, tau, 1e4));
        r.checks.push_back({detail::label("L=%g |probe(1e3)|", L), g3, "< 10", g3 < 10.0});
        r.checks.push_back({detail::label("L=%g |probe(1e4)|/|probe(1e3)|", L), g4 / g3, "<= 1.05", g4 <= 1.05 * g3});
    }
    return r;
}

// Step data on Z+ with the packed tail replaced by a wall at N.
inline CtmcOracle z_plus_oracle(const ModelParams& model, double t) { return CtmcOracle::step(-10, 7, 7, model, t); }

inline CriterionResult criterion4() {
    CriterionResult r{4, "PLZ = PJw = CTMC oracle"};
    r.time_limit = 600.0;
    const auto model = ModelParams::from_p(0.3);
    const double t = 0.5;
    const auto oracle = z_plus_oracle(model, t);
    struct Case {
        int m, L;
        long x;
    };
    const Case cases[] = {{1, 1, -1}, {1, 1, 0}, {1, 1, 1}, {1, 2, 0}, {1, 2, 1}, {2, 1, 1}};
    for (auto c : cases) {
        const double o = oracle.prob_block(c.x, c.m, c.L);
        const double a = qcalc::plz_probability(c.x, c.m, t, c.L, model);
        const double b = qcalc::pjw_probability(c.x, c.m, t, c.L, model);
        const double spread = std::max({std::abs(a - o), std::abs(b - o), std::abs(a - b)});
        r.checks.push_back(detail::below(detail::label("m=%g L=%g x=%g max pairwise diff", c.m, c.L, c.x), spread, 1e-6));
    }
    return r;
}

inline CriterionResult criterion5() {
    CriterionResult r{5, "F2 evaluation routes"};
    r.time_limit = 120.0;
    for (int s = -5; s <= 2; ++s) {
        const double f = f2(s);
        r.checks.push_back(detail::below(detail::label("s=%g |f2 - det J0|", s), std::abs(det_J0_contour(s, 0.4) - f), 1e-6));
        r.checks.push_back(detail::below(detail::label("s=%g |f2 - painleve|", s), std::abs(painleve_f2(s) - f), 1e-6));
    }
    for (double s : {-2.0, 0.0, 1.0})
        r.checks.push_back(detail::below(detail::label("s=%g |trace - F2'/F2|", s),
                                         trace_f2_ratio(s, 0.4) - f2_prime(s) / f2(s), 1e-6));
    // f2_prime is defined on [-7.5, 5.5]; the two end pieces come from f2 itself.
    double integral = f2(-7.5) - f2(-8.0) + f2(6.0) - f2(5.5);
    const double edges[] = {-7.5, -4.0, -1.0, 2.0, 5.5};
    for (int k = 0; k < 4; ++k) {
        auto gl = gauss_legendre(30, edges[k], edges[k + 1]);
        for (int i = 0; i < 30; ++i) integral += gl.weights[i] * f2_prime(gl.nodes[i]);
    }
    r.checks.push_back(detail::within("integral of F2' over [-8,6]", integral, 1.0, 1e-6));
    return r;
}

inline CriterionResult criterion6(const Options& o) {
    CriterionResult r{6, "simulator vs CTMC oracle"};
    r.time_limit = 300.0;
    const auto model = ModelParams::from_p(0.3);
    const double t = 1.0;
    // Four particles on Z against a reflecting window [-6, 8]; the wall leak
    // bound (~2e-5) is far below the Monte Carlo resolution.
    const CtmcOracle oracle(-6, 8, {1, 2, 3, 4}, model, t);
    const double leak_tol = 1e-4;
    SimSpec spec;
    spec.model = model;
    spec.t_end = t;
    spec.n_particles = 4;
    spec.seed = o.seed ^ 0x6c62272e07bb0142ULL;
    const std::size_t n = detail::scaled(1e6, o);
    auto tbl = parallel_reduce<CounterTable>(
        n, o.workers, [] { return CounterTable(1, 3, 2); },
        [&](std::size_t k, CounterTable& acc) { acc.add(sample_trajectory(spec, k)); },
        [](CounterTable& a, const CounterTable& b) { a.merge(b); });
    for (long x : {0L, 1L}) {
        const auto row = tbl.at(x);
        auto add = [&](const char* name, int k, std::uint64_t count, double exact) {
            const double est = static_cast<double>(count) / n;
            const double se = std::sqrt(exact * (1 - exact) / n);
            r.checks.push_back({detail::label(name, x, k), (est - exact) / se, "|z| <= 3", std::abs(est - exact) <= 3 * se});
        };
        for (int L = 1; L <= 3; ++L) add("x=%g L=%g block z-score", L, row.n_block[L], oracle.prob_block(x, 1, L, leak_tol));
        for (int G = 1; G <= 2; ++G) add("x=%g G=%g gap z-score", G, row.n_gap[G], oracle.prob_gap(x, 1, G, leak_tol));
    }
    return r;
}

// Shared ensembles for criteria 7-9.
struct KpzData {
    KpzEnsemble big;   // t = 512
    KpzEnsemble small; // t = 125
};

inline KpzData kpz_data(const Options& o) {
    const auto model = ModelParams::from_p(0.3);
    const std::size_t n = detail::scaled(2e5, o);
    return {run_kpz_ensemble(model, 0.25, 512.0, n, o.seed, 3, 2, o.workers),
            run_kpz_ensemble(model, 0.25, 125.0, n, o.seed + 1, 3, 2, o.workers)};
}

inline CriterionResult criterion7(const KpzData& d) {
    CriterionResult r{7, "KPZ law of x_m vs F2"};
    r.checks.push_back({"KS distance, sigma=0.25 t=512", ks_distance_f2(d.big.table, d.big.t), "<= 0.05",
                        ks_distance_f2(d.big.table, d.big.t) <= 0.05});
    return r;
}

inline CriterionResult criterion8(const KpzData& d) {
    CriterionResult r{8, "conditional block and gap limits"};
    const auto& e = d.big;
    const auto est = conditional_estimates(e.table, e.t, s_bin_edges(), 1.0);
    for (int L : {2, 3})
        r.checks.push_back(detail::within(detail::label("pooled |s|<=1 L=%g block frequency", L), est.pooled.block[L].value,
                                          block_limit(0.25, L), 0.05));
    for (int G : {1, 2})
        r.checks.push_back(detail::within(detail::label("pooled |s|<=1 G=%g gap frequency", G), est.pooled.gap[G].value,
                                          gap_limit(0.25, G), 0.05));
    std::uint64_t violations = 0;
    for (const auto& [x, row] : e.table.rows())
        if (row.n_gap[1] + row.n_block[2] != row.n_at) ++violations;
    r.checks.push_back({"rows violating n_gap[1] + n_block[2] = n_at", static_cast<double>(violations), "0", violations == 0});
    return r;
}

// t^{1/3} P(x_m = x) at the site nearest s = 0, relative to c2^{-1} F2'(s_x).
inline double density_relative_deviation(const KpzEnsemble& e, double* scaled_est = nullptr, double* pred = nullptr) {
    const auto sc0 = make_scaling(e.sigma, 0.0);
    const auto x = kpz_position(sc0, e.t);
    const double sx = s_of_position(x, static_cast<long>(e.m), e.t);
    const double p_hat = static_cast<double>(e.table.at(x).n_at) / e.table.n_total();
    const double est = std::cbrt(e.t) * p_hat;
    const double prediction = f2_prime(sx) / make_scaling(e.sigma).c2;
    if (scaled_est) *scaled_est = est;
    if (pred) *pred = prediction;
    return est / prediction - 1.0;
}

inline CriterionResult criterion9(const KpzData& d) {
    CriterionResult r{9, "density magnitude at s=0"};
    double est = 0, pred = 0;
    const double dev512 = density_relative_deviation(d.big, &est, &pred);
    const double dev125 = density_relative_deviation(d.small);
    r.checks.push_back(detail::within("t^{1/3} P(x_m = x), t=512", est, pred, 0.2 * pred));
    r.checks.push_back({"|rel dev| t=512 minus |rel dev| t=125", std::abs(dev512) - std::abs(dev125), "< 0",
                        std::abs(dev512) < std::abs(dev125)});
    return r;
}

inline CriterionResult criterion10(const Options& o) {
    CriterionResult r{10, "particle-hole duality and scaling algebra"};
    const auto model = ModelParams::from_p(0.3);
    const std::vector<DualQuery> qs{{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {-1, 1, 2}, {1, 3, 1}};
    const std::size_t n = detail::scaled(1e6, o);
    const auto acc = run_duality(model, 1.0, qs, n, o.seed ^ 0x94d049bb133111ebULL, o.workers);
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const auto& q = qs[i];
        const double qx = static_cast<double>(q.x), qm = static_cast<double>(q.m), qg = static_cast<double>(q.G);
        r.checks.push_back({detail::label("x=%g m=%g G=%g per-trajectory mismatches", qx, qm, qg),
                            static_cast<double>(acc.mismatch[i]), "0", acc.mismatch[i] == 0});
        const double a = static_cast<double>(acc.gap[i]) / n, b = static_cast<double>(acc.independent[i]) / n;
        const double se = std::sqrt((a * (1 - a) + b * (1 - b)) / n);
        r.checks.push_back({detail::label("x=%g m=%g G=%g gap vs independent dual-block difference, z", qx, qm, qg),
                            se > 0 ? (a - b) / se : 0.0, "|z| <= 3", std::abs(a - b) <= 3 * se});
    }
    std::mt19937_64 gen(o.seed);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    double w1 = 0, w2 = 0, w3 = 0;
    for (int k = 0; k < 100; ++k) {
        const double sg = u(gen);
        const auto sc = make_scaling(sg);
        w1 = std::max(w1, std::abs((1.0 / sc.c3 / (1.0 - sc.xi_saddle)) * sc.c2 - 1.0));
        w2 = std::max(w2, std::abs(sc.xi_saddle / (1.0 - sc.xi_saddle) + std::sqrt(sg)));
        w3 = std::max(w3, std::abs(bracket_expression(sg) / sc.c2 - 1.0));
    }
    r.checks.push_back(detail::below("max rel err c3^{-1}/(1-xi) = c2^{-1}, 100 sigma", w1, 1e-13));
    r.checks.push_back(detail::below("max err xi/(1-xi) = -sqrt(sigma), 100 sigma", w2, 1e-13));
    r.checks.push_back(detail::below("max rel err bracket = c2, 100 sigma", w3, 1e-13));
    return r;
}

template <class F>
CriterionResult timed(F&& f, int id) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = f();
    } catch (const std::exception& e) {
        r.id = id;
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// Runs the selected criteria (all when empty); on_result is called as each finishes.
inline std::vector<CriterionResult> run(const Options& o, std::set<int> which = {},
                                        const std::function<void(const CriterionResult&)>& on_result = {}) {
    auto want = [&](int i) { return which.empty() || which.count(i) > 0; };
    std::vector<CriterionResult> out;
    auto push = [&](CriterionResult r) {
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    };
    if (want(1)) push(timed([] { return criterion1(); }, 1));
    if (want(2)) push(timed([] { return criterion2(); }, 2));
    if (want(3)) push(timed([] { return criterion3(); }, 3));
    if (want(4)) push(timed([] { return criterion4(); }, 4));
    if (want(5)) push(timed([] { return criterion5(); }, 5));
    if (want(6)) push(timed([&] { return criterion6(o); }, 6));
    if (want(7) || want(8) || want(9)) {
        std::optional<KpzData> data;
        const auto t0 = std::chrono::steady_clock::now();
        std::string err;
        try {
            data = kpz_data(o);
        } catch (const std::exception& e) {
            err = e.what();
        }
        const double sim_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        auto with_data = [&](int id, auto fn) {
            if (!want(id)) return;
            CriterionResult r = timed([&] {
                if (!data) throw std::runtime_error(err);
                return fn(*data);
            }, id);
            r.seconds += sim_seconds; // the shared ensemble is charged to each criterion using it
            push(std::move(r));
        };
        with_data(7, [](const KpzData& d) { return criterion7(d); });
        with_data(8, [](const KpzData& d) { return criterion8(d); });
        with_data(9, [](const KpzData& d) { return criterion9(d); });
    }
    if (want(10)) push(timed([&] { return criterion10(o); }, 10));
    return out;
}

inline std::string result_line(const CriterionResult& r) {
    return std::string(r.passed() ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " (" + r.title +
           "): " + r.summary();
}

} // namespace asep::acceptance
