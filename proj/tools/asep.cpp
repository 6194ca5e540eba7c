// Experiment runner: simulate | exact | tw-table | verify | duality.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <asep/acceptance.hpp>
#include <asep/block_stats.hpp>
#include <asep/config.hpp>
#include <asep/ensemble.hpp>
#include <asep/qcalc/identities.hpp>
#include <asep/qcalc/pjw.hpp>
#include <asep/qcalc/plz.hpp>
#include <asep/tw.hpp>
#include <asep/version.hpp>

using namespace asep;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kFailed = 1, kConfigError = 2;

struct Sink {
    std::unique_ptr<std::ofstream> file;
    std::ostream& os() { return file ? *file : std::cout; }
};

Sink open_sink(const ExperimentConfig& cfg) {
    Sink s;
    if (!cfg.out.empty()) {
        s.file = std::make_unique<std::ofstream>(cfg.out);
        if (!*s.file) throw ConfigError("cannot write " + cfg.out);
    }
    return s;
}

unsigned workers_of(const ExperimentConfig& cfg) { return cfg.workers ? cfg.workers : default_workers(); }

std::string num(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.10g", v);
    return b;
}

void csv_provenance(std::ostream& os, const ExperimentConfig& cfg) {
    os << "# asep " << kVersion << " config_hash=" << cfg.hash() << "\n# config " << cfg.canonical() << "\n";
}

json json_provenance(const ExperimentConfig& cfg) {
    return {{"version", kVersion}, {"config_hash", cfg.hash()}, {"config", cfg.canonical()}};
}

int run_simulate(const ExperimentConfig& cfg) {
    const auto model = ModelParams::from_p(cfg.p);
    const auto e = run_kpz_ensemble(model, cfg.sigma, cfg.t, cfg.n_traj, cfg.seed, cfg.L_max, cfg.G_max, workers_of(cfg));
    const auto sc = make_scaling(e.sigma);
    const auto est = conditional_estimates(e.table, e.t, s_bin_edges(), cfg.s_pool);
    auto sink = open_sink(cfg);
    auto& os = sink.os();
    csv_provenance(os, cfg);
    os << "# m=" << e.m << " sigma_effective=" << num(e.sigma) << " t=" << num(e.t) << " t_simulated=" << num(e.t_sim)
       << " s_jitter=" << num(0.5 / (sc.c2 * std::cbrt(e.t))) << "\n";
    os << "sigma,t,s_bin_center,n_at,L_or_G,count,estimate,stderr,prediction\n";
    auto emit = [&](const std::string& center, const BinEstimates& b) {
        auto row = [&](const std::string& tag, const Estimate& x, double pred) {
            os << num(e.sigma) << ',' << num(e.t) << ',' << center << ',' << b.n_at << ',' << tag << ',' << x.count << ','
               << (x.empty ? "empty" : num(x.value)) << ',' << (x.empty ? "empty" : num(x.se)) << ',' << num(pred) << '\n';
        };
        for (int L = 1; L <= cfg.L_max; ++L) row("L" + std::to_string(L), b.block[L], block_limit(e.sigma, L));
        for (int G = 1; G <= cfg.G_max; ++G) row("G" + std::to_string(G), b.gap[G], gap_limit(e.sigma, G));
    };
    for (const auto& b : est.bins) emit(num(0.5 * (b.s_lo + b.s_hi)), b);
    emit("pooled", est.pooled);
    return kOk;
}

int run_tw_table(const ExperimentConfig& cfg) {
    if (cfg.s_min < -7.5 || cfg.s_max > 5.5) throw ConfigError("tw-table: s range must lie in [-7.5, 5.5]");
    auto sink = open_sink(cfg);
    auto& os = sink.os();
    csv_provenance(os, cfg);
    os << "s,F2,F2prime\n";
    const int n = static_cast<int>(std::floor((cfg.s_max - cfg.s_min) / cfg.s_step + 1e-9)) + 1;
    for (int k = 0; k < n; ++k) {
        const double s = cfg.s_min + k * cfg.s_step;
        os << num(s) << ',' << num(f2(s)) << ',' << num(f2_prime(s)) << '\n';
    }
    return kOk;
}

int run_exact(const ExperimentConfig& cfg) {
    if (cfg.t > 2.0) throw ConfigError("exact: the contour formulas are evaluated for t <= 2");
    const auto model = ModelParams::from_p(cfg.p);
    const double tau = model.tau;
    json checks = json::array();
    bool all_ok = true;
    auto add = [&](const std::string& id, json params, cplx lhs, cplx rhs, double tol, bool relative = false) {
        double diff = std::abs(lhs - rhs);
        if (relative) diff /= std::max(std::abs(rhs), 1e-300);
        const bool ok = diff < tol;
        all_ok &= ok;
        checks.push_back({{"identity", id}, {"parameters", params}, {"lhs", {lhs.real(), lhs.imag()}},
                          {"rhs", {rhs.real(), rhs.imag()}}, {relative ? "rel_diff" : "abs_diff", diff}, {"tolerance", tol},
                          {"ok", ok}});
    };
    for (int L = 1; L <= 5; ++L) add("mu-integral", {{"L", L}, {"tau", tau}}, qcalc::mint_lhs(L, tau), qcalc::mint_rhs(L, tau), 1e-10);
    add("K0 determinant = (a;tau)_inf", {{"tau", tau}, {"a", 0.7}}, qcalc::k0_det(tau, 0.7), qcalc::qpoch_inf(0.7, tau), 1e-8);
    add("f(mu / tau, z) = tau z f(mu, z)", {{"tau", tau}, {"z", 1.5}, {"mu", 0.3}}, qcalc::f_bilateral(0.3 / tau, 1.5, tau),
        tau * 1.5 * qcalc::f_bilateral(0.3, 1.5, tau), 1e-10, true);
    const double xi = make_scaling(cfg.sigma).xi_saddle;
    for (int L = 1; L <= 3; ++L) {
        auto v = qcalc::f_integrals(L, tau, {xi}, qcalc::ResidueTree::rational(L, tau));
        add("F0 integral = 0", {{"L", L}, {"tau", tau}}, v[0], 0.0, 1e-10);
        add("F integral = closed form", {{"L", L}, {"tau", tau}, {"xi", xi}}, v[1], qcalc::result_closed_form(L, tau, xi), 1e-9,
            true);
    }
    for (int k = 1; k <= 3; ++k)
        add("claim stage k = stage 0", {{"L", 3}, {"k", k}, {"tau", tau}, {"xi", xi}}, qcalc::claim_step_value(3, k, tau, xi),
            qcalc::claim_step_value(3, 0, tau, xi), 1e-9, true);
    add("two-residue G_2 integral at w1 = 2", {{"tau", tau}}, qcalc::gl_pole_probe(2, tau, 2.0), (1 - tau) / (tau * tau),
        1e-10, true);
    const auto oracle = acceptance::z_plus_oracle(model, cfg.t);
    struct Case {
        int m, L;
        long x;
    };
    for (auto c : {Case{1, 1, -1}, Case{1, 1, 0}, Case{1, 1, 1}, Case{1, 2, 0}, Case{1, 2, 1}, Case{2, 1, 1}}) {
        json params{{"p", cfg.p}, {"t", cfg.t}, {"m", c.m}, {"L", c.L}, {"x", c.x}};
        const double o = oracle.prob_block(c.x, c.m, c.L);
        add("PLZ = CTMC", params, qcalc::plz_value(c.x, c.m, cfg.t, c.L, model), o, 1e-6);
        add("PJw = CTMC", params, qcalc::pjw_value(c.x, c.m, cfg.t, c.L, model), o, 1e-6);
    }
    auto sink = open_sink(cfg);
    sink.os() << json{{"provenance", json_provenance(cfg)}, {"checks", checks}, {"all_ok", all_ok}}.dump(2) << "\n";
    return all_ok ? kOk : kFailed;
}

int run_verify(const ExperimentConfig& cfg) {
    acceptance::Options o;
    o.seed = cfg.seed;
    o.workers = workers_of(cfg);
    o.mc_scale = cfg.mc_scale;
    std::set<int> which;
    std::stringstream ss(cfg.criteria);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) which.insert(std::stoi(tok));
    auto results = acceptance::run(o, which, [](const acceptance::CriterionResult& r) {
        std::cout << acceptance::result_line(r) << std::endl;
    });
    bool ok = true;
    json arr = json::array();
    for (const auto& r : results) {
        ok &= r.passed();
        json checks = json::array();
        for (const auto& c : r.checks)
            checks.push_back({{"check", c.what}, {"measured", c.measured}, {"expected", c.expected}, {"ok", c.ok}});
        arr.push_back({{"criterion", r.id}, {"title", r.title}, {"passed", r.passed()}, {"seconds", r.seconds},
                       {"error", r.error}, {"checks", checks}});
    }
    if (!cfg.out.empty()) {
        auto sink = open_sink(cfg);
        sink.os() << json{{"provenance", json_provenance(cfg)}, {"criteria", arr}, {"all_passed", ok}}.dump(2) << "\n";
    }
    return ok ? kOk : kFailed;
}

int run_duality_mode(const ExperimentConfig& cfg) {
    const auto model = ModelParams::from_p(cfg.p);
    const std::size_t m = particle_index(cfg.sigma, cfg.t);
    const auto sc = make_scaling(m / cfg.t);
    std::vector<DualQuery> qs;
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        auto s_sc = sc;
        s_sc.s = s;
        const auto x = kpz_position(s_sc, cfg.t);
        for (int G = 1; G <= cfg.G_max; ++G) {
            DualQuery q{x, m, G};
            if (q.m_dual() >= 1) qs.push_back(q);
        }
    }
    const auto tally = run_duality(model, simulation_time(cfg.t, model), qs, cfg.n_traj, cfg.seed, workers_of(cfg));
    auto sink = open_sink(cfg);
    auto& os = sink.os();
    csv_provenance(os, cfg);
    os << "# t=" << num(cfg.t) << " t_simulated=" << num(simulation_time(cfg.t, model)) << " n_traj=" << tally.n << "\n";
    os << "x,m,G,x_dual,m_dual,gap_count,dual_block_count,mismatches,independent_count,gap_estimate,independent_estimate,"
          "stderr_difference\n";
    bool ok = true;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const auto& q = qs[i];
        const double a = static_cast<double>(tally.gap[i]) / tally.n, b = static_cast<double>(tally.independent[i]) / tally.n;
        const double se = std::sqrt((a * (1 - a) + b * (1 - b)) / tally.n);
        ok &= tally.mismatch[i] == 0;
        os << q.x << ',' << q.m << ',' << q.G << ',' << q.x_dual() << ',' << q.m_dual() << ',' << tally.gap[i] << ','
           << tally.dual_block[i] << ',' << tally.mismatch[i] << ',' << tally.independent[i] << ',' << num(a) << ','
           << num(b) << ',' << num(se) << '\n';
    }
    return ok ? kOk : kFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ASEP blocks and gaps: simulation and exact-formula verification"};
    app.set_version_flag("--version", std::string(kVersion));
    std::string mode, config_path;
    app.add_option("mode", mode, "simulate | exact | tw-table | verify | duality");
    app.add_option("--config", config_path, "key = value configuration file");
    ExperimentConfig flags;
    auto* o_p = app.add_option("--p", flags.p, "right jump rate, 0 < p < 1/2");
    auto* o_sigma = app.add_option("--sigma", flags.sigma, "m / t");
    auto* o_t = app.add_option("--t", flags.t, "time before division by gamma");
    auto* o_L = app.add_option("--L", flags.L_max, "largest block length");
    auto* o_G = app.add_option("--G", flags.G_max, "largest gap length");
    auto* o_n = app.add_option("--ntraj", flags.n_traj, "trajectories");
    auto* o_seed = app.add_option("--seed", flags.seed, "RNG seed");
    auto* o_out = app.add_option("--out", flags.out, "output file (default stdout)");
    auto* o_pool = app.add_option("--pool-s", flags.s_pool, "pool bins with |s| <= this");
    auto* o_workers = app.add_option("--workers", flags.workers, "worker threads (0: all cores)");
    auto* o_smin = app.add_option("--s-min", flags.s_min, "tw-table start");
    auto* o_smax = app.add_option("--s-max", flags.s_max, "tw-table end");
    auto* o_sstep = app.add_option("--s-step", flags.s_step, "tw-table step");
    auto* o_scale = app.add_option("--mc-scale", flags.mc_scale, "verify: scale Monte Carlo trajectory counts");
    auto* o_crit = app.add_option("--criteria", flags.criteria, "verify: comma-separated criteria (default all)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg.load(config_path);
        if (!mode.empty()) cfg.mode = mode;
        auto over = [](CLI::Option* o, auto& dst, const auto& src) {
            if (o->count()) dst = src;
        };
        over(o_p, cfg.p, flags.p);
        over(o_sigma, cfg.sigma, flags.sigma);
        over(o_t, cfg.t, flags.t);
        over(o_L, cfg.L_max, flags.L_max);
        over(o_G, cfg.G_max, flags.G_max);
        over(o_n, cfg.n_traj, flags.n_traj);
        over(o_seed, cfg.seed, flags.seed);
        over(o_out, cfg.out, flags.out);
        over(o_pool, cfg.s_pool, flags.s_pool);
        over(o_workers, cfg.workers, flags.workers);
        over(o_smin, cfg.s_min, flags.s_min);
        over(o_smax, cfg.s_max, flags.s_max);
        over(o_sstep, cfg.s_step, flags.s_step);
        over(o_scale, cfg.mc_scale, flags.mc_scale);
        over(o_crit, cfg.criteria, flags.criteria);
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (cfg.mode == "simulate") return run_simulate(cfg);
        if (cfg.mode == "tw-table") return run_tw_table(cfg);
        if (cfg.mode == "exact") return run_exact(cfg);
        if (cfg.mode == "verify") return run_verify(cfg);
        return run_duality_mode(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << "\n";
        return kFailed;
    }
}
