#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "block_stats.hpp"
#include "sim.hpp"

namespace asep {

// Tallies for step data on Z+ observed at scaling time t (simulated for t/gamma).
struct KpzEnsemble {
    double sigma_requested = 0.25;
    double t = 0.0;
    double t_sim = 0.0;
    std::size_t m = 1;
    double sigma = 0.25; // m / t
    CounterTable table;
};

// m = round(sigma t); when sigma t is not an integer the effective sigma is m / t.
inline std::size_t particle_index(double sigma, double t) {
    const long m = std::lround(sigma * t);
    if (m < 1) throw DomainError("particle_index: sigma t rounds below 1");
    return static_cast<std::size_t>(m);
}

inline KpzEnsemble run_kpz_ensemble(const ModelParams& model, double sigma, double t, std::size_t n_traj,
                                    std::uint64_t seed, int L_max, int G_max, unsigned workers) {
    KpzEnsemble e;
    e.sigma_requested = sigma;
    e.t = t;
    e.t_sim = simulation_time(t, model);
    e.m = particle_index(sigma, t);
    e.sigma = e.m / t;
    if (!(e.sigma > 0.0 && e.sigma < 1.0)) throw DomainError("run_kpz_ensemble: effective sigma outside (0,1)");
    SimSpec spec;
    spec.model = model;
    spec.t_end = e.t_sim;
    spec.n_particles = 1;
    spec.semi_infinite = true;
    spec.seed = seed;
    e.table = parallel_reduce<CounterTable>(
        n_traj, workers, [&] { return CounterTable(e.m, L_max, G_max); },
        [&](std::size_t k, CounterTable& acc) { acc.add(sample_trajectory(spec, k)); },
        [](CounterTable& a, const CounterTable& b) { a.merge(b); });
    return e;
}

struct DualQuery {
    std::int64_t x;
    std::size_t m;
    std::int64_t G;

    std::int64_t x_dual() const { return -(x + G); }
    std::int64_t m_dual() const { return static_cast<std::int64_t>(m) - x - G + 1; }
};

// Per query: trajectories with x_m = x and gap >= G; trajectories whose dual
// has an exact G-block at (x', m'); trajectories where the two disagree; and,
// from an independent Z+ ensemble, exact G-blocks at (x' + 1, m') (step data
// on the nonnegative integers is Z+ step data moved one site left).
struct DualityTally {
    std::vector<std::uint64_t> gap, dual_block, mismatch, independent;
    std::uint64_t n = 0;

    explicit DualityTally(std::size_t nq = 0) : gap(nq), dual_block(nq), mismatch(nq), independent(nq) {}

    void merge(const DualityTally& o) {
        for (std::size_t i = 0; i < gap.size(); ++i) {
            gap[i] += o.gap[i];
            dual_block[i] += o.dual_block[i];
            mismatch[i] += o.mismatch[i];
            independent[i] += o.independent[i];
        }
        n += o.n;
    }
};

inline bool exact_block(const ParticleConfig& c, std::int64_t m, std::int64_t x, std::int64_t G) {
    return m >= 1 && c.position(m) == x && is_block_start(c, m, G) && !is_block_start(c, m, G + 1);
}

inline DualityTally run_duality(const ModelParams& model, double t_sim, const std::vector<DualQuery>& qs, std::size_t n_traj,
                                std::uint64_t seed, unsigned workers) {
    SimSpec spec;
    spec.model = model;
    spec.t_end = t_sim;
    spec.n_particles = 1;
    spec.semi_infinite = true;
    spec.seed = seed;
    SimSpec other = spec;
    other.seed = seed + 0x9e3779b97f4a7c15ULL;
    const std::size_t nq = qs.size();
    return parallel_reduce<DualityTally>(
        n_traj, workers, [&] { return DualityTally(nq); },
        [&](std::size_t k, DualityTally& a) {
            const auto c = sample_trajectory(spec, k);
            const auto d = dual_config(c, c.positions.front(), c.positions.back());
            const auto c2 = sample_trajectory(other, k);
            ++a.n;
            for (std::size_t i = 0; i < nq; ++i) {
                const auto& q = qs[i];
                const bool ev = c.position(q.m) == q.x && gap_after(c, q.m) >= q.G;
                const bool dv = exact_block(d, q.m_dual(), q.x_dual(), q.G);
                a.gap[i] += ev;
                a.dual_block[i] += dv;
                a.mismatch[i] += ev != dv;
                a.independent[i] += exact_block(c2, q.m_dual(), q.x_dual() + 1, q.G);
            }
        },
        [](DualityTally& a, const DualityTally& b) { a.merge(b); });
}

} // namespace asep
