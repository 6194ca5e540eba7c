#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace asep {

struct SimSpec {
    ModelParams model;
    double t_end = 0.0;          // literal simulation time (already divided by gamma)
    std::size_t n_particles = 0; // explicit particles at t = 0
    std::uint64_t seed = 0;
    std::uint64_t trajectory_id = 0;
    // Treat every site right of the explicit particles as occupied, so the
    // configuration is the full step on Z+ rather than a truncation of it.
    bool semi_infinite = false;
};

// Light-cone particle count for a finite truncation of the step.
inline std::size_t light_cone_particles(std::size_t m_max, double t_end, std::size_t L_max) {
    return m_max + static_cast<std::size_t>(std::ceil(t_end)) +
           static_cast<std::size_t>(std::ceil(6.0 * std::sqrt(t_end))) + L_max;
}

inline ParticleConfig init_step(const SimSpec& spec) {
    ParticleConfig c;
    c.positions.resize(spec.n_particles);
    for (std::size_t i = 0; i < spec.n_particles; ++i) c.positions[i] = static_cast<std::int64_t>(i) + 1;
    c.packed_right = spec.semi_infinite;
    return c;
}

namespace detail {

// p < 1/2 always, so p * 2^64 fits.
inline std::uint64_t threshold(double p) { return static_cast<std::uint64_t>(std::ldexp(p, 64)); }

// Working copy of the positions framed by sentinels: buf[0] is far left,
// buf[1..K] are the explicit particles and buf[K+1] is the first tail
// particle (packed) or far right (open).
struct JumpBuffer {
    std::vector<std::int64_t> buf;
    std::size_t K = 0;
    bool packed = false;

    explicit JumpBuffer(const ParticleConfig& c) : K(c.positions.size()), packed(c.packed_right) {
        buf.reserve(K + 64);
        buf.push_back(std::numeric_limits<std::int64_t>::min());
        buf.insert(buf.end(), c.positions.begin(), c.positions.end());
        buf.push_back(packed ? c.positions.back() + 1 : std::numeric_limits<std::int64_t>::max());
    }

    void store(ParticleConfig& c) const { c.positions.assign(buf.begin() + 1, buf.begin() + 1 + K); }

    // n attempts with the particle index uniform on [0, lambda). Indices at or
    // past K hit jammed tail particles and do nothing. When the last explicit
    // particle steps left, the first tail particle becomes explicit.
    template <class Rng>
    void attempt_jumps(std::uint64_t n, std::uint64_t lambda, std::uint64_t right_thr, Rng& rng) {
        if (buf.capacity() < lambda + 2) buf.reserve(lambda + 2);
        for (std::uint64_t e = 0; e < n; ++e) {
            const unsigned __int128 prod = static_cast<unsigned __int128>(rng()) * lambda;
            const std::size_t i = static_cast<std::size_t>(prod >> 64);
            if (i >= K) continue;
            const bool right = static_cast<std::uint64_t>(prod) < right_thr;
            std::int64_t* p = buf.data() + 1 + i;
            const std::int64_t xi = *p;
            const std::ptrdiff_t d = right ? 1 : -1;
            const std::int64_t target = xi + d;
            const bool blocked = p[d] == target;
            *p = blocked ? xi : target;
            if (packed && !right && !blocked && i + 1 == K) {
                ++K;
                buf.push_back(buf.back() + 1);
            }
        }
    }
};

} // namespace detail

// Exact sample of the configuration at time t. Attempts arrive at total
// rate N (one clock per particle); a uniform particle tries right with
// probability p, left otherwise, and exclusion suppresses blocked moves.
// A packed configuration is run in unit-time blocks with rate
// (explicit count + slack); the slack covers tail particles activated
// inside the block.
template <class Rng>
ParticleConfig run_to(ParticleConfig c, const ModelParams& model, double t, Rng& rng) {
    if (t < 0.0 || !std::isfinite(t)) throw DomainError("run_to: negative time");
    if (c.positions.empty()) throw DomainError("run_to: empty configuration");
    if (t == 0.0) return c;
    const std::uint64_t thr = detail::threshold(model.p);
    detail::JumpBuffer jb(c);
    if (!c.packed_right) {
        const std::uint64_t N = jb.K;
        std::poisson_distribution<std::uint64_t> pois(static_cast<double>(N) * t);
        jb.attempt_jumps(pois(rng), N, thr, rng);
        jb.store(c);
        return c;
    }
    // Activations within one unit block form a chain of rate-q waits, so more
    // than 16 of them has probability below 1e-15.
    constexpr std::uint64_t slack = 16;
    double remaining = t;
    while (remaining > 0.0) {
        const double dt = remaining > 1.0 ? 1.0 : remaining;
        remaining -= dt;
        const std::uint64_t lambda = jb.K + slack;
        std::poisson_distribution<std::uint64_t> pois(static_cast<double>(lambda) * dt);
        jb.attempt_jumps(pois(rng), lambda, thr, rng);
        if (jb.K >= lambda) throw ConvergenceError("run_to: tail activation exceeded block slack");
    }
    jb.store(c);
    return c;
}

inline ParticleConfig sample_trajectory(const SimSpec& spec, std::uint64_t k) {
    auto rng = Xoshiro256::stream(spec.seed, k);
    return run_to(init_step(spec), spec.model, spec.t_end, rng);
}

inline std::vector<ParticleConfig> batch_sample(const SimSpec& spec, std::size_t n_traj) {
    std::vector<ParticleConfig> out;
    out.reserve(n_traj);
    for (std::size_t k = 0; k < n_traj; ++k) out.push_back(sample_trajectory(spec, spec.trajectory_id + k));
    return out;
}

inline unsigned default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Run fn(k, acc) for k in [0, n) over `workers` threads, each with its own
// accumulator, then fold them with merge. The result depends only on the
// set of k values, provided merge is associative and commutative.
template <class Acc, class Make, class Fn, class Merge>
Acc parallel_reduce(std::size_t n, unsigned workers, Make make, Fn fn, Merge merge) {
    if (workers <= 1 || n < 2 * workers) {
        Acc acc = make();
        for (std::size_t k = 0; k < n; ++k) fn(k, acc);
        return acc;
    }
    std::vector<Acc> parts;
    for (unsigned w = 0; w < workers; ++w) parts.push_back(make());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < n; k += workers) fn(k, parts[w]);
        });
    }
    for (auto& th : pool) th.join();
    Acc acc = std::move(parts[0]);
    for (unsigned w = 1; w < workers; ++w) merge(acc, parts[w]);
    return acc;
}

} // namespace asep
