#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "model.hpp"

namespace asep {

// All N-subsets of the window [a, b], as bit patterns (bit i = site a + i).
struct StateSpace {
    std::int64_t a = 0, b = 0;
    int n_particles = 0;
    std::vector<std::uint32_t> states; // sorted

    StateSpace(std::int64_t a_, std::int64_t b_, int n) : a(a_), b(b_), n_particles(n) {
        const std::int64_t width = b - a + 1;
        if (width < 1 || width > 18) throw DomainError("StateSpace: window must hold 1..18 sites");
        if (n < 0 || n > 8 || n > width) throw DomainError("StateSpace: need 0 <= N <= min(8, window)");
        for (std::uint32_t s = 0; s < (1u << width); ++s)
            if (std::popcount(s) == n) states.push_back(s);
    }

    int width() const { return static_cast<int>(b - a + 1); }
    std::size_t size() const { return states.size(); }

    std::size_t index(std::uint32_t s) const {
        auto it = std::lower_bound(states.begin(), states.end(), s);
        if (it == states.end() || *it != s) throw DomainError("StateSpace: not a state");
        return static_cast<std::size_t>(it - states.begin());
    }

    std::uint32_t encode(const std::vector<std::int64_t>& sites) const {
        std::uint32_t s = 0;
        for (auto x : sites) {
            if (x < a || x > b) throw DomainError("StateSpace: site outside window");
            s |= 1u << (x - a);
        }
        if (std::popcount(s) != n_particles) throw DomainError("StateSpace: wrong particle count");
        return s;
    }

    // Occupied sites in increasing order.
    std::vector<std::int64_t> decode(std::uint32_t s) const {
        std::vector<std::int64_t> out;
        for (int i = 0; i < width(); ++i)
            if (s >> i & 1u) out.push_back(a + i);
        return out;
    }
};

// Sparse generator, one row per state: off-diagonal (target, rate) pairs and
// the diagonal entry.
struct GeneratorMatrix {
    std::vector<std::size_t> row_start;
    std::vector<std::size_t> target;
    std::vector<double> rate;
    std::vector<double> diag;

    std::size_t size() const { return diag.size(); }
};

// Jumps leaving the window are suppressed (reflecting truncation).
inline GeneratorMatrix build_generator(const StateSpace& space, const ModelParams& model) {
    GeneratorMatrix g;
    const int w = space.width();
    g.row_start.push_back(0);
    for (std::uint32_t s : space.states) {
        double out = 0.0;
        for (int i = 0; i < w; ++i) {
            if (!(s >> i & 1u)) continue;
            if (i + 1 < w && !(s >> (i + 1) & 1u)) {
                g.target.push_back(space.index(s ^ (1u << i) ^ (1u << (i + 1))));
                g.rate.push_back(model.p);
                out += model.p;
            }
            if (i > 0 && !(s >> (i - 1) & 1u)) {
                g.target.push_back(space.index(s ^ (1u << i) ^ (1u << (i - 1))));
                g.rate.push_back(model.q);
                out += model.q;
            }
        }
        g.diag.push_back(-out);
        g.row_start.push_back(g.target.size());
    }
    return g;
}

// Distribution at time t from a point mass, by uniformization.
inline std::vector<double> evolve(const GeneratorMatrix& g, std::size_t initial, double t, double tail_tol = 1e-12) {
    if (t < 0.0) throw DomainError("evolve: negative time");
    const std::size_t n = g.size();
    std::vector<double> v(n, 0.0), next(n), acc(n, 0.0);
    v.at(initial) = 1.0;
    if (t == 0.0) return v;
    double lambda = 0.0;
    for (double d : g.diag) lambda = std::max(lambda, -d);
    if (lambda == 0.0) return v;
    const double mean = lambda * t;
    double weight = std::exp(-mean);
    double cumulative = 0.0;
    const int cap = static_cast<int>(mean + 40.0 * std::sqrt(mean) + 200.0);
    for (int k = 0;; ++k) {
        for (std::size_t i = 0; i < n; ++i) acc[i] += weight * v[i];
        cumulative += weight;
        if (1.0 - cumulative < tail_tol && k > mean) break;
        if (k >= cap) throw ConvergenceError("evolve: Poisson tail not reached within iteration cap");
        for (std::size_t i = 0; i < n; ++i) next[i] = v[i] * (1.0 + g.diag[i] / lambda);
        for (std::size_t i = 0; i < n; ++i) {
            if (v[i] == 0.0) continue;
            for (std::size_t e = g.row_start[i]; e < g.row_start[i + 1]; ++e)
                next[g.target[e]] += v[i] * g.rate[e] / lambda;
        }
        v.swap(next);
        weight *= mean / (k + 1);
    }
    return acc;
}

// P(Poisson(mean) >= k).
inline double poisson_tail(double mean, int k) {
    if (k <= 0) return 1.0;
    double term = std::exp(-mean);
    if (k <= mean) {
        double below = 0.0;
        for (int j = 0; j < k; ++j, term *= mean / j) below += term;
        return 1.0 - below;
    }
    for (int j = 0; j < k; ++j) term *= mean / (j + 1);
    double upper = 0.0;
    for (int j = k; term > 1e-300 && j < k + 500; ++j, term *= mean / j) upper += term;
    return upper;
}

// Exact law of a small ASEP on a reflecting window, started from particles
// at initial sites, observed at time t.
class CtmcOracle {
public:
    CtmcOracle(std::int64_t a, std::int64_t b, std::vector<std::int64_t> initial, const ModelParams& model, double t)
        : space_(a, b, static_cast<int>(initial.size())), model_(model), t_(t), initial_(std::move(initial)) {
        std::sort(initial_.begin(), initial_.end());
        auto gen = build_generator(space_, model_);
        dist_ = evolve(gen, space_.index(space_.encode(initial_)), t);
    }

    // Step data 1..N with a wall at N (wall_right) standing in for the
    // packed tail of Z+, or an open right side on [a, b].
    static CtmcOracle step(std::int64_t a, std::int64_t b, int n, const ModelParams& model, double t) {
        std::vector<std::int64_t> init(n);
        for (int i = 0; i < n; ++i) init[i] = i + 1;
        return CtmcOracle(a, b, init, model, t);
    }

    const StateSpace& space() const { return space_; }
    const std::vector<double>& distribution() const { return dist_; }

    // Bound on the probability that a wall was ever pressed by the extreme
    // particles, from Poisson counts of their outward attempts. A right wall
    // sitting on the initial rightmost particle is a packed-tail wall and
    // is excluded (it is exact for Z+ step data up to far-away effects).
    double boundary_leak() const {
        const std::int64_t lo = initial_.front(), hi = initial_.back();
        double leak = poisson_tail(model_.q * t_, static_cast<int>(lo - space_.a + 1));
        if (space_.b > hi) leak += poisson_tail(model_.p * t_, static_cast<int>(space_.b - hi + 1));
        return leak;
    }

    void check_margin(double tol) const {
        if (boundary_leak() > tol)
            throw DomainError("ctmc: window margin too small (leak bound " + std::to_string(boundary_leak()) + ")");
    }

    double prob_event(const std::function<bool(const std::vector<std::int64_t>&)>& pred) const {
        double s = 0.0;
        for (std::size_t i = 0; i < dist_.size(); ++i)
            if (dist_[i] != 0.0 && pred(space_.decode(space_.states[i]))) s += dist_[i];
        return s;
    }

    double prob_block(std::int64_t x, int m, int L, double margin_tol = 1e-10) const {
        check_index(m, L);
        check_margin(margin_tol);
        return prob_event([&](const std::vector<std::int64_t>& pos) {
            for (int j = 0; j < L; ++j)
                if (pos[m - 1 + j] != x + j) return false;
            return true;
        });
    }

    double prob_gap(std::int64_t x, int m, int G, double margin_tol = 1e-10) const {
        check_index(m, 2);
        check_margin(margin_tol);
        return prob_event([&](const std::vector<std::int64_t>& pos) { return pos[m - 1] == x && pos[m] > x + G; });
    }

private:
    void check_index(int m, int L) const {
        if (m < 1 || L < 1 || m + L - 1 > space_.n_particles) throw DomainError("ctmc: particle index out of range");
    }

    StateSpace space_;
    ModelParams model_;
    double t_;
    std::vector<std::int64_t> initial_;
    std::vector<double> dist_;
};

} // namespace asep
