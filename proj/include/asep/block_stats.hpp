#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "tw.hpp"

namespace asep {

struct ScalingParams {
    double sigma = 0.25;
    double s = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double xi_saddle = 0.0;
};

inline ScalingParams make_scaling(double sigma, double s = 0.0) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("scaling: need 0 < sigma < 1");
    const double r = std::sqrt(sigma);
    ScalingParams sc;
    sc.sigma = sigma;
    sc.s = s;
    sc.c1 = -1.0 + 2.0 * r;
    sc.c2 = std::pow(sigma, -1.0 / 6) * std::pow(1.0 - r, 2.0 / 3);
    sc.c3 = std::pow(sigma, -1.0 / 6) * std::pow(1.0 - r, 5.0 / 3);
    sc.xi_saddle = -r / (1.0 - r);
    return sc;
}

// The simulator runs for t / gamma; this is the only place the conversion happens.
inline double simulation_time(double t, const ModelParams& model) { return t / model.gamma; }

inline std::int64_t kpz_position(const ScalingParams& sc, double t) {
    if (!(t > 0.0)) throw DomainError("kpz_position: need t > 0");
    return std::llround(sc.c1 * t + sc.c2 * sc.s * std::cbrt(t));
}

inline double s_of_position(std::int64_t x, long m, double t) {
    if (!(t > 0.0)) throw DomainError("s_of_position: need t > 0");
    const auto sc = make_scaling(m / t);
    return (x - sc.c1 * t) / (sc.c2 * std::cbrt(t));
}

inline bool is_block_start(const ParticleConfig& c, std::size_t m, std::size_t L) {
    if (m < 1 || L < 1 || !c.has_particle(m + L - 1)) throw DomainError("is_block_start: index out of range");
    const std::int64_t x = c.position(m);
    for (std::size_t j = 1; j < L; ++j)
        if (c.position(m + j) != x + static_cast<std::int64_t>(j)) return false;
    return true;
}

inline std::int64_t gap_after(const ParticleConfig& c, std::size_t m) {
    if (m < 1 || !c.has_particle(m + 1)) throw DomainError("gap_after: particle has no successor");
    return c.position(m + 1) - c.position(m) - 1;
}

// Monte Carlo tallies keyed by the site of the m-th particle.
struct CounterRow {
    std::uint64_t n_at = 0;
    std::vector<std::uint64_t> n_block; // index L = 1..L_max (0 unused)
    std::vector<std::uint64_t> n_gap;   // index G = 1..G_max (0 unused)
};

class CounterTable {
public:
    CounterTable(std::size_t m = 1, int L_max = 3, int G_max = 2) : m_(m), L_max_(L_max), G_max_(G_max) {
        if (m < 1 || L_max < 1 || G_max < 1) throw DomainError("CounterTable: need m, L_max, G_max >= 1");
    }

    std::size_t m() const { return m_; }
    int L_max() const { return L_max_; }
    int G_max() const { return G_max_; }
    std::uint64_t n_total() const { return n_total_; }
    const std::map<std::int64_t, CounterRow>& rows() const { return rows_; }

    void add(const ParticleConfig& c) {
        if (!c.has_particle(m_ + std::max<std::size_t>(L_max_, 2) - 1)) throw DomainError("tally: configuration too small");
        ++n_total_;
        const std::int64_t x = c.position(m_);
        CounterRow& r = row(x);
        ++r.n_at;
        int run = 1;
        while (run < L_max_ && c.position(m_ + run) == x + run) ++run;
        for (int L = 1; L <= run; ++L) ++r.n_block[L];
        const std::int64_t gap = gap_after(c, m_);
        for (int G = 1; G <= G_max_ && G <= gap; ++G) ++r.n_gap[G];
    }

    void merge(const CounterTable& o) {
        if (o.m_ != m_ || o.L_max_ != L_max_ || o.G_max_ != G_max_) throw DomainError("CounterTable: merge mismatch");
        n_total_ += o.n_total_;
        for (const auto& [x, r] : o.rows_) {
            CounterRow& mine = row(x);
            mine.n_at += r.n_at;
            for (int L = 1; L <= L_max_; ++L) mine.n_block[L] += r.n_block[L];
            for (int G = 1; G <= G_max_; ++G) mine.n_gap[G] += r.n_gap[G];
        }
    }

    // Rows summed over sites whose s value lies in [lo, hi).
    CounterRow aggregate(double t, double lo, double hi) const {
        CounterRow a = empty_row();
        for (const auto& [x, r] : rows_) {
            const double s = s_of_position(x, static_cast<long>(m_), t);
            if (s < lo || s >= hi) continue;
            a.n_at += r.n_at;
            for (int L = 1; L <= L_max_; ++L) a.n_block[L] += r.n_block[L];
            for (int G = 1; G <= G_max_; ++G) a.n_gap[G] += r.n_gap[G];
        }
        return a;
    }

    CounterRow at(std::int64_t x) const {
        auto it = rows_.find(x);
        return it == rows_.end() ? empty_row() : it->second;
    }

    // Empirical P(x_m <= x).
    double cdf(std::int64_t x) const {
        std::uint64_t below = 0;
        for (const auto& [y, r] : rows_) {
            if (y > x) break;
            below += r.n_at;
        }
        return n_total_ ? static_cast<double>(below) / n_total_ : 0.0;
    }

private:
    CounterRow empty_row() const {
        CounterRow r;
        r.n_block.assign(L_max_ + 1, 0);
        r.n_gap.assign(G_max_ + 1, 0);
        return r;
    }
    CounterRow& row(std::int64_t x) {
        auto it = rows_.find(x);
        if (it == rows_.end()) it = rows_.emplace(x, empty_row()).first;
        return it->second;
    }

    std::size_t m_;
    int L_max_, G_max_;
    std::uint64_t n_total_ = 0;
    std::map<std::int64_t, CounterRow> rows_;
};

inline CounterTable tally(const std::vector<ParticleConfig>& configs, std::size_t m, int L_max, int G_max) {
    CounterTable t(m, L_max, G_max);
    for (const auto& c : configs) t.add(c);
    return t;
}

struct Estimate {
    std::uint64_t count = 0;
    std::uint64_t n = 0;
    double value = 0.0;
    double se = 0.0;
    bool empty = true;
};

// count / n with the binomial (Wald) standard error.
inline Estimate binomial_estimate(std::uint64_t count, std::uint64_t n) {
    Estimate e;
    e.count = count;
    e.n = n;
    if (n == 0) return e;
    e.empty = false;
    e.value = static_cast<double>(count) / n;
    e.se = std::sqrt(e.value * (1.0 - e.value) / n);
    return e;
}

struct BinEstimates {
    double s_lo = 0.0, s_hi = 0.0;
    std::uint64_t n_at = 0;
    std::vector<Estimate> block; // index L
    std::vector<Estimate> gap;   // index G
};

inline BinEstimates estimates_for(const CounterRow& r, double lo, double hi, int L_max, int G_max) {
    BinEstimates b;
    b.s_lo = lo;
    b.s_hi = hi;
    b.n_at = r.n_at;
    b.block.resize(L_max + 1);
    b.gap.resize(G_max + 1);
    for (int L = 1; L <= L_max; ++L) b.block[L] = binomial_estimate(r.n_block[L], r.n_at);
    for (int G = 1; G <= G_max; ++G) b.gap[G] = binomial_estimate(r.n_gap[G], r.n_at);
    return b;
}

struct ConditionalEstimates {
    std::vector<BinEstimates> bins;
    BinEstimates pooled; // over |s| <= s_pool
};

inline std::vector<double> s_bin_edges(double lo = -4.0, double hi = 3.0, double width = 0.25) {
    std::vector<double> e;
    for (int k = 0; lo + k * width <= hi + 1e-12; ++k) e.push_back(lo + k * width);
    return e;
}

inline ConditionalEstimates conditional_estimates(const CounterTable& tbl, double t, const std::vector<double>& edges,
                                                  double s_pool) {
    ConditionalEstimates out;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
        out.bins.push_back(estimates_for(tbl.aggregate(t, edges[k], edges[k + 1]), edges[k], edges[k + 1], tbl.L_max(),
                                         tbl.G_max()));
    out.pooled = estimates_for(tbl.aggregate(t, -s_pool, std::nextafter(s_pool, 1e300)), -s_pool, s_pool, tbl.L_max(),
                               tbl.G_max());
    return out;
}

// Limits of the conditional probabilities.
inline double block_limit(double sigma, int L) { return std::pow(sigma, (L - 1) / 2.0); }
inline double gap_limit(double sigma, int G) { return std::pow(1.0 - std::sqrt(sigma), G); }

inline double block_density_prediction(const ScalingParams& sc, int L, double t) {
    return block_limit(sc.sigma, L) * f2_prime(sc.s) / (sc.c2 * std::cbrt(t));
}

inline double gap_density_prediction(const ScalingParams& sc, int G, double t) {
    return gap_limit(sc.sigma, G) * f2_prime(sc.s) / (sc.c2 * std::cbrt(t));
}

// Kolmogorov-Smirnov distance between the law of x_m and F2 in the s
// coordinate, at the lattice points with a half-site continuity correction.
inline double ks_distance_f2(const CounterTable& tbl, double t) {
    if (tbl.n_total() == 0) throw DomainError("ks_distance_f2: empty table");
    double d = 0.0;
    std::uint64_t below = 0;
    for (const auto& [x, r] : tbl.rows()) {
        below += r.n_at;
        const double s = s_of_position(x, static_cast<long>(tbl.m()), t) +
                         0.5 / (make_scaling(tbl.m() / t).c2 * std::cbrt(t));
        const double F = s < -8.0 ? 0.0 : s > 6.0 ? 1.0 : f2(s);
        d = std::max(d, std::abs(static_cast<double>(below) / tbl.n_total() - F));
    }
    return d;
}

// ---- particle-hole duality ----

// Occupied sites of the dual are the negated holes. For a finite
// configuration the holes are taken inside window [lo, hi]. A packed
// configuration has holes only left of x_K and all sites left of x_1 empty,
// so its dual is again packed: explicit sites -y for holes y in (x_1, x_K)
// and -(x_1 - 1), followed by the packed tail. The window must then cover
// [x_1, x_K].
inline ParticleConfig dual_config(const ParticleConfig& c, std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw DomainError("dual_config: empty window");
    ParticleConfig d;
    const auto& x = c.positions;
    if (c.packed_right) {
        if (x.empty() || lo > x.front() || hi < x.back()) throw DomainError("dual_config: window too small");
        for (std::size_t i = x.size() - 1; i > 0; --i)
            for (std::int64_t y = x[i] - 1; y > x[i - 1]; --y) d.positions.push_back(-y);
        d.positions.push_back(-(x.front() - 1));
        d.packed_right = true;
        return d;
    }
    for (std::int64_t y = hi; y >= lo; --y)
        if (!std::binary_search(x.begin(), x.end(), y)) d.positions.push_back(-y);
    return d;
}

// m' = 1 + number of holes right of x + G. For a packed configuration the
// count is finite; a finite configuration needs the window edge hi.
inline std::size_t dual_index(const ParticleConfig& c, std::int64_t x, std::int64_t G,
                              std::optional<std::int64_t> hi = std::nullopt) {
    const auto& pos = c.positions;
    std::int64_t edge;
    if (c.packed_right) {
        edge = pos.back();
    } else {
        if (!hi || (!pos.empty() && *hi < pos.back())) throw DomainError("dual_index: holes right of the window");
        edge = *hi;
    }
    std::size_t holes = 0;
    for (std::int64_t y = x + G + 1; y <= edge; ++y)
        if (!std::binary_search(pos.begin(), pos.end(), y)) ++holes;
    return holes + 1;
}

struct DualScaling {
    double sigma;
    double c1;
    double c2;
};

// sqrt(sigma') = 1 - sqrt(sigma) - (1/2)(1 - sqrt(sigma))^{-1} c2 s t^{-2/3}.
inline DualScaling dual_scaling(const ScalingParams& sc, double t) {
    const double r = std::sqrt(sc.sigma);
    double rp = 1.0 - r;
    if (std::isfinite(t)) rp -= 0.5 / (1.0 - r) * sc.c2 * sc.s * std::pow(t, -2.0 / 3);
    DualScaling d;
    d.sigma = rp * rp;
    const auto dp = make_scaling(d.sigma);
    d.c1 = dp.c1;
    d.c2 = dp.c2;
    return d;
}

// (1 - sqrt(sigma))^{-1} c2 - (1 - sqrt(sigma))^{-1/3} sigma^{1/3}; equals c2.
inline double bracket_expression(double sigma) {
    const double r = std::sqrt(sigma);
    return make_scaling(sigma).c2 / (1.0 - r) - std::pow(1.0 - r, -1.0 / 3) * std::cbrt(sigma);
}

} // namespace asep
