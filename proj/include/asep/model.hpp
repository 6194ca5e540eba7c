#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace asep {

// Bad argument (out of the domain of an operation).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A numerical procedure failed to reach its accuracy target.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelParams {
    double p = 0.3;
    double q = 0.7;
    double tau = 0.3 / 0.7;
    double gamma = 0.4;

    static ModelParams from_p(double p) {
        if (!(p > 0.0 && p < 0.5))
            throw DomainError("model: need 0 < p < 1/2, got p=" + std::to_string(p));
        ModelParams m;
        m.p = p;
        m.q = 1.0 - p;
        m.tau = p / m.q;
        m.gamma = m.q - p;
        return m;
    }
};

// Positions x_1 < ... < x_K. With packed_right set, every site beyond
// x_K is also occupied (the untouched tail of step data), so particle
// K+j sits at x_K + j.
struct ParticleConfig {
    std::vector<std::int64_t> positions;
    bool packed_right = false;

    std::size_t explicit_count() const { return positions.size(); }

    // Position of particle i (1-based).
    std::int64_t position(std::size_t i) const {
        if (i == 0) throw DomainError("particle index starts at 1");
        if (i <= positions.size()) return positions[i - 1];
        if (!packed_right || positions.empty())
            throw DomainError("particle index " + std::to_string(i) + " beyond configuration");
        return positions.back() + static_cast<std::int64_t>(i - positions.size());
    }

    bool has_particle(std::size_t i) const {
        return i >= 1 && (packed_right ? !positions.empty() : i <= positions.size());
    }

    bool valid() const {
        for (std::size_t i = 1; i < positions.size(); ++i)
            if (positions[i] <= positions[i - 1]) return false;
        return true;
    }

    bool operator==(const ParticleConfig&) const = default;
};

} // namespace asep
