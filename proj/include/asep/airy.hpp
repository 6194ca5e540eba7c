#pragma once

#include <cmath>
#include <utility>

#include <boost/math/special_functions/airy.hpp>

#include "model.hpp"

namespace asep {

struct AiryValue {
    double ai;
    double aip;
};

inline AiryValue airy(double x) {
    if (!(std::abs(x) <= 50.0)) throw DomainError("airy: need |x| <= 50");
    return {boost::math::airy_ai(x), boost::math::airy_ai_prime(x)};
}

namespace detail {
// Kernel-internal variant: beyond x = 50, Ai and Ai' are below 1e-100.
inline AiryValue airy_or_zero(double x) {
    if (x > 50.0) return {0.0, 0.0};
    return airy(x);
}
} // namespace detail

} // namespace asep
