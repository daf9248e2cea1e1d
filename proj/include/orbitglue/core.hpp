#pragma once

#include <concepts>
#include <stdexcept>
#include <string>

namespace orbitglue {

// Shared contract for the two concrete systems. Symbolic systems use integer
// time (the map case is an exact specialization), the geodesic flow uses real
// time; everything downstream is written against this surface.
template <class S>
concept DynamicalSystem = requires(const S& sys, const typename S::Point& p,
                                   typename S::Time t) {
    typename S::Point;
    typename S::Time;
    typename S::Orbit;
    { sys.evolve(p, t) } -> std::same_as<typename S::Point>;
    { sys.distance(p, p) } -> std::convertible_to<double>;
};

template <class S>
struct OrbitSegment {
    typename S::Point start;
    typename S::Time duration;

    OrbitSegment(typename S::Point s, typename S::Time d)
        : start(std::move(s)), duration(d) {
        if (!(duration > 0))
            throw std::invalid_argument("OrbitSegment: duration must be positive");
    }
};

// Closing moduli, chosen per system (the CLI exposes them as config).
struct ClosingParams {
    double epsilon = 1e-2;  // target shadowing tolerance
    double delta = 1e-3;    // return tolerance
    double t0 = 1.0;        // minimal return time

    void validate() const {
        if (epsilon <= 0 || delta <= 0 || t0 <= 0)
            throw std::invalid_argument("ClosingParams: all parameters must be positive");
        if (delta > epsilon)
            throw std::invalid_argument("ClosingParams: delta must not exceed epsilon");
    }
};

}  // namespace orbitglue
