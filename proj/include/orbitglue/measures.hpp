#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "orbitglue/core.hpp"
#include "orbitglue/markov.hpp"
#include "orbitglue/rational.hpp"
#include "orbitglue/schottky.hpp"

namespace orbitglue {

// f(x) = sum of coeff * [x_{base .. base+|word|-1} = word]; admits exact
// integration against stationary chains and exact orbit averages.
struct CylinderForm {
    long long base = 0;
    std::vector<std::pair<Word, Rational>> terms;
};

template <DynamicalSystem S>
struct TestFunction {
    std::string name;
    std::function<double(const typename S::Point&)> eval;
    double lipschitz = 1.0;  // K, w.r.t. the system metric
    double sup_bound = 1.0;  // F

    // symbolic extras: exact evaluator and coordinate support window
    std::function<Rational(const typename S::Point&)> exact_eval;
    long long window_lo = 0;
    long long window_hi = 0;
    std::optional<CylinderForm> cylinder;

    // geometric extra: quadrature step for time averages
    double quad_step = 2.5e-4;

    TestFunction<S> composed_with_evolve(const S& sys, typename S::Time t) const {
        TestFunction<S> g = *this;
        g.name = name + "∘φ_" + std::to_string(t);
        auto base_eval = eval;
        g.eval = [&sys, base_eval, t](const typename S::Point& p) {
            return base_eval(sys.evolve(p, t));
        };
        if (exact_eval) {
            auto base_exact = exact_eval;
            g.exact_eval = [&sys, base_exact, t](const typename S::Point& p) {
                return base_exact(sys.evolve(p, t));
            };
        }
        g.cylinder.reset();
        if constexpr (std::is_integral_v<typename S::Time>) {
            g.window_lo = window_lo + t;
            g.window_hi = window_hi + t;
        }
        return g;
    }
};

template <DynamicalSystem S>
struct TestFamily {
    std::vector<TestFunction<S>> functions;

    double max_sup() const {
        double m = 0.0;
        for (const auto& f : functions) m = std::max(m, f.sup_bound);
        return m;
    }
    double max_lipschitz() const {
        double m = 0.0;
        for (const auto& f : functions) m = std::max(m, f.lipschitz);
        return m;
    }
    long long max_window_span() const {
        long long m = 1;
        for (const auto& f : functions) m = std::max(m, f.window_hi - f.window_lo + 1);
        return m;
    }
};

// ---------------------------------------------------------------------------
// invariant measures

template <DynamicalSystem S>
struct PeriodicCombination {
    std::vector<typename S::Orbit> orbits;
    std::vector<Rational> weights;  // positive, sum exactly 1

    PeriodicCombination(std::vector<typename S::Orbit> o, std::vector<Rational> w)
        : orbits(std::move(o)), weights(std::move(w)) {
        if (orbits.size() != weights.size())
            throw std::invalid_argument("PeriodicCombination: size mismatch");
        if (orbits.empty()) throw std::invalid_argument("PeriodicCombination: empty");
        check_probability_weights(weights);
    }
};

struct StationaryMeasure {
    MarkovMeasure chain;
};

template <DynamicalSystem S>
struct EmpiricalMeasure {
    OrbitSegment<S> segment;
};

template <DynamicalSystem S>
class InvariantMeasure;

template <DynamicalSystem S>
struct MixtureMeasure {
    std::vector<std::pair<InvariantMeasure<S>, Rational>> parts;
};

template <DynamicalSystem S>
class InvariantMeasure {
public:
    using Variant = std::variant<PeriodicCombination<S>, StationaryMeasure, EmpiricalMeasure<S>,
                                 MixtureMeasure<S>>;

    explicit InvariantMeasure(Variant v) : data_(std::make_shared<Variant>(std::move(v))) {}

    const Variant& data() const { return *data_; }
    bool is_periodic_combination() const {
        return std::holds_alternative<PeriodicCombination<S>>(*data_);
    }
    const PeriodicCombination<S>& as_periodic_combination() const {
        return std::get<PeriodicCombination<S>>(*data_);
    }

private:
    std::shared_ptr<const Variant> data_;
};

template <DynamicalSystem S>
InvariantMeasure<S> orbit_measure(const S& sys, const typename S::Orbit& orbit) {
    sys.check_orbit(orbit);
    return InvariantMeasure<S>(PeriodicCombination<S>({orbit}, {Rational(1)}));
}

template <DynamicalSystem S>
InvariantMeasure<S> empirical_measure(const S&, const OrbitSegment<S>& segment) {
    return InvariantMeasure<S>(EmpiricalMeasure<S>{segment});
}

inline InvariantMeasure<MarkovShift> stationary_invariant_measure(const MarkovShift& sys,
                                                                  const MarkovMeasure& mu) {
    for (int s : mu.symbols)
        if (!sys.in_component(s))
            throw std::invalid_argument("stationary measure uses symbols outside the component");
    return InvariantMeasure<MarkovShift>(StationaryMeasure{mu});
}

// ---------------------------------------------------------------------------
// time and orbit averages

template <DynamicalSystem S>
double segment_average(const S& sys, const TestFunction<S>& f, const typename S::Point& start,
                       typename S::Time duration) {
    if (!(duration > 0)) throw std::invalid_argument("segment_average: duration must be positive");
    if constexpr (std::is_integral_v<typename S::Time>) {
        double acc = 0.0;
        for (typename S::Time k = 0; k < duration; ++k) acc += f.eval(sys.evolve(start, k));
        return acc / static_cast<double>(duration);
    } else {
        long long n = std::max<long long>(8, static_cast<long long>(std::ceil(duration / f.quad_step)));
        double h = duration / static_cast<double>(n);
        double acc = 0.0;
        for (long long k = 0; k < n; ++k) acc += f.eval(sys.evolve(start, (k + 0.5) * h));
        return acc / static_cast<double>(n);
    }
}

template <DynamicalSystem S>
std::optional<Rational> segment_average_exact(const S& sys, const TestFunction<S>& f,
                                              const typename S::Point& start,
                                              typename S::Time duration) {
    if constexpr (std::is_integral_v<typename S::Time>) {
        if (!f.exact_eval) return std::nullopt;
        Rational acc(0);
        for (typename S::Time k = 0; k < duration; ++k) acc += f.exact_eval(sys.evolve(start, k));
        return acc / Rational(duration);
    } else {
        (void)sys;
        (void)f;
        (void)start;
        (void)duration;
        return std::nullopt;
    }
}

// Birkhoff average of f along the trajectory of x: exact sum for maps,
// composite midpoint quadrature for flows.
template <DynamicalSystem S>
double birkhoff_average(const S& sys, const TestFunction<S>& f, const typename S::Point& x,
                        typename S::Time t) {
    return segment_average(sys, f, x, t);
}

template <DynamicalSystem S>
double orbit_average(const S& sys, const TestFunction<S>& f, const typename S::Orbit& orbit) {
    return segment_average(sys, f, sys.orbit_base(orbit), orbit.period());
}

template <DynamicalSystem S>
std::optional<Rational> orbit_average_exact(const S& sys, const TestFunction<S>& f,
                                            const typename S::Orbit& orbit) {
    return segment_average_exact(sys, f, sys.orbit_base(orbit), orbit.period());
}

// ---------------------------------------------------------------------------
// integration

struct IntegrateResult {
    double value = 0.0;
    double std_error = 0.0;              // nonzero only for Monte Carlo paths
    std::optional<Rational> rational;    // present when the value is exact
};

struct MonteCarloOptions {
    std::uint64_t seed = 1;
    long long samples = 20000;
    int batches = 20;
};

namespace detail {

inline IntegrateResult integrate_stationary(const MarkovShift& sys,
                                            const TestFunction<MarkovShift>& f,
                                            const StationaryMeasure& st,
                                            const MonteCarloOptions& mc) {
    for (int s : st.chain.symbols)
        if (!sys.in_component(s))
            throw std::invalid_argument("integrate: measure and system do not match");
    if (f.cylinder) {
        double acc = 0.0;
        for (const auto& [word, coeff] : f.cylinder->terms)
            acc += to_double(coeff) * st.chain.word_probability(word);
        return {acc, 0.0, std::nullopt};
    }
    // no closed form: Monte Carlo along a stationary path, batch-mean error
    auto seg = sample_path(sys, st.chain, mc.samples, mc.seed);
    long long per = mc.samples / mc.batches;
    std::vector<double> batch_means;
    double total = 0.0;
    for (int b = 0; b < mc.batches; ++b) {
        double acc = 0.0;
        for (long long k = 0; k < per; ++k)
            acc += f.eval(sys.evolve(seg.start, b * per + k));
        batch_means.push_back(acc / static_cast<double>(per));
        total += acc;
    }
    double mean = total / static_cast<double>(per * mc.batches);
    double var = 0.0;
    for (double m : batch_means) var += (m - mean) * (m - mean);
    var /= std::max(1, mc.batches - 1);
    return {mean, std::sqrt(var / mc.batches), std::nullopt};
}

}  // namespace detail

template <DynamicalSystem S>
IntegrateResult integrate_detailed(const S& sys, const TestFunction<S>& f,
                                   const InvariantMeasure<S>& mu,
                                   const MonteCarloOptions& mc = {}) {
    const auto& var = mu.data();
    if (const auto* pc = std::get_if<PeriodicCombination<S>>(&var)) {
        for (const auto& o : pc->orbits) sys.check_orbit(o);
        bool exact = true;
        Rational racc(0);
        double dacc = 0.0;
        for (size_t i = 0; i < pc->orbits.size(); ++i) {
            auto ex = orbit_average_exact(sys, f, pc->orbits[i]);
            if (ex && exact) {
                racc += pc->weights[i] * *ex;
                dacc += to_double(pc->weights[i]) * to_double(*ex);
            } else {
                exact = false;
                dacc = 0.0;
            }
        }
        if (exact) return {to_double(racc), 0.0, racc};
        double acc = 0.0;
        for (size_t i = 0; i < pc->orbits.size(); ++i)
            acc += to_double(pc->weights[i]) * orbit_average(sys, f, pc->orbits[i]);
        return {acc, 0.0, std::nullopt};
    }
    if (const auto* st = std::get_if<StationaryMeasure>(&var)) {
        if constexpr (std::is_same_v<S, MarkovShift>) {
            return detail::integrate_stationary(sys, f, *st, mc);
        } else {
            throw std::invalid_argument("integrate: stationary measures require a Markov system");
        }
    }
    if (const auto* em = std::get_if<EmpiricalMeasure<S>>(&var)) {
        auto ex = segment_average_exact(sys, f, em->segment.start, em->segment.duration);
        if (ex) return {to_double(*ex), 0.0, *ex};
        return {segment_average(sys, f, em->segment.start, em->segment.duration), 0.0,
                std::nullopt};
    }
    const auto& mix = std::get<MixtureMeasure<S>>(var);
    bool exact = true;
    Rational racc(0);
    double dacc = 0.0;
    double err2 = 0.0;
    for (const auto& [part, weight] : mix.parts) {
        IntegrateResult r = integrate_detailed(sys, f, part, mc);
        dacc += to_double(weight) * r.value;
        err2 += to_double(weight) * to_double(weight) * r.std_error * r.std_error;
        if (r.rational && exact)
            racc += weight * *r.rational;
        else
            exact = false;
    }
    if (exact) return {to_double(racc), 0.0, racc};
    return {dacc, std::sqrt(err2), std::nullopt};
}

template <DynamicalSystem S>
double integrate(const S& sys, const TestFunction<S>& f, const InvariantMeasure<S>& mu,
                 const MonteCarloOptions& mc = {}) {
    return integrate_detailed(sys, f, mu, mc).value;
}

// ---------------------------------------------------------------------------
// weak-* comparison against a declared family

struct BlResult {
    double value = 0.0;
    std::optional<Rational> rational;  // exact when every integral was exact with F <= 1
    size_t argmax = 0;
};

// max over the family of |∫f dμ − ∫f dν| / max(F_f, 1); a pseudometric that
// vanishes when μ = ν and scales linearly in convex mixing.
template <DynamicalSystem S>
BlResult bl_distance_detailed(const S& sys, const InvariantMeasure<S>& mu,
                              const InvariantMeasure<S>& nu, const TestFamily<S>& family,
                              const MonteCarloOptions& mc = {}) {
    if (family.functions.empty())
        throw std::invalid_argument("bl_distance: the test family is empty");
    BlResult out;
    bool exact = true;
    std::optional<Rational> best_exact;
    for (size_t i = 0; i < family.functions.size(); ++i) {
        const auto& f = family.functions[i];
        IntegrateResult a = integrate_detailed(sys, f, mu, mc);
        IntegrateResult b = integrate_detailed(sys, f, nu, mc);
        double denom = std::max(f.sup_bound, 1.0);
        double v = std::abs(a.value - b.value) / denom;
        if (v > out.value) {
            out.value = v;
            out.argmax = i;
        }
        if (exact && a.rational && b.rational && f.sup_bound <= 1.0) {
            Rational rv = rational_abs(*a.rational - *b.rational);
            if (!best_exact || rv > *best_exact) best_exact = rv;
        } else {
            exact = false;
        }
    }
    if (exact && best_exact) {
        out.rational = best_exact;
        out.value = to_double(*best_exact);
    }
    return out;
}

template <DynamicalSystem S>
double bl_distance(const S& sys, const InvariantMeasure<S>& mu, const InvariantMeasure<S>& nu,
                   const TestFamily<S>& family, const MonteCarloOptions& mc = {}) {
    return bl_distance_detailed(sys, mu, nu, family, mc).value;
}

// Some member separates every pair of the given orbit measures.
template <DynamicalSystem S>
bool family_separates(const S& sys, const TestFamily<S>& family,
                      const std::vector<typename S::Orbit>& orbits, double tol = 1e-8) {
    for (size_t i = 0; i < orbits.size(); ++i)
        for (size_t j = i + 1; j < orbits.size(); ++j) {
            bool separated = false;
            for (const auto& f : family.functions) {
                double a = orbit_average(sys, f, orbits[i]);
                double b = orbit_average(sys, f, orbits[j]);
                if (std::abs(a - b) > tol) {
                    separated = true;
                    break;
                }
            }
            if (!separated) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// convex structure

template <DynamicalSystem S>
InvariantMeasure<S> convex_combine(const S& sys, const std::vector<InvariantMeasure<S>>& measures,
                                   const std::vector<Rational>& weights) {
    if (measures.size() != weights.size())
        throw std::invalid_argument("convex_combine: size mismatch");
    if (measures.empty()) throw std::invalid_argument("convex_combine: no measures");
    check_probability_weights(weights);

    bool all_periodic = true;
    for (size_t i = 0; i < measures.size(); ++i)
        if (weights[i] > Rational(0) && !measures[i].is_periodic_combination())
            all_periodic = false;

    if (all_periodic) {
        std::vector<typename S::Orbit> orbits;
        std::vector<Rational> ws;
        for (size_t i = 0; i < measures.size(); ++i) {
            if (weights[i] == Rational(0)) continue;
            const auto& pc = measures[i].as_periodic_combination();
            for (size_t k = 0; k < pc.orbits.size(); ++k) {
                Rational w = weights[i] * pc.weights[k];
                if (w == Rational(0)) continue;
                sys.check_orbit(pc.orbits[k]);
                bool merged = false;
                for (size_t j = 0; j < orbits.size(); ++j)
                    if (orbits[j] == pc.orbits[k]) {
                        ws[j] += w;
                        merged = true;
                        break;
                    }
                if (!merged) {
                    orbits.push_back(pc.orbits[k]);
                    ws.push_back(w);
                }
            }
        }
        return InvariantMeasure<S>(PeriodicCombination<S>(std::move(orbits), std::move(ws)));
    }
    MixtureMeasure<S> mix;
    for (size_t i = 0; i < measures.size(); ++i)
        if (weights[i] > Rational(0)) mix.parts.emplace_back(measures[i], weights[i]);
    return InvariantMeasure<S>(std::move(mix));
}

// (1 - 1/n) nu + (1/n) delta_{x0}, exact rationals.
template <DynamicalSystem S>
InvariantMeasure<S> full_support_term(const S& sys, const InvariantMeasure<S>& nu,
                                      const typename S::Orbit& x0, long long n) {
    if (n < 1) throw std::invalid_argument("full_support_term: n must be at least 1");
    return convex_combine<S>(sys, {nu, orbit_measure(sys, x0)},
                             {Rational(n - 1, n), Rational(1, n)});
}

// ---------------------------------------------------------------------------
// support audits

// Symbolic basis element: the cylinder [w] read at coordinates 0..|w|-1.
bool measure_charges_cylinder(const MarkovShift& sys, const InvariantMeasure<MarkovShift>& mu,
                              const Word& w);

double support_audit(const MarkovShift& sys, const InvariantMeasure<MarkovShift>& mu,
                     const std::vector<Word>& basis);

// Geometric basis element: endpoints in the two arcs, fiber in the interval.
struct HopfBox {
    Arc backward;
    Arc forward;
    double fiber_lo = 0.0;
    double fiber_hi = 0.0;
};

bool measure_charges_box(const SchottkyFlow& sys, const InvariantMeasure<SchottkyFlow>& mu,
                         const HopfBox& box, int deck_radius);

double support_audit(const SchottkyFlow& sys, const InvariantMeasure<SchottkyFlow>& mu,
                     const std::vector<HopfBox>& basis, int deck_radius);

// ---------------------------------------------------------------------------
// the closing-lemma gap experiment

struct GapReport {
    double gap = 0.0;             // |∫f dμ - orbit average over the closed orbit|
    double bound = 0.0;           // (K + 2F + 1) epsilon
    double birkhoff_error = 0.0;  // |segment average - ∫f dμ|
    double shadow_error = 0.0;    // mean metric distance segment vs closed orbit
    long long segment_start = 0;
    long long return_time = 0;
    long long window = 0;
    bool hypotheses_met = false;
    bool within_bound = false;
};

// Samples a stationary-typical point, waits for a delta-return past t0,
// closes it, and compares the orbit average with the space average.
GapReport closing_approximation_gap(const MarkovShift& sys, const MarkovMeasure& mu,
                                    const TestFunction<MarkovShift>& f,
                                    const ClosingParams& params, std::uint64_t seed,
                                    long long horizon = 20000);

}  // namespace orbitglue
