#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitglue/measures.hpp"

namespace orbitglue {

// Plan for approximating sum_i (p_i/q) delta_{x_i} by one periodic orbit:
// repeat block i r_i times so the time on it is proportional to its weight,
// joined by shortest admissible connectors, closed cyclically.
template <DynamicalSystem S>
struct GluingItinerary {
    std::vector<typename S::Orbit> targets;
    std::vector<Rational> weights;              // positive, sum exactly 1
    std::vector<long long> repetitions;         // r_i
    std::vector<std::vector<int>> connectors;   // symbols (shift) or letters (flow)
    std::vector<double> connector_durations;
    long long scale = 1;                        // N

    double block_time(size_t i) const {
        return static_cast<double>(repetitions[i]) *
               static_cast<double>(targets[i].period());
    }
    double total_block_time() const {
        double t = 0.0;
        for (size_t i = 0; i < targets.size(); ++i) t += block_time(i);
        return t;
    }
    double total_connector_time() const {
        double t = 0.0;
        for (double d : connector_durations) t += d;
        return t;
    }
};

namespace detail {

inline std::vector<int> schottky_connector(const SchottkyFlow& sys, int last_letter,
                                           int first_letter) {
    if (first_letter != -last_letter) return {};
    // need one letter that cancels with neither side
    for (int i = 1; i <= sys.rank(); ++i)
        for (int cand : {i, -i})
            if (cand != -last_letter && first_letter != -cand) return {cand};
    throw std::invalid_argument("plan_itinerary: orbits not connectable without cancellation");
}

}  // namespace detail

template <DynamicalSystem S>
GluingItinerary<S> plan_itinerary(
    const S& sys, const std::vector<std::pair<typename S::Orbit, Rational>>& targets,
    long long N) {
    if (N < 1) throw std::invalid_argument("plan_itinerary: N must be at least 1");
    if (targets.empty()) throw std::invalid_argument("plan_itinerary: no targets");
    {
        std::vector<Rational> all;
        for (const auto& [orbit, w] : targets) all.push_back(w);
        check_probability_weights(all);
    }
    GluingItinerary<S> plan;
    plan.scale = N;
    for (const auto& [orbit, w] : targets) {
        if (w == Rational(0)) continue;  // zero-weight targets contribute nothing
        sys.check_orbit(orbit);
        plan.targets.push_back(orbit);
        plan.weights.push_back(w);
    }

    long long q = 1;
    for (const auto& w : plan.weights) q = std::lcm(q, w.denominator());

    if constexpr (std::is_integral_v<typename S::Time>) {
        std::vector<long long> periods;
        for (const auto& o : plan.targets) periods.push_back(o.period());
        long long L = lcm_all(periods);
        for (size_t i = 0; i < plan.targets.size(); ++i) {
            long long p = plan.weights[i].numerator() * (q / plan.weights[i].denominator());
            plan.repetitions.push_back(N * p * (L / periods[i]));
        }
    } else {
        // incommensurable periods: quantize the proportionality rule against
        // the longest period; exact as N grows
        double L = 0.0;
        for (const auto& o : plan.targets) L = std::max(L, static_cast<double>(o.period()));
        for (size_t i = 0; i < plan.targets.size(); ++i) {
            long long p = plan.weights[i].numerator() * (q / plan.weights[i].denominator());
            double ideal = static_cast<double>(N) * static_cast<double>(p) * L /
                           static_cast<double>(plan.targets[i].period());
            plan.repetitions.push_back(std::max<long long>(1, std::llround(ideal)));
        }
    }

    const size_t n = plan.targets.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& cur = plan.targets[i];
        const auto& nxt = plan.targets[(i + 1) % n];
        if constexpr (std::is_same_v<S, MarkovShift>) {
            Word c = sys.connect_words(cur.word.back(), nxt.word.front());
            plan.connector_durations.push_back(static_cast<double>(c.size()));
            plan.connectors.push_back(std::move(c));
        } else {
            std::vector<int> c = detail::schottky_connector(sys, cur.element.word.back(),
                                                            nxt.element.word.front());
            double dur = 0.0;
            for (int letter : c) dur += translation_length(sys.letter_matrix(letter));
            plan.connector_durations.push_back(dur);
            plan.connectors.push_back(std::move(c));
        }
    }
    return plan;
}

template <DynamicalSystem S>
std::vector<int> glued_word(const S& sys, const GluingItinerary<S>& plan) {
    std::vector<int> out;
    for (size_t i = 0; i < plan.targets.size(); ++i) {
        std::vector<int> block;
        if constexpr (std::is_same_v<S, MarkovShift>)
            block = plan.targets[i].word;
        else
            block = plan.targets[i].element.word;
        for (long long r = 0; r < plan.repetitions[i]; ++r)
            out.insert(out.end(), block.begin(), block.end());
        out.insert(out.end(), plan.connectors[i].begin(), plan.connectors[i].end());
    }
    return out;
}

// Concatenate the blocks and close. Symbolic case: the word is admissible by
// construction and closes exactly. Geometric case: the product group element
// of the concatenated word.
template <DynamicalSystem S>
typename S::Orbit execute_gluing(const S& sys, const GluingItinerary<S>& plan) {
    if (plan.targets.empty()) throw std::invalid_argument("execute_gluing: empty plan");
    std::vector<int> word = glued_word(sys, plan);
    if constexpr (std::is_same_v<S, MarkovShift>) {
        for (size_t i = 0; i + 1 < word.size(); ++i)
            if (!sys.allowed(word[i], word[i + 1]))
                throw std::invalid_argument("execute_gluing: inadmissible junction at position " +
                                            std::to_string(i));
        if (!sys.allowed(word.back(), word.front()))
            throw std::invalid_argument("execute_gluing: inadmissible cyclic junction");
        return sys.make_orbit(word);
    } else {
        return sys.closed_geodesic_from_word(word);
    }
}

// Time-weighted prediction for the glued orbit's measure: orbit i carries
// r_i l_i / (sum r_j l_j + sum t_j), connector j carries t_j / (same).
template <DynamicalSystem S>
struct ExpectedMeasure {
    InvariantMeasure<S> measure;
    std::vector<double> orbit_weights;
    std::vector<double> connector_weights;
};

inline ExpectedMeasure<MarkovShift> expected_measure(const MarkovShift& sys,
                                                     const GluingItinerary<MarkovShift>& plan) {
    long long denom = 0;
    for (size_t i = 0; i < plan.targets.size(); ++i)
        denom += plan.repetitions[i] * plan.targets[i].period();
    long long conn_total = 0;
    for (const auto& c : plan.connectors) conn_total += static_cast<long long>(c.size());
    denom += conn_total;

    std::vector<InvariantMeasure<MarkovShift>> parts;
    std::vector<Rational> weights;
    ExpectedMeasure<MarkovShift> out{InvariantMeasure<MarkovShift>(
                                         PeriodicCombination<MarkovShift>(plan.targets, plan.weights)),
                                     {}, {}};
    for (size_t i = 0; i < plan.targets.size(); ++i) {
        Rational w(plan.repetitions[i] * plan.targets[i].period(), denom);
        parts.push_back(orbit_measure(sys, plan.targets[i]));
        weights.push_back(w);
        out.orbit_weights.push_back(to_double(w));
    }
    for (size_t i = 0; i < plan.connectors.size(); ++i) {
        const Word& c = plan.connectors[i];
        if (c.empty()) {
            out.connector_weights.push_back(0.0);
            continue;
        }
        // the transitivity point: past on orbit i, future on orbit i+1
        const Word& prev = plan.targets[i].word;
        const Word& next = plan.targets[(i + 1) % plan.targets.size()].word;
        SymbolicPoint xc(prev, c, next, 0);
        Rational w(static_cast<long long>(c.size()), denom);
        parts.push_back(empirical_measure(
            sys, OrbitSegment<MarkovShift>(xc, static_cast<long long>(c.size()))));
        weights.push_back(w);
        out.connector_weights.push_back(to_double(w));
    }
    out.measure = convex_combine(sys, parts, weights);
    return out;
}

inline ExpectedMeasure<SchottkyFlow> expected_measure(const SchottkyFlow& sys,
                                                      const GluingItinerary<SchottkyFlow>& plan) {
    double denom = plan.total_block_time() + plan.total_connector_time();
    ExpectedMeasure<SchottkyFlow> out{InvariantMeasure<SchottkyFlow>(PeriodicCombination<SchottkyFlow>(
                                          plan.targets, plan.weights)),
                                      {}, {}};
    // flows have incommensurable times; report double weights and build the
    // measure from denominator-limited rationals renormalized to exact sum 1
    std::vector<InvariantMeasure<SchottkyFlow>> parts;
    std::vector<Rational> weights;
    const long long Q = 1000000000;
    Rational used(0);
    for (size_t i = 0; i < plan.targets.size(); ++i) {
        double w = plan.block_time(i) / denom;
        out.orbit_weights.push_back(w);
        Rational rw(std::llround(w * static_cast<double>(Q)), Q);
        if (i + 1 == plan.targets.size() && plan.total_connector_time() == 0.0)
            rw = Rational(1) - used;
        used += rw;
        parts.push_back(orbit_measure(sys, plan.targets[i]));
        weights.push_back(rw);
    }
    for (size_t i = 0; i < plan.connectors.size(); ++i)
        out.connector_weights.push_back(plan.connector_durations[i] / denom);
    if (plan.total_connector_time() > 0.0) {
        // fold the connector mass into the final orbit entry: connectors of a
        // flow plan have no canonical segment representative here
        Rational rest = Rational(1) - used;
        weights.back() += rest;
    }
    out.measure = convex_combine(sys, parts, weights);
    return out;
}

struct Certificate {
    double measured = 0.0;
    std::optional<Rational> measured_exact;
    double bound = 0.0;
    std::optional<Rational> bound_exact;
    double total_period = 0.0;
    double connector_fraction = 0.0;
    bool within_bound = false;
    bool family_separates_targets = true;
    size_t argmax_function = 0;
};

// Audited comparison of the glued orbit's measure with the target convex
// combination. The bound charges the connector time and every window that
// crosses a block junction; the symbolic map case is exact arithmetic.
template <DynamicalSystem S>
Certificate certify(const S& sys, const typename S::Orbit& result,
                    const GluingItinerary<S>& plan, const TestFamily<S>& family) {
    if (family.functions.empty()) throw std::invalid_argument("certify: empty family");
    InvariantMeasure<S> target(PeriodicCombination<S>(plan.targets, plan.weights));
    InvariantMeasure<S> glued = orbit_measure(sys, result);
    BlResult bl = bl_distance_detailed(sys, glued, target, family);

    Certificate cert;
    cert.measured = bl.value;
    cert.measured_exact = bl.rational;
    cert.argmax_function = bl.argmax;
    cert.family_separates_targets = family_separates(sys, family, plan.targets);

    double F = std::max(family.max_sup(), 1.0);
    if constexpr (std::is_integral_v<typename S::Time>) {
        std::vector<int> word = glued_word(sys, plan);
        long long period = static_cast<long long>(word.size());
        long long conn = static_cast<long long>(plan.total_connector_time());
        long long span = family.max_window_span();
        long long junctions = 2 * static_cast<long long>(plan.targets.size());
        // windows that read across a junction miscount by at most 2F each
        cert.bound = 2.0 * F *
                     static_cast<double>(conn + junctions * (span - 1)) /
                     static_cast<double>(period);
        if (F == std::floor(F))
            cert.bound_exact = Rational(2) * Rational(static_cast<long long>(F)) *
                               Rational(conn + junctions * (span - 1), period);
        cert.total_period = static_cast<double>(period);
        cert.connector_fraction = static_cast<double>(conn) / static_cast<double>(period);
    } else {
        double period = static_cast<double>(result.period());
        double conn = plan.total_connector_time();
        double drift = std::abs(period - plan.total_block_time() - conn);
        // recursive tolerance schedule eps_k = eps/2^k for the block gluings,
        // charged at the family's Lipschitz scale
        double K = family.max_lipschitz();
        double eps = 0.0;
        double quantization = 0.0;
        for (size_t i = 0; i < plan.targets.size(); ++i) {
            eps += sampled_block_shadow(sys, result, plan, i);
            double ideal = to_double(plan.weights[i]);
            quantization += std::abs(plan.block_time(i) / (plan.total_block_time() + conn) - ideal);
        }
        cert.bound = (2.0 * F * (conn + drift) + K * eps * period) / period + 2.0 * F * quantization;
        cert.total_period = period;
        cert.connector_fraction = period > 0 ? conn / period : 0.0;
    }
    if (cert.measured_exact && cert.bound_exact)
        cert.within_bound = *cert.measured_exact <= *cert.bound_exact;
    else
        cert.within_bound = cert.measured <= cert.bound + 1e-12;
    return cert;
}

// Max sampled quotient distance from the glued orbit to target block i over
// that block's time share, doubled as a certified envelope.
inline double sampled_block_shadow(const SchottkyFlow& sys, const ClosedGeodesic& result,
                                   const GluingItinerary<SchottkyFlow>& plan, size_t block) {
    double offset = 0.0;
    for (size_t j = 0; j < block; ++j)
        offset += plan.block_time(j) + plan.connector_durations[j];
    UnitTangentVector glued = result.axis_vector();
    UnitTangentVector target = plan.targets[block].axis_vector();
    double T = plan.block_time(block);
    double worst = 0.0;
    int radius = sys.default_search_radius();
    for (int k = 1; k < 5; ++k) {
        double s = offset + T * k / 5.0;
        double d = std::numeric_limits<double>::infinity();
        // compare against every phase of the short target orbit
        int phases = 8;
        for (int p = 0; p < phases; ++p) {
            double tp = plan.targets[block].period() * p / phases;
            d = std::min(d, sys.quotient_distance(sys.evolve(glued, s), sys.evolve(target, tp),
                                                  radius));
        }
        worst = std::max(worst, d);
    }
    return 2.0 * worst;
}

// Bracket recursion from the paper's picture sequence: glue block k+1 onto the
// running orbit, pull back, and close the final segment; checks the recovered
// deck element against the concatenated word.
struct GeometricGluingAudit {
    SchottkyFlow::GeodesicClosingResult closing;
    std::vector<double> bracket_shifts;
    std::vector<double> block_tolerances;  // eps / 2^k schedule
    bool schedule_respected = false;
    double trace_mismatch = 0.0;
};

GeometricGluingAudit geometric_gluing_audit(const SchottkyFlow& sys,
                                            const GluingItinerary<SchottkyFlow>& plan,
                                            const ClosingParams& params, int search_radius);

}  // namespace orbitglue
