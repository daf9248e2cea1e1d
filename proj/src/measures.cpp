#include "orbitglue/measures.hpp"

#include <algorithm>
#include <map>

namespace orbitglue {

namespace {

bool word_occurs_in_orbit(const Word& orbit_word, const Word& w) {
    const size_t ell = orbit_word.size();
    for (size_t s = 0; s < ell; ++s) {
        bool ok = true;
        for (size_t j = 0; j < w.size() && ok; ++j) ok = orbit_word[(s + j) % ell] == w[j];
        if (ok) return true;
    }
    return false;
}

}  // namespace

bool measure_charges_cylinder(const MarkovShift& sys, const InvariantMeasure<MarkovShift>& mu,
                              const Word& w) {
    if (w.empty()) throw std::invalid_argument("support_audit: empty cylinder word");
    const auto& var = mu.data();
    if (const auto* pc = std::get_if<PeriodicCombination<MarkovShift>>(&var)) {
        for (const auto& orbit : pc->orbits)
            if (word_occurs_in_orbit(orbit.word, w)) return true;
        return false;
    }
    if (const auto* st = std::get_if<StationaryMeasure>(&var))
        return st->chain.word_probability(w) > 0.0;
    if (const auto* em = std::get_if<EmpiricalMeasure<MarkovShift>>(&var)) {
        for (long long k = 0; k < em->segment.duration; ++k) {
            bool ok = true;
            for (size_t j = 0; j < w.size() && ok; ++j)
                ok = em->segment.start.at(k + static_cast<long long>(j)) == w[j];
            if (ok) return true;
        }
        return false;
    }
    const auto& mix = std::get<MixtureMeasure<MarkovShift>>(var);
    for (const auto& [part, weight] : mix.parts)
        if (weight > Rational(0) && measure_charges_cylinder(sys, part, w)) return true;
    return false;
}

double support_audit(const MarkovShift& sys, const InvariantMeasure<MarkovShift>& mu,
                     const std::vector<Word>& basis) {
    if (basis.empty()) throw std::invalid_argument("support_audit: empty basis");
    size_t charged = 0;
    for (const Word& w : basis)
        if (measure_charges_cylinder(sys, mu, w)) ++charged;
    return static_cast<double>(charged) / static_cast<double>(basis.size());
}

bool measure_charges_box(const SchottkyFlow& sys, const InvariantMeasure<SchottkyFlow>& mu,
                         const HopfBox& box, int deck_radius) {
    if (!(box.fiber_lo <= box.fiber_hi))
        throw std::invalid_argument("support_audit: empty fiber interval");
    const auto& var = mu.data();
    if (const auto* pc = std::get_if<PeriodicCombination<SchottkyFlow>>(&var)) {
        for (const auto& orbit : pc->orbits) {
            bool hit = false;
            sys.for_each_deck_word(deck_radius, [&](const Mat2& m, const std::vector<int>&) {
                if (hit) return;
                // the orbit sweeps every fiber value, so only the endpoint
                // arcs constrain it
                if (box.backward.contains(apply_mobius(m, orbit.repelling)) &&
                    box.forward.contains(apply_mobius(m, orbit.attracting)))
                    hit = true;
            });
            if (hit) return true;
        }
        return false;
    }
    if (const auto* em = std::get_if<EmpiricalMeasure<SchottkyFlow>>(&var)) {
        bool hit = false;
        const auto& seg = em->segment;
        sys.for_each_deck_word(deck_radius, [&](const Mat2& m, const std::vector<int>&) {
            if (hit) return;
            UnitTangentVector v = sys.apply_isometry(m, seg.start);
            if (!box.backward.contains(v.backward) || !box.forward.contains(v.forward)) return;
            double lo = v.fiber, hi = v.fiber + seg.duration;
            if (hi >= box.fiber_lo && lo <= box.fiber_hi) hit = true;
        });
        return hit;
    }
    if (std::holds_alternative<StationaryMeasure>(var))
        throw std::invalid_argument("support_audit: stationary measures are symbolic-only");
    const auto& mix = std::get<MixtureMeasure<SchottkyFlow>>(var);
    for (const auto& [part, weight] : mix.parts)
        if (weight > Rational(0) && measure_charges_box(sys, part, box, deck_radius)) return true;
    return false;
}

double support_audit(const SchottkyFlow& sys, const InvariantMeasure<SchottkyFlow>& mu,
                     const std::vector<HopfBox>& basis, int deck_radius) {
    if (basis.empty()) throw std::invalid_argument("support_audit: empty basis");
    size_t charged = 0;
    for (const HopfBox& box : basis)
        if (measure_charges_box(sys, mu, box, deck_radius)) ++charged;
    return static_cast<double>(charged) / static_cast<double>(basis.size());
}

GapReport closing_approximation_gap(const MarkovShift& sys, const MarkovMeasure& mu,
                                    const TestFunction<MarkovShift>& f,
                                    const ClosingParams& params, std::uint64_t seed,
                                    long long horizon) {
    params.validate();
    long long m = 0;
    while (std::ldexp(1.0, static_cast<int>(-m)) > params.delta && m < 60) ++m;
    long long t0_steps = static_cast<long long>(std::ceil(params.t0));
    if (horizon < 2 * m + t0_steps + 4)
        throw std::invalid_argument("closing_approximation_gap: horizon too small");

    auto seg = sample_path(sys, mu, horizon, seed);
    const SymbolicPoint& x = seg.start;

    // first repeated (2m+1)-window past the minimal return time; among
    // eligible starts take the earliest, which maximizes the Birkhoff span
    std::map<Word, std::vector<long long>> seen;
    long long start = -1, ret = -1;
    for (long long p = m; p + m < horizon; ++p) {
        Word key = x.window(p - m, p + m);
        auto& positions = seen[key];
        if (!positions.empty() && positions.front() < p - t0_steps) {
            start = positions.front();
            ret = p - positions.front();
            break;
        }
        positions.push_back(p);
    }
    if (start < 0)
        throw std::runtime_error("closing_approximation_gap: recurrence not observed");

    SymbolicPoint u = sys.evolve(x, start);
    auto closing = sys.close_segment(u, ret, m);

    auto space = stationary_invariant_measure(sys, mu);
    MonteCarloOptions mc;
    mc.seed = seed ^ 0x5bf03635ULL;
    double integral = integrate_detailed(sys, f, space, mc).value;

    GapReport report;
    report.segment_start = start;
    report.return_time = ret;
    report.window = m;
    report.gap = std::abs(integral - orbit_average(sys, f, closing.orbit));
    report.birkhoff_error = std::abs(segment_average(sys, f, u, ret) - integral);
    double shadow = 0.0;
    for (long long k = 0; k < ret; ++k)
        shadow += shift_distance(sys.evolve(u, k), sys.evolve(closing.shadow, k));
    report.shadow_error = shadow / static_cast<double>(ret);
    report.bound = (f.lipschitz + 2.0 * f.sup_bound + 1.0) * params.epsilon;
    report.hypotheses_met =
        report.birkhoff_error <= params.epsilon && report.shadow_error <= params.epsilon;
    report.within_bound = report.gap <= report.bound;
    return report;
}

}  // namespace orbitglue
