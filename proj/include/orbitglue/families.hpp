#pragma once

#include "orbitglue/measures.hpp"

namespace orbitglue {

// All admissible words of the given length in the active component, sorted.
std::vector<Word> admissible_words(const MarkovShift& sys, int length);

// Indicator of the cylinder [w] read at coordinates 0..|w|-1. Lipschitz
// constant 2^(|w|-1) w.r.t. the 2^-k metric, sup bound 1, exact evaluator.
TestFunction<MarkovShift> cylinder_indicator(const MarkovShift& sys, const Word& w);

// f(x) = x_0 as a real value.
TestFunction<MarkovShift> coordinate_value(const MarkovShift& sys);

// Default symbolic family: cylinder indicators of every length up to
// max_length.
TestFamily<MarkovShift> cylinder_family(const MarkovShift& sys, int max_length);

// Smooth compactly-supported bumps of (position, direction) evaluated after
// folding into the fundamental domain, so they are deck-invariant functions
// of the Hopf data. Supports stay clear of the folding walls.
TestFamily<SchottkyFlow> geometric_bump_family(const SchottkyFlow& sys,
                                               double quad_step = 2.5e-4);

// Basis of boundary-arc x boundary-arc x fiber-interval boxes on a regular
// angular grid.
std::vector<HopfBox> hopf_box_basis(const SchottkyFlow& sys, int resolution, double fiber_span);

BoundaryPoint boundary_point_from_angle(double beta);

// Random phase points for sampled invariant checks.
SymbolicPoint random_symbolic_point(const MarkovShift& sys, SeededRng& rng, int span);
UnitTangentVector random_unit_tangent(SeededRng& rng);

struct FunctionAudit {
    double worst_ratio = 0.0;  // max |f(x)-f(y)| / (K d(x,y))
    double max_abs = 0.0;
    bool lipschitz_ok = true;
    bool sup_ok = true;
};

// Sampled TestFunction invariants: |f(x)-f(y)| <= K d(x,y) and |f| <= F.
template <DynamicalSystem S, class Sampler>
FunctionAudit audit_test_function(const S& sys, const TestFunction<S>& f, Sampler&& sample,
                                  int pairs = 1000) {
    FunctionAudit audit;
    for (int k = 0; k < pairs; ++k) {
        auto x = sample();
        auto y = sample();
        double fx = f.eval(x), fy = f.eval(y);
        audit.max_abs = std::max({audit.max_abs, std::abs(fx), std::abs(fy)});
        double d = sys.distance(x, y);
        if (d > 0) {
            double ratio = std::abs(fx - fy) / (f.lipschitz * d);
            audit.worst_ratio = std::max(audit.worst_ratio, ratio);
        }
    }
    audit.lipschitz_ok = audit.worst_ratio <= 1.0 + 1e-9;
    audit.sup_ok = audit.max_abs <= f.sup_bound + 1e-12;
    return audit;
}

}  // namespace orbitglue
