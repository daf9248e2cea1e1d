#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitglue/core.hpp"
#include "orbitglue/rational.hpp"
#include "orbitglue/symbolic.hpp"

namespace orbitglue {

// Countable-alphabet topological Markov shift, materialized up to a
// truncation size A. Symbols are the naturals 0..A-1; the adjacency
// predicate is total on them. All operations act on the largest strongly
// connected component of the truncated transition graph.
class MarkovShift {
public:
    using Point = SymbolicPoint;
    using Time = long long;
    using AdjacencyFn = std::function<bool(int, int)>;

    // Canonical periodic orbit: the lexicographically least rotation of a
    // primitive admissible cyclic word. Period is the word length.
    struct Orbit {
        Word word;
        long long period() const { return static_cast<long long>(word.size()); }
        friend bool operator==(const Orbit& a, const Orbit& b) { return a.word == b.word; }
        friend bool operator<(const Orbit& a, const Orbit& b) { return a.word < b.word; }
    };

    MarkovShift(std::string name, AdjacencyFn allowed, int truncation);

    static MarkovShift full_shift(int truncation);
    static MarkovShift golden_mean();
    // Bounded-jump renewal shift: 0 -> b for b < k, and n -> n-1. Truncations
    // at A >= k all share the component {0..k-1}.
    static MarkovShift renewal(int k, int truncation);
    static MarkovShift from_edges(int truncation, const std::vector<std::pair<int, int>>& edges,
                                  std::string name = "edges");

    const std::string& name() const { return name_; }
    int truncation() const { return truncation_; }
    bool allowed(int a, int b) const;
    const std::vector<int>& component() const { return component_; }
    bool in_component(int s) const;

    Point evolve(const Point& p, Time t) const { return p.shifted(t); }
    double distance(const Point& x, const Point& y) const { return shift_distance(x, y); }

    // Admissibility of the realized bi-infinite sequence (tails included).
    void check_point(const Point& p) const;
    bool word_admissible(const Word& w, bool cyclic) const;

    Orbit make_orbit(const Word& w) const;
    Point orbit_base(const Orbit& o) const { return SymbolicPoint::periodic(o.word); }
    void check_orbit(const Orbit& o) const {
        if (!word_admissible(o.word, /*cyclic=*/true))
            throw std::invalid_argument("orbit word is not admissible in this system: " +
                                        word_to_string(o.word));
    }

    // Local product: z_n = x_n for n <= 0, z_n = y_n for n > 0. Requires
    // d(x,y) <= 1/2 so the junction symbol matches.
    Point bracket(const Point& x, const Point& y) const;

    struct ClosingResult {
        Orbit orbit;                   // canonical primitive orbit
        Point shadow;                  // periodic point of x_0..x_{t-1}, phase-aligned with x
        long long closing_period;     // the return time t; the map case has |l - t| = 0
        std::vector<long long> agreement_radius;  // certified radii w(s), s = 0..t
    };

    // Closing: a segment with x_i = x_{i+t} on the window |i| <= m closes to
    // the periodic word x_0..x_{t-1}, which shadows x with the reported radii.
    ClosingResult close_segment(const Point& x, long long t, long long m) const;

    // Transitivity oracle: minimal word w with a.w.b admissible, BFS with
    // ties broken by smallest symbol.
    Word connect_words(int a, int b) const;

    // All primitive periodic orbits of period <= T in the component, one per
    // cyclic class, sorted lexicographically by least rotation.
    std::vector<Orbit> enumerate_periodic(long long T) const;

private:
    void compute_component();

    std::string name_;
    AdjacencyFn allowed_;
    int truncation_;
    std::vector<int> component_;       // sorted
    std::vector<char> in_component_;   // indexed by symbol
    std::vector<std::vector<int>> adjacency_;  // sorted out-neighbors within component
};

// Stationary chain on the truncated component: row-stochastic P over the
// component symbols (in component order) and its stationary row vector.
struct MarkovMeasure {
    std::vector<int> symbols;
    std::vector<std::vector<double>> transition;
    std::vector<double> stationary;

    int index_of(int symbol) const;
    // pi_{w0} * prod P_{wi, wi+1}; exact closed form for cylinder weights.
    double word_probability(const Word& w) const;
};

// Solves pi P = pi, sum pi = 1 to residual <= 1e-12. Rejects non-stochastic
// rows, entries outside adjacency, and reducible chains.
MarkovMeasure stationary_measure(const MarkovShift& sys,
                                 const std::vector<std::vector<double>>& P);

// Equal weight on every allowed transition.
std::vector<std::vector<double>> uniform_transitions(const MarkovShift& sys);

// Deterministic engine: same seed, same stream, independent of the standard
// library's distribution implementations.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next_u64();
    double uniform01();  // in [0, 1)
    size_t pick(const std::vector<double>& weights);

private:
    std::uint64_t state_;
};

// Chain path started from the stationary law; the two tails are shortest
// admissible cycles so the realized point is a valid phase point.
OrbitSegment<MarkovShift> sample_path(const MarkovShift& sys, const MarkovMeasure& mu,
                                      long long length, std::uint64_t seed);

}  // namespace orbitglue
