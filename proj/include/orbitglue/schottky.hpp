#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "orbitglue/core.hpp"
#include "orbitglue/mobius.hpp"

namespace orbitglue {

// Hopf triple: ordered distinct boundary endpoints and signed time along the
// geodesic, measured from the point nearest the basepoint.
struct UnitTangentVector {
    BoundaryPoint backward;
    BoundaryPoint forward;
    double fiber = 0.0;

    UnitTangentVector(BoundaryPoint b, BoundaryPoint f, double s)
        : backward(b), forward(f), fiber(s) {
        if (same_point(backward, forward))
            throw std::invalid_argument("UnitTangentVector: endpoints must be distinct");
    }
};

// Closed geodesic of the quotient: axial conjugacy-class representative,
// translation length, and the oriented axis (repelling -> attracting).
struct ClosedGeodesic {
    GroupElement element;
    double length = 0.0;
    BoundaryPoint attracting;
    BoundaryPoint repelling;

    double period() const { return length; }
    UnitTangentVector axis_vector() const {
        return UnitTangentVector(repelling, attracting, 0.0);
    }
    friend bool operator==(const ClosedGeodesic& x, const ClosedGeodesic& y) {
        return x.element.word == y.element.word;
    }
};

// Geodesic flow on T1(H^2 / Gamma) for a Schottky group given by generators
// pairing disjoint half-disks on the real line: generator i maps the exterior
// of disks[2i] onto the interior of disks[2i+1]. Points are Hopf triples on
// the universal cover; the quotient enters through deck-word searches.
class SchottkyFlow {
public:
    using Point = UnitTangentVector;
    using Time = double;
    using Orbit = ClosedGeodesic;

    struct Disk {
        double center = 0.0;
        double radius = 1.0;
        Arc boundary_arc() const {
            return {BoundaryPoint::real(center - radius), BoundaryPoint::real(center + radius)};
        }
        bool contains(std::complex<double> z, double margin = 0.0) const {
            return std::abs(z - std::complex<double>(center, 0.0)) < radius - margin;
        }
    };

    SchottkyFlow(std::vector<Mat2> generators, std::vector<Disk> disks,
                 std::complex<double> basepoint = {0.0, 1.0});

    // 2r half-disks centered at equally spaced boundary angles with angular
    // half-width theta; generator i is the double inversion pairing
    // disks 2i -> 2i+1. Requires 2*theta < pi/rank.
    static SchottkyFlow symmetric(int rank, double theta);

    int rank() const { return static_cast<int>(generators_.size()); }
    const Mat2& generator(int i) const { return generators_[static_cast<size_t>(i)]; }
    const std::vector<Disk>& disks() const { return disks_; }
    std::complex<double> basepoint() const { return basepoint_; }
    double shortest_generator_length() const { return shortest_length_; }

    // letters are +-(i+1); image disk of a letter is its target half-disk
    Mat2 letter_matrix(int letter) const;
    const Disk& letter_image_disk(int letter) const;
    Mat2 word_matrix(const std::vector<int>& word) const;
    GroupElement element_from_word(std::vector<int> word) const;

    Point evolve(const Point& v, double t) const {
        Point out = v;
        out.fiber += t;
        return out;
    }
    double distance(const Point& v, const Point& w) const {
        return quotient_distance(v, w, default_radius_);
    }

    struct Frame {
        std::complex<double> position;
        double angle;
    };
    Frame frame_of(const Point& v) const;

    // Product surrogate on T1 of the universal cover.
    double cover_distance(const Point& v, const Point& w) const;
    // Min of the cover distance over deck words of length <= search_radius; an
    // upper bound on the quotient distance, exact once the radius covers the
    // minimizer.
    double quotient_distance(const Point& v, const Point& w, int search_radius) const;

    Point apply_isometry(const Mat2& m, const Point& v) const;

    struct BracketResult {
        Point vector;
        double time_shift;  // Busemann offset along the source orbit
    };
    // Backward endpoint of v, forward endpoint of w, fiber synchronized so
    // the result lies on the strong stable set of w.
    BracketResult hopf_bracket(const Point& v, const Point& w) const;

    ClosedGeodesic closed_geodesic_from_word(const std::vector<int>& word) const;
    ClosedGeodesic closed_geodesic_from_element(const GroupElement& g) const;

    Point orbit_base(const Orbit& o) const { return o.axis_vector(); }
    void check_orbit(const Orbit& o) const {
        for (int letter : o.element.word)
            if (letter == 0 || std::abs(letter) > rank())
                throw std::invalid_argument("orbit uses letters outside this system");
    }

    struct GeodesicClosingResult {
        ClosedGeodesic geodesic;
        GroupElement deck;       // minimizer sending the segment start near its end
        double return_distance;  // achieved quotient distance
        double period_error;     // |l - t|
        std::vector<std::pair<double, double>> shadow;  // (s, D(flow_s closed, flow_s seg))
    };
    GeodesicClosingResult close_geodesic_segment(const OrbitSegment<SchottkyFlow>& seg,
                                                 const ClosingParams& params,
                                                 int search_radius) const;

    // Both endpoints inside the depth-th ping-pong refinement of the limit set.
    bool nonwandering_membership(const Point& v, int depth) const;
    bool boundary_point_in_limit_refinement(BoundaryPoint xi, int depth) const;

    // Standard Schottky reduction of the base point into the fundamental
    // domain (exterior of all half-disks), with the transported direction.
    struct FoldResult {
        std::complex<double> position;
        double angle;
        Mat2 deck;
    };
    FoldResult fold(const Point& v) const;
    Mat2 fold_matrix(std::complex<double> z) const;

    double distance_to_walls(std::complex<double> z) const;

    int default_search_radius() const { return default_radius_; }
    void set_default_search_radius(int r) {
        if (r < 0) throw std::invalid_argument("search radius must be nonnegative");
        default_radius_ = r;
    }

    // Visits (matrix, word) for every reduced word of length <= radius,
    // identity first. Letter order: a, a^-1, b, b^-1, ...
    template <class Fn>
    void for_each_deck_word(int radius, Fn&& fn) const {
        std::vector<int> word;
        fn(Mat2::identity(), word);
        std::vector<int> letters;
        for (int i = 1; i <= rank(); ++i) {
            letters.push_back(i);
            letters.push_back(-i);
        }
        auto rec = [&](auto&& self, const Mat2& m) -> void {
            if (static_cast<int>(word.size()) == radius) return;
            for (int letter : letters) {
                if (!word.empty() && word.back() == -letter) continue;
                word.push_back(letter);
                Mat2 next = m * letter_matrix(letter);
                fn(next, word);
                self(self, next);
                word.pop_back();
            }
        };
        if (radius > 0) rec(rec, Mat2::identity());
    }

    // Cyclically reduced words of length <= max_word_length, one canonical
    // representative per cyclic class, with their closed geodesics sorted by
    // length. The periodic-enumeration capability of this system.
    std::vector<ClosedGeodesic> closed_geodesics_up_to_word_length(int max_word_length) const;

private:
    void validate();

    std::vector<Mat2> generators_;
    std::vector<Disk> disks_;
    std::complex<double> basepoint_;
    double shortest_length_ = 0.0;
    int default_radius_ = 3;
};

}  // namespace orbitglue
