#include "orbitglue/schottky.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orbitglue {

namespace {

// Inversion in the circle (center c, radius rho) as an anti-Mobius matrix:
// sigma(z) = (c zbar + rho^2 - c^2) / (zbar - c). The composition of two
// inversions is the plain matrix product (entries are real).
Mat2 inversion_matrix(double c, double rho) {
    return {c, rho * rho - c * c, 1.0, -c};
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

}  // namespace

SchottkyFlow::SchottkyFlow(std::vector<Mat2> generators, std::vector<Disk> disks,
                           std::complex<double> basepoint)
    : generators_(std::move(generators)), disks_(std::move(disks)), basepoint_(basepoint) {
    validate();
}

void SchottkyFlow::validate() {
    if (generators_.empty())
        throw std::invalid_argument("SchottkyFlow: need at least one generator");
    if (disks_.size() != 2 * generators_.size())
        throw std::invalid_argument("SchottkyFlow: need one disk pair per generator");
    if (!(basepoint_.imag() > 0))
        throw std::invalid_argument("SchottkyFlow: basepoint must lie in the upper half-plane");
    for (const auto& g : generators_) g.check_unimodular();
    for (const auto& d : disks_)
        if (!(d.radius > 0))
            throw std::invalid_argument("SchottkyFlow: disk radius must be positive");
    for (size_t i = 0; i < disks_.size(); ++i)
        for (size_t j = i + 1; j < disks_.size(); ++j)
            if (!(std::abs(disks_[i].center - disks_[j].center) >
                  disks_[i].radius + disks_[j].radius + 1e-12))
                throw std::invalid_argument("SchottkyFlow: ping-pong disks are not disjoint");
    for (const auto& d : disks_)
        if (d.contains(basepoint_))
            throw std::invalid_argument("SchottkyFlow: basepoint must lie outside the disks");

    // sampled ping-pong test: each generator sends its source boundary and the
    // basepoint into the target disk
    for (size_t i = 0; i < generators_.size(); ++i) {
        const Disk& src = disks_[2 * i];
        const Disk& tgt = disks_[2 * i + 1];
        const Mat2& g = generators_[i];
        for (int k = 0; k < 16; ++k) {
            double phi = (k + 0.5) * M_PI / 16.0;
            std::complex<double> z{src.center + src.radius * std::cos(phi),
                                   src.radius * std::sin(phi)};
            std::complex<double> gz = apply_mobius(g, z);
            if (!(std::abs(gz - std::complex<double>(tgt.center, 0.0)) <= tgt.radius + 1e-9))
                throw std::invalid_argument(
                    "SchottkyFlow: generator does not map its source boundary into its target disk");
        }
        if (!tgt.contains(apply_mobius(g, basepoint_)))
            throw std::invalid_argument(
                "SchottkyFlow: generator does not map the exterior into its target disk");
    }

    shortest_length_ = translation_length(generators_[0]);
    for (const auto& g : generators_)
        shortest_length_ = std::min(shortest_length_, translation_length(g));
}

SchottkyFlow SchottkyFlow::symmetric(int rank, double theta) {
    if (rank < 1) throw std::invalid_argument("symmetric: rank must be at least 1");
    if (!(theta > 0) || !(2.0 * theta < M_PI / rank))
        throw std::invalid_argument("symmetric: need 0 < 2*theta < pi/rank");
    // boundary point at Cayley angle beta is -cot(beta/2)
    auto at_angle = [](double beta) { return -std::cos(beta / 2.0) / std::sin(beta / 2.0); };
    std::vector<Disk> disks;
    for (int k = 0; k < 2 * rank; ++k) {
        double alpha = (k + 0.5) * M_PI / rank;
        double lo = at_angle(alpha - theta);
        double hi = at_angle(alpha + theta);
        disks.push_back(Disk{0.5 * (lo + hi), 0.5 * (hi - lo)});
    }
    std::vector<Mat2> gens;
    for (int i = 0; i < rank; ++i) {
        Mat2 m = inversion_matrix(disks[2 * i + 1].center, disks[2 * i + 1].radius) *
                 inversion_matrix(disks[2 * i].center, disks[2 * i].radius);
        gens.push_back(m.normalized());
    }
    return SchottkyFlow(std::move(gens), std::move(disks));
}

Mat2 SchottkyFlow::letter_matrix(int letter) const {
    int i = std::abs(letter) - 1;
    if (letter == 0 || i >= rank())
        throw std::invalid_argument("letter out of range: " + std::to_string(letter));
    return letter > 0 ? generators_[static_cast<size_t>(i)]
                      : generators_[static_cast<size_t>(i)].inverse();
}

const SchottkyFlow::Disk& SchottkyFlow::letter_image_disk(int letter) const {
    int i = std::abs(letter) - 1;
    if (letter == 0 || i >= rank())
        throw std::invalid_argument("letter out of range: " + std::to_string(letter));
    return letter > 0 ? disks_[static_cast<size_t>(2 * i + 1)]
                      : disks_[static_cast<size_t>(2 * i)];
}

Mat2 SchottkyFlow::word_matrix(const std::vector<int>& word) const {
    Mat2 m = Mat2::identity();
    for (int letter : word) m = m * letter_matrix(letter);
    return m;
}

GroupElement SchottkyFlow::element_from_word(std::vector<int> word) const {
    std::vector<int> reduced = reduce_word(std::move(word));
    return GroupElement{word_matrix(reduced), reduced};
}

SchottkyFlow::Frame SchottkyFlow::frame_of(const Point& v) const {
    GeodesicChart chart(v.backward, v.forward);
    double t = chart.nearest_param(basepoint_) + v.fiber;
    return Frame{chart.point(t), chart.direction_angle(t)};
}

double SchottkyFlow::cover_distance(const Point& v, const Point& w) const {
    Frame fv = frame_of(v), fw = frame_of(w);
    double base = hyperbolic_distance(fv.position, fw.position);
    double ang = wrap_angle(fv.angle - fw.angle);
    return std::sqrt(base * base + ang * ang);
}

double SchottkyFlow::quotient_distance(const Point& v, const Point& w,
                                       int search_radius) const {
    if (search_radius < 0)
        throw std::invalid_argument("quotient_distance: search radius must be nonnegative");
    double best = std::numeric_limits<double>::infinity();
    for_each_deck_word(search_radius, [&](const Mat2& m, const std::vector<int>&) {
        best = std::min(best, cover_distance(v, apply_isometry(m, w)));
    });
    return best;
}

SchottkyFlow::Point SchottkyFlow::apply_isometry(const Mat2& m, const Point& v) const {
    BoundaryPoint nb = apply_mobius(m, v.backward);
    BoundaryPoint nf = apply_mobius(m, v.forward);
    GeodesicChart old_chart(v.backward, v.forward);
    GeodesicChart new_chart(nb, nf);
    std::complex<double> z = old_chart.point(old_chart.nearest_param(basepoint_) + v.fiber);
    double t_new = new_chart.param_of(apply_mobius(m, z));
    return Point(nb, nf, t_new - new_chart.nearest_param(basepoint_));
}

SchottkyFlow::BracketResult SchottkyFlow::hopf_bracket(const Point& v, const Point& w) const {
    if (same_point(v.backward, w.forward))
        throw std::invalid_argument("hopf_bracket: degenerate pair, endpoints coincide");
    GeodesicChart out_chart(v.backward, w.forward);
    double t0 = out_chart.nearest_param(basepoint_);
    std::complex<double> z0 = out_chart.point(t0);
    // Busemann relative to the common forward endpoint decreases at unit rate
    // along the output geodesic; synchronize with w.
    std::complex<double> zw = frame_of(w).position;
    double fiber = busemann(w.forward, z0, basepoint_) - busemann(w.forward, zw, basepoint_);
    Point out(v.backward, w.forward, fiber);
    // offset along the source orbit: Busemann relative to the shared backward
    // endpoint grows at unit rate under the flow
    std::complex<double> zv = frame_of(v).position;
    std::complex<double> zo = frame_of(out).position;
    double shift = busemann(v.backward, zo, basepoint_) - busemann(v.backward, zv, basepoint_);
    return BracketResult{out, shift};
}

ClosedGeodesic SchottkyFlow::closed_geodesic_from_element(const GroupElement& g) const {
    if (!is_axial(g.matrix))
        throw std::invalid_argument("closed geodesic: element is not axial (|trace| = " +
                                    std::to_string(std::abs(g.matrix.trace())) + ")");
    AxisEndpoints ends = axis_endpoints(g.matrix);
    return ClosedGeodesic{g, translation_length(g.matrix), ends.attracting, ends.repelling};
}

ClosedGeodesic SchottkyFlow::closed_geodesic_from_word(const std::vector<int>& word) const {
    std::vector<int> reduced = cyclically_reduce_word(word);
    if (reduced.empty())
        throw std::invalid_argument("closed geodesic: word reduces to the identity");
    return closed_geodesic_from_element(GroupElement{word_matrix(reduced), reduced});
}

SchottkyFlow::GeodesicClosingResult SchottkyFlow::close_geodesic_segment(
    const OrbitSegment<SchottkyFlow>& seg, const ClosingParams& params,
    int search_radius) const {
    params.validate();
    const Point& v = seg.start;
    const double t = seg.duration;
    if (!(t > params.t0))
        throw std::invalid_argument("close_geodesic_segment: duration below minimal return time");
    Point endpoint = evolve(v, t);

    double best = std::numeric_limits<double>::infinity();
    Mat2 best_m = Mat2::identity();
    std::vector<int> best_word;
    for_each_deck_word(search_radius, [&](const Mat2& m, const std::vector<int>& word) {
        // deck element sending the segment start near its endpoint
        double d = cover_distance(endpoint, apply_isometry(m, v));
        if (d < best) {
            best = d;
            best_m = m;
            best_word = word;
        }
    });
    if (!(best < params.delta))
        throw std::domain_error("close_geodesic_segment: no return detected (closest " +
                                std::to_string(best) + " at search radius " +
                                std::to_string(search_radius) + ")");
    if (!is_axial(best_m))
        throw std::domain_error("close_geodesic_segment: identified element is not axial");

    ClosedGeodesic geo = closed_geodesic_from_element(GroupElement{best_m, best_word});

    // periodic vector on the axis nearest to the segment start
    GeodesicChart axis(geo.repelling, geo.attracting);
    double t_star = axis.nearest_param(basepoint_);
    double guess = axis.nearest_param(frame_of(v).position) - t_star;
    double lo = guess - 6.0, hi = guess + 6.0;
    auto dist_at = [&](double s) {
        return cover_distance(Point(geo.repelling, geo.attracting, s), v);
    };
    for (int it = 0; it < 120; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (dist_at(m1) <= dist_at(m2))
            hi = m2;
        else
            lo = m1;
    }
    Point periodic(geo.repelling, geo.attracting, 0.5 * (lo + hi));

    GeodesicClosingResult result{geo, GroupElement{best_m, best_word}, best,
                                 std::abs(geo.length - t), {}};
    const double samples[] = {0.0, t / 4.0, t / 2.0, 3.0 * t / 4.0, std::min(t, geo.length)};
    for (double s : samples)
        result.shadow.emplace_back(
            s, quotient_distance(evolve(periodic, s), evolve(v, s), search_radius));
    return result;
}

bool SchottkyFlow::boundary_point_in_limit_refinement(BoundaryPoint xi, int depth) const {
    for (int step = 0; step < depth; ++step) {
        int found = 0;
        for (int i = 1; i <= rank(); ++i) {
            for (int letter : {i, -i}) {
                if (letter_image_disk(letter).boundary_arc().contains(xi)) {
                    found = letter;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) return false;
        xi = apply_mobius(letter_matrix(-found), xi);
    }
    return true;
}

bool SchottkyFlow::nonwandering_membership(const Point& v, int depth) const {
    if (depth < 1) throw std::invalid_argument("nonwandering_membership: depth must be positive");
    return boundary_point_in_limit_refinement(v.forward, depth) &&
           boundary_point_in_limit_refinement(v.backward, depth);
}

Mat2 SchottkyFlow::fold_matrix(std::complex<double> z) const {
    Mat2 acc = Mat2::identity();
    for (int guard = 0; guard < 4096; ++guard) {
        int inside = -1;
        for (size_t k = 0; k < disks_.size(); ++k)
            if (disks_[k].contains(z, 1e-13)) {
                inside = static_cast<int>(k);
                break;
            }
        if (inside < 0) return acc;
        // strip the leading letter of the address: target disks undo with the
        // inverse generator, source disks with the generator itself
        Mat2 m = (inside % 2 == 1) ? generators_[static_cast<size_t>(inside / 2)].inverse()
                                   : generators_[static_cast<size_t>(inside / 2)];
        z = apply_mobius(m, z);
        acc = m * acc;
    }
    throw std::runtime_error("fold: reduction did not terminate");
}

SchottkyFlow::FoldResult SchottkyFlow::fold(const Point& v) const {
    Frame f = frame_of(v);
    Mat2 m = fold_matrix(f.position);
    std::complex<double> den = m.c * f.position + std::complex<double>(m.d, 0.0);
    // conformal maps rotate directions by the argument of the derivative
    double angle = wrap_angle(f.angle - 2.0 * std::arg(den));
    return FoldResult{apply_mobius(m, f.position), angle, m};
}

double SchottkyFlow::distance_to_walls(std::complex<double> z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : disks_) {
        GeodesicChart wall(BoundaryPoint::real(d.center - d.radius),
                           BoundaryPoint::real(d.center + d.radius));
        double t = wall.nearest_param(z);
        best = std::min(best, hyperbolic_distance(z, wall.point(t)));
    }
    return best;
}

std::vector<ClosedGeodesic> SchottkyFlow::closed_geodesics_up_to_word_length(
    int max_word_length) const {
    if (max_word_length < 1)
        throw std::invalid_argument("closed_geodesics: word length must be positive");
    auto letter_index = [](int letter) { return 2 * (std::abs(letter) - 1) + (letter < 0); };
    auto canonical = [&](const std::vector<int>& w) {
        std::vector<int> best = w, cur = w;
        auto less = [&](const std::vector<int>& x, const std::vector<int>& y) {
            for (size_t i = 0; i < x.size(); ++i) {
                if (letter_index(x[i]) != letter_index(y[i]))
                    return letter_index(x[i]) < letter_index(y[i]);
            }
            return false;
        };
        for (size_t i = 1; i < w.size(); ++i) {
            std::rotate(cur.begin(), cur.begin() + 1, cur.end());
            if (less(cur, best)) best = cur;
        }
        return best;
    };
    std::vector<ClosedGeodesic> out;
    std::vector<int> word;
    auto rec = [&](auto&& self) -> void {
        if (!word.empty() && word.front() != -word.back()) {
            std::vector<int> canon = canonical(word);
            if (canon == word) out.push_back(closed_geodesic_from_word(word));
        }
        if (static_cast<int>(word.size()) == max_word_length) return;
        for (int i = 1; i <= rank(); ++i)
            for (int letter : {i, -i}) {
                if (!word.empty() && word.back() == -letter) continue;
                word.push_back(letter);
                self(self);
                word.pop_back();
            }
    };
    rec(rec);
    std::sort(out.begin(), out.end(), [](const ClosedGeodesic& a, const ClosedGeodesic& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.element.word < b.element.word;
    });
    return out;
}

}  // namespace orbitglue
