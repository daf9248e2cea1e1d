#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitglue {

inline constexpr double kDetTol = 1e-12;

// Real 2x2 matrix acting on the upper half-plane by fractional-linear maps.
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inverse() const { return {d, -b, -c, a}; }  // det 1
    static Mat2 identity() { return {}; }

    // Rescale to determinant 1; input must have positive determinant.
    Mat2 normalized() const {
        double dt = det();
        if (!(dt > 0)) throw std::invalid_argument("Mat2: determinant must be positive");
        double s = std::sqrt(dt);
        return {a / s, b / s, c / s, d / s};
    }
    void check_unimodular() const {
        if (std::abs(det() - 1.0) > kDetTol)
            throw std::invalid_argument("Mat2: determinant " + std::to_string(det()) +
                                        " is not 1");
    }
};

// Point of the boundary circle R u {inf}, kept projectively: x = u/v, with
// infinity = (1, 0). Normalized to u^2 + v^2 = 1, v >= 0 (u = 1 at infinity).
struct BoundaryPoint {
    double u = 1, v = 0;

    BoundaryPoint() = default;
    BoundaryPoint(double uu, double vv) : u(uu), v(vv) { normalize(); }
    static BoundaryPoint infinity() { return {}; }
    static BoundaryPoint real(double x) { return {x, 1.0}; }

    void normalize() {
        double n = std::hypot(u, v);
        if (!(n > 0)) throw std::invalid_argument("BoundaryPoint: zero vector");
        u /= n;
        v /= n;
        if (v < 0 || (v == 0 && u < 0)) {
            u = -u;
            v = -v;
        }
    }
    bool is_infinity() const { return v < 1e-14; }
    double value() const {
        if (is_infinity()) throw std::domain_error("BoundaryPoint: point at infinity");
        return u / v;
    }
    // Angle of the Cayley image (x - i)/(x + i): a monotone chart on the
    // circle with infinity at 0 and 0 at pi.
    double angle() const {
        double t = -2.0 * std::atan2(v, u);
        if (t <= -M_PI) t += 2.0 * M_PI;
        if (t > M_PI) t -= 2.0 * M_PI;
        return t;
    }
    friend bool same_point(const BoundaryPoint& p, const BoundaryPoint& q, double tol = 1e-12) {
        return std::abs(p.u * q.v - p.v * q.u) <= tol;
    }
};

inline BoundaryPoint apply_mobius(const Mat2& m, const BoundaryPoint& p) {
    return BoundaryPoint(m.a * p.u + m.b * p.v, m.c * p.u + m.d * p.v);
}

// Action on the closed upper half-plane; z = infinity is not representable
// here, use the BoundaryPoint overload for boundary points.
inline std::complex<double> apply_mobius(const Mat2& m, std::complex<double> z) {
    return (m.a * z + m.b) / (m.c * z + m.d);
}

inline double hyperbolic_distance(std::complex<double> z, std::complex<double> w) {
    double num = std::norm(z - w);
    double den = 2.0 * z.imag() * w.imag();
    if (!(den > 0)) throw std::domain_error("hyperbolic_distance: points must be interior");
    return std::acosh(1.0 + num / den);
}

inline bool is_axial(const Mat2& m) { return std::abs(m.trace()) > 2.0 + kDetTol; }

// Distance by which an axial element translates along its axis.
inline double translation_length(const Mat2& m) {
    m.check_unimodular();
    if (!is_axial(m))
        throw std::invalid_argument("translation_length: element is not axial (|trace| = " +
                                    std::to_string(std::abs(m.trace())) + ")");
    return 2.0 * std::acosh(std::abs(m.trace()) / 2.0);
}

struct AxisEndpoints {
    BoundaryPoint attracting;
    BoundaryPoint repelling;
};

// Fixed points on the boundary, tagged by the derivative test: the attracting
// point is the eigendirection of the eigenvalue with |lambda| > 1.
inline AxisEndpoints axis_endpoints(const Mat2& m) {
    m.check_unimodular();
    if (!is_axial(m)) throw std::invalid_argument("axis_endpoints: element is not axial");
    double tr = m.trace();
    double s = std::sqrt(tr * tr - 4.0);
    double l1 = (tr + s) / 2.0;
    double l2 = (tr - s) / 2.0;
    if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);  // l1 dominant
    auto eigendir = [&](double lambda) {
        // rows of (m - lambda I) are proportional; take the better-conditioned one
        double r1u = m.a - lambda, r1v = m.b;
        double r2u = m.c, r2v = m.d - lambda;
        if (std::hypot(r1u, r1v) >= std::hypot(r2u, r2v))
            return BoundaryPoint(-r1v, r1u);
        return BoundaryPoint(-r2v, r2u);
    };
    return {eigendir(l1), eigendir(l2)};
}

// Counterclockwise arc from lo to hi in the circle chart of
// BoundaryPoint::angle. Mobius maps preserve the orientation, so images of
// arcs are arcs with mapped endpoints.
struct Arc {
    BoundaryPoint lo;
    BoundaryPoint hi;

    static double wrap_positive(double t) {
        while (t < 0) t += 2.0 * M_PI;
        while (t >= 2.0 * M_PI) t -= 2.0 * M_PI;
        return t;
    }
    double angular_length() const { return wrap_positive(hi.angle() - lo.angle()); }
    bool contains(const BoundaryPoint& p, double tol = 0.0) const {
        double len = angular_length();
        double pos = wrap_positive(p.angle() - lo.angle());
        return pos <= len + tol || pos >= 2.0 * M_PI - tol;
    }
    Arc image(const Mat2& m) const { return {apply_mobius(m, lo), apply_mobius(m, hi)}; }
};

// Unit-speed geodesic of the upper half-plane determined by ordered distinct
// boundary endpoints, with closed-form parametrization.
class GeodesicChart {
public:
    GeodesicChart(const BoundaryPoint& backward, const BoundaryPoint& forward) {
        if (same_point(backward, forward))
            throw std::invalid_argument("GeodesicChart: endpoints coincide");
        if (backward.is_infinity()) {
            kind_ = Kind::VerticalDown;
            x_ = forward.value();
        } else if (forward.is_infinity()) {
            kind_ = Kind::VerticalUp;
            x_ = backward.value();
        } else {
            double a = backward.value(), b = forward.value();
            kind_ = Kind::Circle;
            c_ = 0.5 * (a + b);
            r_ = 0.5 * std::abs(b - a);
            sign_ = (a < b) ? 1.0 : -1.0;
        }
    }

    std::complex<double> point(double t) const {
        switch (kind_) {
            case Kind::VerticalUp: return {x_, std::exp(t)};
            case Kind::VerticalDown: return {x_, std::exp(-t)};
            default: break;
        }
        double th = std::tanh(t), sc = 1.0 / std::cosh(t);
        return {c_ + sign_ * r_ * th, r_ * sc};
    }

    // Euclidean angle of the unit tangent; the chart is conformal so this is
    // the direction of the vector.
    double direction_angle(double t) const {
        switch (kind_) {
            case Kind::VerticalUp: return M_PI / 2.0;
            case Kind::VerticalDown: return -M_PI / 2.0;
            default: break;
        }
        double th = std::tanh(t), sc = 1.0 / std::cosh(t);
        return std::atan2(-th, sign_ * sc);
    }

    // Parameter of the point on the geodesic nearest to o.
    double nearest_param(std::complex<double> o) const {
        double ox = o.real(), oy = o.imag();
        switch (kind_) {
            case Kind::VerticalUp: {
                double D = (x_ - ox) * (x_ - ox) + oy * oy;
                return 0.5 * std::log(D);
            }
            case Kind::VerticalDown: {
                double D = (x_ - ox) * (x_ - ox) + oy * oy;
                return -0.5 * std::log(D);
            }
            default: break;
        }
        double A = (c_ - ox) * (c_ - ox) + r_ * r_ + oy * oy;
        double B = 2.0 * sign_ * (c_ - ox) * r_;
        return std::atanh(std::max(-1.0 + 1e-16, std::min(1.0 - 1e-16, -B / A)));
    }

    // Parameter of a point lying on the geodesic.
    double param_of(std::complex<double> z) const {
        switch (kind_) {
            case Kind::VerticalUp: return std::log(z.imag());
            case Kind::VerticalDown: return -std::log(z.imag());
            default: break;
        }
        double arg = sign_ * (z.real() - c_) / r_;
        arg = std::max(-1.0 + 1e-16, std::min(1.0 - 1e-16, arg));
        return std::atanh(arg);
    }

private:
    enum class Kind { Circle, VerticalUp, VerticalDown };
    Kind kind_;
    double c_ = 0, r_ = 1, x_ = 0, sign_ = 1;
};

// Busemann cocycle b_xi(z) - b_xi(o): zero at o, decreasing at unit speed
// along geodesics toward xi.
inline double busemann(const BoundaryPoint& xi, std::complex<double> z,
                       std::complex<double> o) {
    if (xi.is_infinity()) return std::log(o.imag()) - std::log(z.imag());
    double p = xi.value();
    double bz = std::log(std::norm(z - p) / z.imag());
    double bo = std::log(std::norm(o - p) / o.imag());
    return bz - bo;
}

// Group element: unimodular matrix together with a reduced word in the
// generators. Letters are +-(i+1) for generator i and its inverse.
struct GroupElement {
    Mat2 matrix;
    std::vector<int> word;
};

inline std::vector<int> reduce_word(std::vector<int> w) {
    std::vector<int> out;
    for (int letter : w) {
        if (letter == 0) throw std::invalid_argument("word letter 0 is not a generator");
        if (!out.empty() && out.back() == -letter)
            out.pop_back();
        else
            out.push_back(letter);
    }
    return out;
}

inline std::vector<int> cyclically_reduce_word(std::vector<int> w) {
    w = reduce_word(std::move(w));
    while (w.size() >= 2 && w.front() == -w.back()) {
        w.erase(w.begin());
        w.pop_back();
    }
    return w;
}

inline std::string letters_to_string(const std::vector<int>& w) {
    std::string s;
    for (int letter : w) {
        if (!s.empty()) s.push_back(' ');
        char base = static_cast<char>('a' + std::abs(letter) - 1);
        s.push_back(base);
        if (letter < 0) s += "^-1";
    }
    return s.empty() ? "e" : s;
}

}  // namespace orbitglue
