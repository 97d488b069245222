#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace vfnav {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double px, double py) : x(px), y(py) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline constexpr double norm_sq(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

// Counterclockwise perpendicular.
inline constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    return n > 0.0 ? a / n : Vec2{0.0, 0.0};
}

namespace detail {

// Error-free transformations used by the exact fallback of the geometric
// predicates. two_sum/two_prod represent a double-precision result together
// with its exact rounding error, which is enough head room here: inputs are
// plain doubles, so one round of double-double arithmetic evaluates the
// predicate determinants with relative error around 1e-31.
struct DD {
    double hi = 0.0;
    double lo = 0.0;
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    double e = std::fma(a, b, -p);
    return {p, e};
}

inline DD dd_add(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    double lo = a.lo + b.lo + s.lo;
    DD r = two_sum(s.hi, lo);
    return r;
}

inline DD dd_neg(DD a) { return {-a.hi, -a.lo}; }

inline DD dd_sub(DD a, DD b) { return dd_add(a, dd_neg(b)); }

inline DD dd_mul(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    DD r = two_sum(p.hi, lo);
    return r;
}

inline DD dd_from(double a) { return {a, 0.0}; }

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace detail

// Sign of the signed area of triangle (a, b, c): +1 counterclockwise,
// -1 clockwise, 0 collinear. Uses a floating-point filter and falls back to
// double-double arithmetic when the result is below the rounding-error bound.
inline int orient_sign(Vec2 a, Vec2 b, Vec2 c) {
    double detleft = (a.x - c.x) * (b.y - c.y);
    double detright = (a.y - c.y) * (b.x - c.x);
    double det = detleft - detright;

    double detsum;
    if (detleft > 0.0) {
        if (detright <= 0.0) return detail::sign_of(det);
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0) return detail::sign_of(det);
        detsum = -detleft - detright;
    } else {
        return detail::sign_of(det);
    }

    constexpr double kErrBound = 3.3306690738754716e-16; // (3 + 16 eps) eps
    if (det >= kErrBound * detsum || -det >= kErrBound * detsum) {
        return detail::sign_of(det);
    }

    using namespace detail;
    DD acx = two_sum(a.x, -c.x);
    DD bcx = two_sum(b.x, -c.x);
    DD acy = two_sum(a.y, -c.y);
    DD bcy = two_sum(b.y, -c.y);
    DD d = dd_sub(dd_mul(acx, bcy), dd_mul(acy, bcx));
    // Same tie region as in_circumcircle: exact collinearity must not read
    // as a noise-level sign.
    constexpr double kDDErrBound = 1e-25;
    double dv = d.hi + d.lo;
    if (std::abs(dv) <= kDDErrBound * detsum) return 0;
    return sign_of(dv);
}

inline double signed_area2(Vec2 a, Vec2 b, Vec2 c) {
    return cross(b - a, c - a);
}

inline double triangle_area(Vec2 a, Vec2 b, Vec2 c) {
    return 0.5 * std::abs(signed_area2(a, b, c));
}

// True when p lies strictly inside the circumcircle of counterclockwise
// triangle (a, b, c). Same filter + double-double fallback scheme as
// orient_sign.
inline bool in_circumcircle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    double adx = a.x - p.x, ady = a.y - p.y;
    double bdx = b.x - p.x, bdy = b.y - p.y;
    double cdx = c.x - p.x, cdy = c.y - p.y;

    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double alift = adx * adx + ady * ady;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double blift = bdx * bdx + bdy * bdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double clift = cdx * cdx + cdy * cdy;

    double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                 clift * (adxbdy - bdxady);

    double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                       (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                       (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    constexpr double kErrBound = 2.4424906541753444e-15; // (10 + 96 eps) eps
    if (det > kErrBound * permanent) return true;
    if (-det > kErrBound * permanent) return false;

    using namespace detail;
    DD dadx = two_sum(a.x, -p.x), dady = two_sum(a.y, -p.y);
    DD dbdx = two_sum(b.x, -p.x), dbdy = two_sum(b.y, -p.y);
    DD dcdx = two_sum(c.x, -p.x), dcdy = two_sum(c.y, -p.y);

    DD la = dd_add(dd_mul(dadx, dadx), dd_mul(dady, dady));
    DD lb = dd_add(dd_mul(dbdx, dbdx), dd_mul(dbdy, dbdy));
    DD lc = dd_add(dd_mul(dcdx, dcdx), dd_mul(dcdy, dcdy));

    DD mbc = dd_sub(dd_mul(dbdx, dcdy), dd_mul(dcdx, dbdy));
    DD mca = dd_sub(dd_mul(dcdx, dady), dd_mul(dadx, dcdy));
    DD mab = dd_sub(dd_mul(dadx, dbdy), dd_mul(dbdx, dady));

    DD r = dd_add(dd_add(dd_mul(la, mbc), dd_mul(lb, mca)), dd_mul(lc, mab));
    // The double-double value still carries rounding error around 1e-30
    // relative to the term magnitudes. Exactly cocircular points (rectangle
    // corners for instance) must read as "on the circle", not as noise, or
    // Lawson flipping can cycle. Anything below this bound counts as on.
    constexpr double kDDErrBound = 1e-25;
    double rv = r.hi + r.lo;
    if (std::abs(rv) <= kDDErrBound * permanent) return false;
    return rv > 0.0;
}

// Closest point to p on segment [a, b].
inline Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = norm_sq(ab);
    if (len2 <= 0.0) return a;
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return a + t * ab;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    return distance(p, closest_point_on_segment(p, a, b));
}

// Distance from p to the infinite line through a and b; falls back to point
// distance when a == b.
inline double line_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len = norm(ab);
    if (len <= 0.0) return distance(p, a);
    return std::abs(cross(ab, p - a)) / len;
}

// True when p lies on segment [a, b] (endpoints included), using exact
// collinearity and a coordinate range check.
inline bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
    if (orient_sign(a, b, p) != 0) return false;
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Proper crossing: the open segments (a, b) and (c, d) intersect in a single
// interior point. Touching at an endpoint or collinear overlap is not proper.
inline bool segments_cross_properly(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    int o1 = orient_sign(a, b, c);
    int o2 = orient_sign(a, b, d);
    int o3 = orient_sign(c, d, a);
    int o4 = orient_sign(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

// Any intersection, including endpoint touches and collinear overlap.
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_cross_properly(a, b, c, d)) return true;
    return on_segment(c, a, b) || on_segment(d, a, b) ||
           on_segment(a, c, d) || on_segment(b, c, d);
}

// Signed area of a simple polygon; positive for counterclockwise order.
inline double polygon_signed_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        Vec2 a = poly[i];
        Vec2 b = poly[(i + 1) % n];
        s += cross(a, b);
    }
    return 0.5 * s;
}

inline bool polygon_is_ccw(const std::vector<Vec2>& poly) {
    return polygon_signed_area(poly) > 0.0;
}

inline double polygon_boundary_distance(const std::vector<Vec2>& poly, Vec2 p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % n]));
    }
    return d;
}

enum class PolygonLocation { Inside, Boundary, Outside };

// Winding-number point location with an explicit boundary band: points within
// `boundary_eps` of an edge classify as Boundary regardless of side.
inline PolygonLocation locate_in_polygon(const std::vector<Vec2>& poly, Vec2 p,
                                         double boundary_eps = 1e-12) {
    if (polygon_boundary_distance(poly, p) <= boundary_eps) {
        return PolygonLocation::Boundary;
    }
    int winding = 0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        Vec2 a = poly[i];
        Vec2 b = poly[(i + 1) % n];
        if (a.y <= p.y) {
            if (b.y > p.y && orient_sign(a, b, p) > 0) ++winding;
        } else {
            if (b.y <= p.y && orient_sign(a, b, p) < 0) --winding;
        }
    }
    return winding != 0 ? PolygonLocation::Inside : PolygonLocation::Outside;
}

// True when no two non-adjacent edges intersect and no vertex repeats.
inline bool polygon_is_simple(const std::vector<Vec2>& poly) {
    std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (poly[i] == poly[j]) return false;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            Vec2 c = poly[j], d = poly[(j + 1) % n];
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                if (segments_cross_properly(a, b, c, d)) return false;
                // Adjacent edges may only share the common vertex.
                Vec2 shared = (j == i + 1) ? b : a;
                Vec2 far1 = (j == i + 1) ? a : b;
                Vec2 far2 = (j == i + 1) ? d : c;
                if (on_segment(far1, c, d) && !(far1 == shared)) return false;
                if (on_segment(far2, a, b) && !(far2 == shared)) return false;
            } else {
                if (segments_intersect(a, b, c, d)) return false;
            }
        }
    }
    return true;
}

} // namespace vfnav
