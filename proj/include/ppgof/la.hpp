#pragma once

#include <cmath>

namespace ppgof {

// 2-vectors indexed by the (shift, scale) parameter order.
struct vec2 {
    double c0 = 0.0;
    double c1 = 0.0;

    vec2& operator+=(const vec2& o) {
        c0 += o.c0;
        c1 += o.c1;
        return *this;
    }
};

inline vec2 operator+(vec2 a, const vec2& b) { return a += b; }
inline vec2 operator-(const vec2& a, const vec2& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
inline vec2 operator*(double s, const vec2& v) { return {s * v.c0, s * v.c1}; }

inline double dot(const vec2& a, const vec2& b) { return a.c0 * b.c0 + a.c1 * b.c1; }
inline double norm(const vec2& v) { return std::hypot(v.c0, v.c1); }

// Symmetric 2x2 matrix.
struct sym2 {
    double a00 = 0.0;
    double a01 = 0.0;
    double a11 = 0.0;

    double det() const { return a00 * a11 - a01 * a01; }
    double trace() const { return a00 + a11; }

    vec2 apply(const vec2& v) const {
        return {a00 * v.c0 + a01 * v.c1, a01 * v.c0 + a11 * v.c1};
    }

    // v' M v
    double quad(const vec2& v) const {
        return a00 * v.c0 * v.c0 + 2.0 * a01 * v.c0 * v.c1 + a11 * v.c1 * v.c1;
    }

    sym2 inverse() const {
        const double d = det();
        return {a11 / d, -a01 / d, a00 / d};
    }
};

}  // namespace ppgof
