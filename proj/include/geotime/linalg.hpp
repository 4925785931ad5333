#ifndef GEOTIME_LINALG_HPP
#define GEOTIME_LINALG_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geotime {

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct pipeline_error : std::runtime_error {
    explicit pipeline_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }
/// Rotate by +90 degrees (counterclockwise).
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }
inline Vec2 normalized(const Vec2& a) {
    double n = norm(a);
    return n > 0.0 ? a / n : Vec2{0.0, 0.0};
}

/// Dense 2x2 matrix, row major.
struct Mat2 {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double a, double b) { return {a, 0.0, 0.0, b}; }

    Mat2 operator+(const Mat2& o) const { return {xx + o.xx, xy + o.xy, yx + o.yx, yy + o.yy}; }
    Mat2 operator-(const Mat2& o) const { return {xx - o.xx, xy - o.xy, yx - o.yx, yy - o.yy}; }
    Mat2 operator*(double s) const { return {xx * s, xy * s, yx * s, yy * s}; }
    Vec2 operator*(const Vec2& v) const { return {xx * v.x + xy * v.y, yx * v.x + yy * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {xx * o.xx + xy * o.yx, xx * o.xy + xy * o.yy,
                yx * o.xx + yy * o.yx, yx * o.xy + yy * o.yy};
    }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }
inline double det(const Mat2& m) { return m.xx * m.yy - m.xy * m.yx; }
inline double trace(const Mat2& m) { return m.xx + m.yy; }
inline Mat2 transpose(const Mat2& m) { return {m.xx, m.yx, m.xy, m.yy}; }

inline Mat2 inverse(const Mat2& m) {
    double d = det(m);
    if (std::abs(d) < 1e-300) throw domain_error("singular 2x2 matrix");
    double inv = 1.0 / d;
    return {m.yy * inv, -m.xy * inv, -m.yx * inv, m.xx * inv};
}

inline double frobenius(const Mat2& m) {
    return std::sqrt(m.xx * m.xx + m.xy * m.xy + m.yx * m.yx + m.yy * m.yy);
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::array<double, 2> sym_eigenvalues(const Mat2& m) {
    double half_tr = 0.5 * (m.xx + m.yy);
    double d = det(m);
    double gap = std::sqrt(std::max(0.0, half_tr * half_tr - d));
    return {half_tr - gap, half_tr + gap};
}

/// Eigen-decomposition of a symmetric 2x2 matrix: m = R diag(l) R^T with
/// R = [e1 e2] column-wise.
struct SymEig2 {
    std::array<double, 2> eval;
    Vec2 evec1, evec2;
};

inline SymEig2 sym_eigen(const Mat2& m) {
    SymEig2 out;
    out.eval = sym_eigenvalues(m);
    double b = 0.5 * (m.xy + m.yx);
    if (std::abs(b) < 1e-15 * (std::abs(m.xx) + std::abs(m.yy) + 1e-300)) {
        if (m.xx <= m.yy) {
            out.evec1 = {1.0, 0.0};
            out.evec2 = {0.0, 1.0};
        } else {
            out.evec1 = {0.0, 1.0};
            out.evec2 = {1.0, 0.0};
        }
        return out;
    }
    Vec2 v1{b, out.eval[0] - m.xx};
    if (norm(v1) < 1e-14 * std::abs(b)) v1 = {out.eval[0] - m.yy, b};
    out.evec1 = normalized(v1);
    out.evec2 = perp(out.evec1);
    return out;
}

inline bool is_spd(const Mat2& m, double floor_val = 0.0) {
    auto ev = sym_eigenvalues(m);
    return ev[0] > floor_val;
}

/// Clamp a symmetric matrix to be SPD by flooring its eigenvalues. Matrices
/// already above the floor pass through unchanged (the eigen splitting of a
/// near-degenerate spectrum would otherwise cost ~sqrt(eps) of precision).
inline Mat2 spd_floor(const Mat2& m, double floor_val) {
    if (sym_eigenvalues(m)[0] >= floor_val) return m;
    SymEig2 e = sym_eigen(m);
    double l1 = std::max(e.eval[0], floor_val);
    double l2 = std::max(e.eval[1], floor_val);
    const Vec2& u = e.evec1;
    const Vec2& v = e.evec2;
    return {l1 * u.x * u.x + l2 * v.x * v.x, l1 * u.x * u.y + l2 * v.x * v.y,
            l1 * u.x * u.y + l2 * v.x * v.y, l1 * u.y * u.y + l2 * v.y * v.y};
}

/// In-place Gaussian elimination with partial pivoting for small dense
/// systems (n <= 16). Returns false when the pivot collapses.
template <int N>
bool solve_dense(std::array<std::array<double, N>, N>& a, std::array<double, N>& b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(b[piv], b[col]);
        }
        double inv = 1.0 / a[col][col];
        for (int r = col + 1; r < N; ++r) {
            double f = a[r][col] * inv;
            if (f == 0.0) continue;
            for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int col = N - 1; col >= 0; --col) {
        double s = b[col];
        for (int c = col + 1; c < N; ++c) s -= a[col][c] * b[c];
        b[col] = s / a[col][col];
    }
    return true;
}

}  // namespace geotime

#endif  // GEOTIME_LINALG_HPP
