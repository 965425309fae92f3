#ifndef FHOM_SYMMAT3_HPP
#define FHOM_SYMMAT3_HPP

#include <Eigen/Core>
#include <cmath>

namespace fhom {

//! Symmetric 3x3 matrix holding strain-rate values.
//!
//! Stored as the six independent entries. The vector form vec6() uses the
//! ordering (11,22,33,12,13,23) without engineering factors; the Frobenius
//! pairing dot() carries the factor 2 on off-diagonal entries.
struct SymMat3 {
    double m11 = 0, m22 = 0, m33 = 0, m12 = 0, m13 = 0, m23 = 0;

    static SymMat3 Zero() { return {}; }
    static SymMat3 Identity() { return {1, 1, 1, 0, 0, 0}; }

    static SymMat3 fromVec6(const Eigen::Matrix<double, 6, 1>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    Eigen::Matrix<double, 6, 1> vec6() const {
        Eigen::Matrix<double, 6, 1> v;
        v << m11, m22, m33, m12, m13, m23;
        return v;
    }
    Eigen::Matrix3d dense() const {
        Eigen::Matrix3d M;
        M << m11, m12, m13, m12, m22, m23, m13, m23, m33;
        return M;
    }

    double trace() const { return m11 + m22 + m33; }
    //! Frobenius inner product M:N.
    double dot(const SymMat3& o) const {
        return m11 * o.m11 + m22 * o.m22 + m33 * o.m33 +
               2 * (m12 * o.m12 + m13 * o.m13 + m23 * o.m23);
    }
    double squaredNorm() const { return dot(*this); }
    double norm() const { return std::sqrt(squaredNorm()); }

    SymMat3 operator+(const SymMat3& o) const {
        return {m11 + o.m11, m22 + o.m22, m33 + o.m33,
                m12 + o.m12, m13 + o.m13, m23 + o.m23};
    }
    SymMat3 operator-(const SymMat3& o) const {
        return {m11 - o.m11, m22 - o.m22, m33 - o.m33,
                m12 - o.m12, m13 - o.m13, m23 - o.m23};
    }
    SymMat3 operator*(double t) const {
        return {t * m11, t * m22, t * m33, t * m12, t * m13, t * m23};
    }
    SymMat3& operator+=(const SymMat3& o) { *this = *this + o; return *this; }
};

inline SymMat3 operator*(double t, const SymMat3& M) { return M * t; }

//! e_a (.) e_b := (e_a x e_b^T + e_b x e_a^T)/2 for the standard basis, 1-based.
inline SymMat3 sym_dyad(int a, int b) {
    SymMat3 M;
    double* entries[3][3] = {{&M.m11, &M.m12, &M.m13},
                             {&M.m12, &M.m22, &M.m23},
                             {&M.m13, &M.m23, &M.m33}};
    *entries[a - 1][b - 1] = (a == b) ? 1.0 : 0.5;
    return M;
}

}  // namespace fhom

#endif
