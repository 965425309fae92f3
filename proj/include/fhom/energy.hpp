#ifndef FHOM_ENERGY_HPP
#define FHOM_ENERGY_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "fhom/symmat3.hpp"

namespace fhom {

//! The planar symmetrized gradient e_y applied to local field data of an
//! R^3-valued field of two variables. J is the 3x2 Jacobian (row c = component,
//! column a = d/dy_a). The (3,3) slot is identically zero; planar rigid motions
//! a + t(-y2, y1, 0) are annihilated.
inline SymMat3 planar_sym_gradient(const Eigen::Matrix<double, 3, 2>& J) {
    SymMat3 M;
    M.m11 = J(0, 0);
    M.m22 = J(1, 1);
    M.m12 = 0.5 * (J(0, 1) + J(1, 0));
    M.m13 = 0.5 * J(2, 0);
    M.m23 = 0.5 * J(2, 1);
    M.m33 = 0;
    return M;
}

inline SymMat3 planar_sym_gradient(const Eigen::Vector3d& /*value*/,
                                   const Eigen::Matrix<double, 3, 2>& J) {
    return planar_sym_gradient(J);
}

//! Convex density on SymMat3 with p-growth.
//!
//! Kinds:
//!  - isotropic(lambda, mu): (lambda/2)(tr M)^2 + mu M:M, exponent 2
//!  - p_norm(c, p):          c |M|^p (Frobenius norm)
//!  - quadratic_form(A):     vec6(M)^T A vec6(M) in the ordering
//!                           (11,22,33,12,13,23); note vec6 carries the raw
//!                           off-diagonal entries, the engineering factor 2
//!                           lives in A (e.g. a pure-shear density 2 mu M12^2
//!                           needs A(3,3) = 2)
//!  - aniso_example:         sum_{a,b<=2} M_ab^2 + M13^2 + M33^2 + M13 M33 + M23^2
//!
//! For p != 2 the derivative path is regularized, c(d^2+|M|^2)^{p/2} - c d^p
//! with d = 1e-8; eval() always reports the unregularized energy.
class EnergyDensity {
public:
    enum class Kind { Isotropic, PNorm, QuadraticForm, AnisoExample };

    static EnergyDensity isotropic(double lambda, double mu) {
        if (lambda < 0 || mu <= 0) throw std::invalid_argument("isotropic: need lambda >= 0, mu > 0");
        Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
        A.topLeftCorner<3, 3>().setConstant(lambda / 2);
        A.diagonal() += (Eigen::Matrix<double, 6, 1>() << mu, mu, mu, 2 * mu, 2 * mu, 2 * mu).finished();
        EnergyDensity f(Kind::Isotropic, 2.0, A);
        f.lambda_ = lambda;
        f.mu_ = mu;
        return f;
    }

    static EnergyDensity p_norm(double c, double p) {
        if (c <= 0 || p <= 1) throw std::invalid_argument("p_norm: need c > 0, p > 1");
        EnergyDensity f(Kind::PNorm, p, Eigen::Matrix<double, 6, 6>::Zero());
        f.c_ = c;
        return f;
    }

    static EnergyDensity quadratic_form(const Eigen::Matrix<double, 6, 6>& A) {
        Eigen::Matrix<double, 6, 6> As = 0.5 * (A + A.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(As);
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-12 * scale)
            throw std::invalid_argument("quadratic_form: coefficient table is not positive semi-definite");
        return EnergyDensity(Kind::QuadraticForm, 2.0, As);
    }

    static EnergyDensity aniso_example() {
        Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
        A(0, 0) = 1;            // M11^2
        A(1, 1) = 1;            // M22^2
        A(3, 3) = 2;            // M12^2 + M21^2
        A(2, 2) = 1;            // M33^2
        A(4, 4) = 1;            // M13^2
        A(5, 5) = 1;            // M23^2
        A(2, 4) = A(4, 2) = 0.5;  // M13 M33
        return EnergyDensity(Kind::AnisoExample, 2.0, A);
    }

    Kind kind() const { return kind_; }
    double exponent() const { return p_; }
    bool is_quadratic() const { return kind_ != Kind::PNorm || p_ == 2.0; }
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }
    double weight() const { return c_; }
    const Eigen::Matrix<double, 6, 6>& table() const { return A_; }

    double eval(const SymMat3& M) const {
        if (kind_ == Kind::PNorm) return c_ * std::pow(M.squaredNorm(), p_ / 2);
        Eigen::Matrix<double, 6, 1> v = M.vec6();
        return v.dot(A_ * v);
    }

    //! Regularized energy, the objective the Newton solver actually descends.
    double eval_smooth(const SymMat3& M) const {
        if (kind_ == Kind::PNorm && p_ != 2.0)
            return c_ * std::pow(delta_ * delta_ + M.squaredNorm(), p_ / 2) -
                   c_ * std::pow(delta_, p_);
        return eval(M);
    }

    //! Frechet derivative G with df = G:H (Frobenius pairing).
    SymMat3 gradient(const SymMat3& M) const {
        if (kind_ == Kind::PNorm) {
            double u = (p_ == 2.0) ? 1.0 : delta_ * delta_ + M.squaredNorm();
            return (c_ * p_ * std::pow(u, p_ / 2 - 1)) * M;
        }
        return pairing_rep(2 * (A_ * M.vec6()));
    }

    SymMat3 hessian_action(const SymMat3& M, const SymMat3& H) const {
        if (kind_ == Kind::PNorm) {
            if (p_ == 2.0) return (2 * c_) * H;
            double u = delta_ * delta_ + M.squaredNorm();
            double a = c_ * p_ * std::pow(u, p_ / 2 - 1);
            double b = c_ * p_ * (p_ - 2) * std::pow(u, p_ / 2 - 2) * M.dot(H);
            return a * H + b * M;
        }
        return pairing_rep(2 * (A_ * H.vec6()));
    }

    //! f^{inf,p}: the recession density. Closed form per kind.
    EnergyDensity recession() const {
        if (kind_ == Kind::PNorm || p_ == 2.0) return *this;
        throw std::runtime_error("recession: no closed form for this kind");
    }

    //! g^{0,p}: the tangent density at zero. Closed form per kind.
    EnergyDensity tangent_at_zero() const {
        if (kind_ == Kind::PNorm || p_ == 2.0) return *this;
        throw std::runtime_error("tangent_at_zero: no closed form for this kind");
    }

    //! Growth constants (c, C) with c|M|^p <= f(M) <= C|M|^p.
    std::pair<double, double> growth_constants() const {
        if (kind_ == Kind::PNorm) return {c_, c_};
        Eigen::Matrix<double, 6, 1> d;
        d << 1, 1, 1, std::sqrt(2.0), std::sqrt(2.0), std::sqrt(2.0);
        Eigen::Matrix<double, 6, 6> B =
            d.cwiseInverse().asDiagonal() * A_ * d.cwiseInverse().asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(B);
        return {std::max(0.0, es.eigenvalues().minCoeff()), es.eigenvalues().maxCoeff()};
    }

    //! Quadratic companion used as Newton continuation start for p != 2.
    EnergyDensity quadratic_surrogate() const {
        if (is_quadratic()) return *this;
        return p_norm(c_, 2.0);
    }

    EnergyDensity scaled(double t) const {
        if (t <= 0) throw std::invalid_argument("scaled: need t > 0");
        EnergyDensity f = *this;
        f.c_ *= t;
        f.A_ *= t;
        f.lambda_ *= t;
        f.mu_ *= t;
        return f;
    }

private:
    EnergyDensity(Kind k, double p, const Eigen::Matrix<double, 6, 6>& A)
        : kind_(k), p_(p), A_(A) {}

    static SymMat3 pairing_rep(const Eigen::Matrix<double, 6, 1>& w) {
        return {w[0], w[1], w[2], w[3] / 2, w[4] / 2, w[5] / 2};
    }

    Kind kind_;
    double p_;
    Eigen::Matrix<double, 6, 6> A_;
    double lambda_ = 0, mu_ = 0, c_ = 0;
    static constexpr double delta_ = 1e-8;
};

}  // namespace fhom

#endif
