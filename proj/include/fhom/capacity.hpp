#ifndef FHOM_CAPACITY_HPP
#define FHOM_CAPACITY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "fhom/cross_section.hpp"
#include "fhom/mesh.hpp"
#include "fhom/minimize.hpp"

namespace fhom {

struct CapacityQuery {
    EnergyDensity f = EnergyDensity::isotropic(1.0, 1.0);
    CrossSection S = unit_disc();
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    double zeta = 0;
    double R = 4.0;                 // outer domain R*D
    double h = 0.05;
    Grading grading = Grading::Log;
    double grading_ratio = 1.3;
};

struct CapacityResult {
    double value = 0;
    MinimizeResult min;
    double mesh_h = 0;
    double domain_R = 0;
    int n_free = 0;
};

inline ConstraintSet capacity_constraint_set(const Eigen::Vector3d& a, double zeta, double diamS) {
    ConstraintSet cs;
    cs.dirichlet_outer = true;
    cs.rigid_inner = RigidData{a, zeta, diamS};
    return cs;
}

//! cap on a prebuilt mesh; diamS must be the analytic diameter of S.
inline CapacityResult capacity_on_mesh(const EnergyDensity& f, const Mesh2D& mesh,
                                       const Eigen::Vector3d& a, double zeta, double diamS,
                                       const MinimizeOptions& opts = {}) {
    CapacityResult res;
    res.min = minimize_problem(mesh, f, capacity_constraint_set(a, zeta, diamS),
                               StrainOffset::none(), opts);
    if (!res.min.converged)
        throw std::runtime_error("capacity: solver did not converge: " + res.min.message);
    res.value = res.min.energy;
    res.mesh_h = mesh.target_h;
    res.n_free = static_cast<int>(res.min.x_free.size());
    return res;
}

inline CapacityResult capacity(const CapacityQuery& q) {
    Mesh2D mesh = mesh_annulus(q.S, q.R, q.h, q.grading, q.grading_ratio);
    CapacityResult res = capacity_on_mesh(q.f, mesh, q.a, q.zeta, q.S.diameter);
    res.domain_R = q.R;
    return res;
}

struct ScaledCapacityP2 {
    double value = 0;    // |log r| * cap(a, 0; rS, R D)
    double raw_cap = 0;  // cap on the reference annulus S in (R/r) D
    bool admissibility_warning = false;
};

//! c^{f,S}_{r,R}(a) for p = 2: by 2-homogeneity and geometric scale invariance
//! the capacity equals its value on the reference annulus S inside (R/r) D.
inline ScaledCapacityP2 scaled_capacity_p2(const EnergyDensity& f, const CrossSection& S,
                                           double r, double R, const Eigen::Vector3d& a,
                                           double h = 0.02, double grading_ratio = 1.12) {
    if (f.exponent() != 2.0) throw std::invalid_argument("scaled_capacity_p2: requires p = 2");
    if (!(r > 0 && r < R && R < 1)) throw std::invalid_argument("scaled_capacity_p2: need 0 < r < R < 1");
    ScaledCapacityP2 out;
    out.admissibility_warning = R * std::sqrt(std::abs(std::log(r))) > 1.0;
    Mesh2D mesh = mesh_annulus(S, R / r, h, Grading::Log, grading_ratio);
    out.raw_cap = capacity_on_mesh(f, mesh, a, 0, S.diameter).value;
    out.value = std::abs(std::log(r)) * out.raw_cap;
    return out;
}

struct PlaneLimitResult {
    double limit = 0;
    double error_estimate = 0;
    std::vector<double> R_ladder;
    std::vector<double> values;
};

//! cap^{f^{inf,p}}(a, zeta e3; S, R^2) for 1 < p < 2 by a growing-domain
//! ladder with Richardson (Aitken) extrapolation.
inline PlaneLimitResult capacity_plane_limit(const EnergyDensity& f, const CrossSection& S,
                                             const Eigen::Vector3d& a, double zeta,
                                             std::vector<double> R_ladder = {4, 8, 16, 32},
                                             double h = 0.05, const MinimizeOptions& opts = {}) {
    if (f.exponent() >= 2) throw std::invalid_argument("capacity_plane_limit: requires p < 2");
    EnergyDensity finf = f.recession();
    std::sort(R_ladder.begin(), R_ladder.end());
    PlaneLimitResult out;
    out.R_ladder = R_ladder;
    for (double R : R_ladder) {
        Mesh2D mesh = mesh_annulus(S, R, h, Grading::Log, 1.3);
        out.values.push_back(capacity_on_mesh(finf, mesh, a, zeta, S.diameter, opts).value);
    }
    double scale = std::abs(out.values.front()) + 1e-30;
    for (size_t i = 1; i < out.values.size(); ++i)
        if (out.values[i] > out.values[i - 1] + 1e-8 * scale)
            throw std::runtime_error("capacity_plane_limit: values not monotone in R");
    size_t n = out.values.size();
    out.limit = out.values.back();
    out.error_estimate = n >= 2 ? out.values[n - 2] - out.values[n - 1] : 0;
    if (n >= 3) {
        double d1 = out.values[n - 2] - out.values[n - 3];
        double d2 = out.values[n - 1] - out.values[n - 2];
        if (std::abs(d1 - d2) > 1e-14 * scale && d1 * d2 > 0) {
            double extrap = out.values[n - 1] - d2 * d2 / (d1 - d2);
            if (std::abs(d2 / d1) < 1.0) {
                out.limit = extrap;
                out.error_estimate = std::abs(out.values[n - 1] - extrap);
            }
        }
    }
    return out;
}

struct DecayReport {
    std::vector<double> R_ladder;
    std::vector<double> values;          // translation channel cap(a,0;D,RD)
    double fitted_slope = 0;             // log cap vs log (R^s-1)^{p-1}; ~ -1 expected
    std::vector<double> torsion_values;  // cap(0,zeta;D,RD) at the ladder ends
};

//! Stokes-paradox decay study for p > 2: the translation capacity vanishes as
//! R grows like the radial closed form; the torsion channel is only observed.
inline DecayReport capacity_decay_p_gt2(const EnergyDensity& f, const Eigen::Vector3d& a,
                                        std::vector<double> R_ladder = {2, 4, 8, 16, 32},
                                        double h = 0.05, double zeta_probe = 1.0) {
    double p = f.exponent();
    if (p <= 2) throw std::invalid_argument("capacity_decay_p_gt2: requires p > 2");
    std::sort(R_ladder.begin(), R_ladder.end());
    CrossSection D = unit_disc();
    DecayReport out;
    out.R_ladder = R_ladder;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double s = (p - 2) / (p - 1);
    for (double R : R_ladder) {
        Mesh2D mesh = mesh_annulus(D, R, h, Grading::Log, 1.3);
        double v = capacity_on_mesh(f, mesh, a, 0, 2.0).value;
        out.values.push_back(v);
        double x = std::log(std::pow(std::pow(R, s) - 1, p - 1));
        double y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double n = static_cast<double>(R_ladder.size());
    out.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    for (double R : {R_ladder.front(), R_ladder.back()}) {
        Mesh2D mesh = mesh_annulus(D, R, h, Grading::Log, 1.3);
        out.torsion_values.push_back(capacity_on_mesh(f, mesh, {0, 0, 0}, zeta_probe, 2.0).value);
    }
    return out;
}

//! The limit capacity density c^f(a, zeta) in its three exponent branches.
//!
//!  p < 2 : gamma^(p) cap^{f^inf,p}(a, zeta e3; S, R^2); stored as the exactly
//!          p-homogeneous SPD-form surrogate gamma (x^T Q x)^{p/2} fitted to
//!          plane-limit solves (x = (a, zeta))
//!  p = 2 : gamma^(2) a^T C0 a for zeta = 0, +infinity otherwise
//!  p > 2 : indicator of (0,0)
class CapacityDensity {
public:
    enum class Branch { PLessTwo, PTwo, PGreaterTwo };

    static CapacityDensity from_power_form(const Eigen::Matrix4d& Q, double gamma, double p,
                                           double fit_residual = 0) {
        CapacityDensity d;
        d.branch_ = Branch::PLessTwo;
        d.p_ = p;
        d.gamma_ = gamma;
        d.Q_ = 0.5 * (Q + Q.transpose());
        d.fit_residual_ = fit_residual;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(d.Q_);
        if (es.eigenvalues().minCoeff() <= 0)
            throw std::invalid_argument("CapacityDensity: surrogate form must be positive definite");
        return d;
    }

    static CapacityDensity from_quadratic(const Eigen::Matrix3d& C0, double gamma) {
        CapacityDensity d;
        d.branch_ = Branch::PTwo;
        d.p_ = 2;
        d.gamma_ = gamma;
        d.C0_ = 0.5 * (C0 + C0.transpose());
        return d;
    }

    static CapacityDensity indicator(double p) {
        CapacityDensity d;
        d.branch_ = Branch::PGreaterTwo;
        d.p_ = p;
        return d;
    }

    Branch branch() const { return branch_; }
    double exponent() const { return p_; }
    double gamma() const { return gamma_; }
    const Eigen::Matrix3d& quadratic_matrix() const { return C0_; }
    const Eigen::Matrix4d& power_form() const { return Q_; }
    double fit_residual() const { return fit_residual_; }

    bool finite(const Eigen::Vector3d& a, double zeta) const {
        switch (branch_) {
            case Branch::PLessTwo: return true;
            case Branch::PTwo: return zeta == 0;
            case Branch::PGreaterTwo: return a.norm() == 0 && zeta == 0;
        }
        return false;
    }

    double eval(const Eigen::Vector3d& a, double zeta) const {
        if (!finite(a, zeta)) return std::numeric_limits<double>::infinity();
        if (branch_ == Branch::PGreaterTwo) return 0;
        if (branch_ == Branch::PTwo) return gamma_ * a.dot(C0_ * a);
        Eigen::Vector4d x(a.x(), a.y(), a.z(), zeta);
        return gamma_ * std::pow(x.dot(Q_ * x), p_ / 2);
    }

    //! d/d(a,zeta) of eval on the finite branch (p=2: zeta slot is 0-only).
    Eigen::Vector4d gradient(const Eigen::Vector3d& a, double zeta) const {
        if (branch_ == Branch::PGreaterTwo) return Eigen::Vector4d::Zero();
        if (branch_ == Branch::PTwo) {
            Eigen::Vector4d g = Eigen::Vector4d::Zero();
            g.head<3>() = 2 * gamma_ * (C0_ * a);
            return g;
        }
        Eigen::Vector4d x(a.x(), a.y(), a.z(), zeta);
        double q = x.dot(Q_ * x);
        if (q <= 0) return Eigen::Vector4d::Zero();
        return gamma_ * p_ * std::pow(q, p_ / 2 - 1) * (Q_ * x);
    }

    Eigen::Matrix4d hessian(const Eigen::Vector3d& a, double zeta, double reg = 1e-12) const {
        if (branch_ == Branch::PGreaterTwo) return Eigen::Matrix4d::Zero();
        if (branch_ == Branch::PTwo) {
            Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
            H.topLeftCorner<3, 3>() = 2 * gamma_ * C0_;
            return H;
        }
        Eigen::Vector4d x(a.x(), a.y(), a.z(), zeta);
        double q = x.dot(Q_ * x) + reg;
        Eigen::Vector4d Qx = Q_ * x;
        return gamma_ * p_ * std::pow(q, p_ / 2 - 1) * Q_ +
               gamma_ * p_ * (p_ - 2) * std::pow(q, p_ / 2 - 2) * (Qx * Qx.transpose());
    }

private:
    Branch branch_ = Branch::PTwo;
    double p_ = 2;
    double gamma_ = 1;
    Eigen::Matrix3d C0_ = Eigen::Matrix3d::Zero();
    Eigen::Matrix4d Q_ = Eigen::Matrix4d::Identity();
    double fit_residual_ = 0;
};

struct DensityLadderOptions {
    // p = 2 sequence r_k = 2^-k, R_k = 1/log(1/r_k)
    int k_min = 6, k_max = 11;
    double h2 = 0.04;
    // p < 2 plane-limit ladder
    std::vector<double> R_ladder = {4, 8, 16, 32};
    double h_lt2 = 0.06;
};

namespace detail {

//! Asymptotic constant of a p=2 ladder: cap ~ A / (L + B) with L = log(R/r),
//! recovered as 1/slope of the affine fit of 1/cap against L.
inline double ladder_limit_p2(const std::vector<double>& L, const std::vector<double>& cap) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(L.size());
    for (size_t i = 0; i < L.size(); ++i) {
        sx += L[i]; sy += 1 / cap[i]; sxx += L[i] * L[i]; sxy += L[i] / cap[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return 1 / slope;
}

}  // namespace detail

//! Extrapolated p=2 density constant lim |log r| cap(a, 0; rS, R_r D) along
//! the standard ladder.
inline double p2_density_constant(const EnergyDensity& f, const CrossSection& S,
                                  const Eigen::Vector3d& a, const DensityLadderOptions& opt = {},
                                  double grading_ratio = 1.12) {
    std::vector<double> L, cap;
    for (int k = opt.k_min; k <= opt.k_max; ++k) {
        double r = std::pow(2.0, -k);
        double R = 1 / std::log(1 / r);
        Mesh2D mesh = mesh_annulus(S, R / r, opt.h2, Grading::Log, grading_ratio);
        cap.push_back(capacity_on_mesh(f, mesh, a, 0, S.diameter).value);
        L.push_back(std::log(R / r));
    }
    return detail::ladder_limit_p2(L, cap);
}

struct RegimeInput {
    double p = 2;
    double gamma_p = 1;  // finite positive for the p <= 2 branches
};

inline CapacityDensity capacity_density(const EnergyDensity& f, const CrossSection& S,
                                        const RegimeInput& regime,
                                        const DensityLadderOptions& opt = {}) {
    double p = f.exponent();
    if (p != regime.p) throw std::invalid_argument("capacity_density: regime exponent mismatch");
    if (p > 2) return CapacityDensity::indicator(p);
    if (!(regime.gamma_p > 0) || !std::isfinite(regime.gamma_p))
        throw std::invalid_argument("capacity_density: need finite positive gamma^(p)");

    if (p == 2) {
        Eigen::Vector3d e[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        Eigen::Matrix3d C0;
        double diag[3];
        for (int i = 0; i < 3; ++i) diag[i] = p2_density_constant(f, S, e[i], opt);
        for (int i = 0; i < 3; ++i) C0(i, i) = diag[i];
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                double mixed = p2_density_constant(f, S, e[i] + e[j], opt);
                C0(i, j) = C0(j, i) = 0.5 * (mixed - diag[i] - diag[j]);
            }
        return CapacityDensity::from_quadratic(C0, regime.gamma_p);
    }

    // p < 2: fit the SPD form Q from 10 plane-limit directions
    std::vector<Eigen::Vector4d> dirs = {
        {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1},
        {1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1},
        {0, 1, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 1}};
    Eigen::MatrixXd Amat(dirs.size(), 10);
    Eigen::VectorXd rhs(dirs.size());
    for (size_t d = 0; d < dirs.size(); ++d) {
        const Eigen::Vector4d& x = dirs[d];
        double v = capacity_plane_limit(f, S, x.head<3>(), x[3], opt.R_ladder, opt.h_lt2).limit;
        rhs[d] = std::pow(v, 2.0 / p);
        int col = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j)
                Amat(d, col++) = (i == j ? 1.0 : 2.0) * x[i] * x[j];
    }
    Eigen::VectorXd qvec = Amat.colPivHouseholderQr().solve(rhs);
    double resid = (Amat * qvec - rhs).norm() / rhs.norm();
    Eigen::Matrix4d Q;
    int col = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            Q(i, j) = Q(j, i) = qvec[col++];
        }
    return CapacityDensity::from_power_form(Q, regime.gamma_p, p, resid);
}

}  // namespace fhom

#endif
