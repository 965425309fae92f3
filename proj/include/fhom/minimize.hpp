#ifndef FHOM_MINIMIZE_HPP
#define FHOM_MINIMIZE_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhom/functional.hpp"

namespace fhom {

struct IterRecord {
    int iter;
    double energy;
    double grad_norm;
    double step;
};

struct MinimizeResult {
    Eigen::VectorXd x_free;
    double energy = 0;  // unregularized energy of the minimizer
    bool converged = false;
    int iterations = 0;
    std::vector<IterRecord> history;
    std::string message;
};

struct MinimizeOptions {
    double tol = 1e-10;
    int max_iter = 100;
    std::optional<Eigen::VectorXd> x0;
};

namespace detail {

//! SPD solve: sparse factorization at desk scale, preconditioned CG above.
inline Eigen::VectorXd spd_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs) {
    if (K.rows() < 200000) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd x = ldlt.solve(rhs);
            if (ldlt.info() == Eigen::Success) return x;
        }
    }
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg(K);
    cg.setTolerance(1e-13);
    cg.setMaxIterations(20 * K.rows());
    Eigen::VectorXd x = cg.solve(rhs);
    if (cg.info() != Eigen::Success) throw std::runtime_error("linear solve failed (CG did not converge)");
    return x;
}

}  // namespace detail

inline MinimizeResult minimize(const EnergyFunctional& F, const MinimizeOptions& opts = {}) {
    MinimizeResult res;
    const int n = F.n_free();
    Eigen::VectorXd x = opts.x0.value_or(Eigen::VectorXd::Zero(n));
    if (x.size() != n) throw std::invalid_argument("minimize: x0 dimension mismatch");

    if (F.quadratic()) {
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
        Eigen::SparseMatrix<double> H = F.hessian(zero);
        Eigen::VectorXd g = F.gradient(zero);
        x = detail::spd_solve(H, -g);
        res.x_free = x;
        res.energy = F.energy(x);
        res.converged = true;
        res.iterations = 1;
        res.history.push_back({1, res.energy, F.gradient(x).norm(), 1.0});
        return res;
    }

    const double Eref = 1 + std::abs(F.energy_smooth(Eigen::VectorXd::Zero(n)));
    double E = F.energy_smooth(x);
    Eigen::VectorXd g = F.gradient(x);
    res.history.push_back({0, E, g.norm(), 0.0});

    for (int it = 1; it <= opts.max_iter; ++it) {
        Eigen::SparseMatrix<double> H = F.hessian(x);
        Eigen::VectorXd d;
        try {
            d = detail::spd_solve(H, -g);
        } catch (const std::runtime_error&) {
            d = -g;
        }
        double slope = g.dot(d);
        bool newton_dir = slope < 0;
        if (!newton_dir) {
            d = -g;
            slope = -g.squaredNorm();
        }
        // Newton decrement: -slope = g^T H^-1 g bounds twice the remaining
        // descent; affine-invariant, robust near the floating-point floor.
        if (newton_dir && -slope < opts.tol * (1 + std::abs(E))) {
            res.converged = true;
            res.iterations = it - 1;
            break;
        }

        double t = 1.0, Enew = 0;
        Eigen::VectorXd xnew;
        bool ok = false;
        for (int ls = 0; ls < 50; ++ls) {
            xnew = x + t * d;
            Enew = F.energy_smooth(xnew);
            if (Enew <= E + 1e-4 * t * slope) {
                ok = true;
                break;
            }
            t /= 2;
        }
        if (!ok) {
            res.x_free = x;
            res.energy = F.energy(x);
            res.iterations = it;
            // stalled at the floating-point energy floor with a tiny decrement
            if (newton_dir && -slope < 1e-7 * (1 + std::abs(E)))
                res.converged = true;
            else
                res.message = "line search stalled";
            return res;
        }
        if (Enew > E + 1e-12 * (1 + std::abs(E)))
            throw std::runtime_error("minimize: energy increased (line search contract violated)");

        x = xnew;
        double Eprev = E;
        E = Enew;
        g = F.gradient(x);
        res.history.push_back({it, E, g.norm(), t});
        res.iterations = it;

        if (std::abs(Eprev - E) < opts.tol * (1 + std::abs(E)) && g.norm() < opts.tol * Eref) {
            res.converged = true;
            break;
        }
    }
    res.x_free = x;
    res.energy = F.energy(x);
    if (!res.converged && res.message.empty())
        res.message = "max_iter exceeded; residual history attached";
    return res;
}

//! Convenience: assemble and minimize, with p=2 continuation for p != 2.
inline MinimizeResult minimize_problem(const Mesh2D& mesh, const EnergyDensity& f,
                                       const ConstraintSet& cs,
                                       const StrainOffset& offset = StrainOffset::none(),
                                       const MinimizeOptions& opts = {}) {
    EnergyFunctional F(mesh, f, cs, offset);
    if (F.quadratic() || opts.x0.has_value()) return minimize(F, opts);
    EnergyFunctional F2(mesh, f.quadratic_surrogate(), cs, offset);
    MinimizeResult warm = minimize(F2);
    MinimizeOptions o = opts;
    o.x0 = warm.x_free;
    return minimize(F, o);
}

//! Shared-factorization path for quadratic densities: many rigid-motion data
//! sets on one mesh reuse a single stiffness factorization (the reduction
//! matrix P depends only on which DOFs are constrained, not on their values).
class QuadraticPath {
public:
    QuadraticPath(const Mesh2D& mesh, const EnergyDensity& f, const ConstraintSet& cs_template)
        : mesh_(&mesh), cs_(cs_template), F_(mesh, f, cs_template) {
        if (!F_.quadratic()) throw std::invalid_argument("QuadraticPath: density must be quadratic");
        Hfull_ = F_.full_hessian(Eigen::VectorXd::Zero(F_.cmap().n_full()));
        K_ = F_.cmap().P.transpose() * Hfull_ * F_.cmap().P;
        ldlt_.compute(K_);
        if (ldlt_.info() != Eigen::Success) throw std::runtime_error("QuadraticPath: factorization failed");
    }

    //! Solve with replaced rigid data; returns (value, full minimizer).
    std::pair<double, Eigen::VectorXd> solve(const RigidData& rd) const {
        return solve_with(rd, cs_.mean_integral_target);
    }

    //! Same, also replacing the mean-constraint target (constraint patterns and
    //! hence the reduced stiffness are unchanged; only the affine shift moves).
    std::pair<double, Eigen::VectorXd> solve_with(const RigidData& rd,
                                                  const Eigen::Vector3d& mean_target) const {
        ConstraintSet cs = cs_;
        cs.rigid_inner = rd;
        cs.mean_integral_target = mean_target;
        ConstraintMap cm = ConstraintMap::build(*mesh_, cs);
        Eigen::VectorXd rhs = -(cm.P.transpose() * (Hfull_ * cm.b));
        Eigen::VectorXd x = ldlt_.solve(rhs);
        Eigen::VectorXd v = cm.full(x);
        return {0.5 * v.dot(Hfull_ * v), v};
    }

    const EnergyFunctional& functional() const { return F_; }

private:
    const Mesh2D* mesh_;
    ConstraintSet cs_;
    EnergyFunctional F_;
    Eigen::SparseMatrix<double> Hfull_, K_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace fhom

#endif
