#ifndef FHOM_FUNCTIONAL_HPP
#define FHOM_FUNCTIONAL_HPP

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <stdexcept>
#include <vector>

#include "fhom/constraints.hpp"
#include "fhom/energy.hpp"
#include "fhom/mesh.hpp"
#include "fhom/symmat3.hpp"

namespace fhom {

//! Affine-in-y strain offset M0(y) = C0 + y1 C1 + y2 C2 added to e_y(psi)
//! before the density is evaluated (cell-problem load operators).
struct StrainOffset {
    SymMat3 C0, C1, C2;
    bool zero = true;

    static StrainOffset none() { return {}; }
    static StrainOffset affine(const SymMat3& c0, const SymMat3& c1 = {}, const SymMat3& c2 = {}) {
        StrainOffset o;
        o.C0 = c0;
        o.C1 = c1;
        o.C2 = c2;
        o.zero = false;
        return o;
    }
    SymMat3 at(const Eigen::Vector2d& y) const { return C0 + y.x() * C1 + y.y() * C2; }
};

//! Discrete energy psi -> int f(e_y(psi) + M0) over a Mesh2D with linear
//! elements, reduced to free DOFs through a ConstraintMap.
//!
//! Quadrature: one centroid point when no offset is present (the strain is
//! piecewise constant, so this is exact for quadratic f); the three
//! edge-midpoint points otherwise (exact for quadratic integrands in y).
class EnergyFunctional {
public:
    EnergyFunctional(const Mesh2D& mesh, const EnergyDensity& f, const ConstraintSet& cs,
                     const StrainOffset& offset = StrainOffset::none())
        : mesh_(&mesh), f_(f), offset_(offset), cs_(cs), cmap_(ConstraintMap::build(mesh, cs)) {
        if (!cs.kills_null_space())
            throw std::invalid_argument(
                "assemble_energy: unconstrained rigid-motion null space (add dirichlet, rigid, or "
                "mean_zero constraints)");
        build_tables();
    }

    int n_free() const { return cmap_.n_free(); }
    const ConstraintMap& cmap() const { return cmap_; }
    const EnergyDensity& density() const { return f_; }
    const Mesh2D& mesh() const { return *mesh_; }
    bool quadratic() const { return f_.is_quadratic(); }
    double domain_area() const { return total_area_; }

    double energy(const Eigen::VectorXd& x_free) const { return energy_full(cmap_.full(x_free), false); }
    double energy_smooth(const Eigen::VectorXd& x_free) const { return energy_full(cmap_.full(x_free), true); }

    Eigen::VectorXd gradient(const Eigen::VectorXd& x_free) const {
        return cmap_.P.transpose() * full_gradient(cmap_.full(x_free));
    }

    Eigen::SparseMatrix<double> hessian(const Eigen::VectorXd& x_free) const {
        Eigen::SparseMatrix<double> H = full_hessian(cmap_.full(x_free));
        return cmap_.P.transpose() * H * cmap_.P;
    }

    // --- full-space pieces (shared-factorization paths in capacity/cell) ---

    double energy_full(const Eigen::VectorXd& v, bool smooth) const {
        double E = 0;
        for (const Tri& t : tris_)
            for (int q = 0; q < nq_; ++q) {
                SymMat3 M = strain_at(t, q, v);
                E += t.wq[q] * (smooth ? f_.eval_smooth(M) : f_.eval(M));
            }
        return E;
    }

    Eigen::VectorXd full_gradient(const Eigen::VectorXd& v) const {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
        for (const Tri& t : tris_)
            for (int q = 0; q < nq_; ++q) {
                SymMat3 G = f_.gradient(strain_at(t, q, v));
                double dEdJ[3][2] = {{G.m11, G.m12}, {G.m12, G.m22}, {G.m13, G.m23}};
                for (int i = 0; i < 3; ++i)
                    for (int c = 0; c < 3; ++c)
                        g[3 * t.v[i] + c] +=
                            t.wq[q] * (dEdJ[c][0] * t.g[i].x() + dEdJ[c][1] * t.g[i].y());
            }
        return g;
    }

    Eigen::SparseMatrix<double> full_hessian(const Eigen::VectorXd& v) const {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(tris_.size() * 81);
        for (const Tri& t : tris_) {
            SymMat3 dM[9];
            for (int i = 0; i < 3; ++i)
                for (int c = 0; c < 3; ++c) {
                    Eigen::Matrix<double, 3, 2> J = Eigen::Matrix<double, 3, 2>::Zero();
                    J(c, 0) = t.g[i].x();
                    J(c, 1) = t.g[i].y();
                    dM[3 * i + c] = planar_sym_gradient(J);
                }
            double k[9][9] = {};
            for (int q = 0; q < nq_; ++q) {
                SymMat3 M = strain_at(t, q, v);
                for (int j = 0; j < 9; ++j) {
                    SymMat3 HdM = f_.hessian_action(M, dM[j]);
                    for (int i = 0; i <= j; ++i) k[i][j] += t.wq[q] * dM[i].dot(HdM);
                }
            }
            for (int j = 0; j < 9; ++j)
                for (int i = 0; i <= j; ++i) {
                    int gi = 3 * t.v[i / 3] + i % 3, gj = 3 * t.v[j / 3] + j % 3;
                    trip.emplace_back(gi, gj, k[i][j]);
                    if (gi != gj) trip.emplace_back(gj, gi, k[i][j]);
                }
        }
        Eigen::SparseMatrix<double> H(cmap_.n_full(), cmap_.n_full());
        H.setFromTriplets(trip.begin(), trip.end());
        return H;
    }

private:
    struct Tri {
        int v[3];
        Eigen::Vector2d g[3];        // barycentric gradients
        Eigen::Vector2d yq[3];       // quadrature points
        double wq[3];                // quadrature weights
    };

    void build_tables() {
        nq_ = offset_.zero ? 1 : 3;
        total_area_ = 0;
        tris_.reserve(mesh_->triangles.size());
        for (size_t t = 0; t < mesh_->triangles.size(); ++t) {
            const auto& tr = mesh_->triangles[t];
            Tri T;
            Eigen::Vector2d p[3];
            for (int i = 0; i < 3; ++i) {
                T.v[i] = tr[i];
                p[i] = mesh_->vertices[tr[i]];
            }
            double A = mesh_->tri_area(static_cast<int>(t));
            total_area_ += A;
            for (int i = 0; i < 3; ++i) {
                const Eigen::Vector2d& b = p[(i + 1) % 3];
                const Eigen::Vector2d& c = p[(i + 2) % 3];
                T.g[i] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * A);
            }
            if (nq_ == 1) {
                T.yq[0] = (p[0] + p[1] + p[2]) / 3;
                T.wq[0] = A;
            } else {
                for (int i = 0; i < 3; ++i) {
                    T.yq[i] = 0.5 * (p[(i + 1) % 3] + p[(i + 2) % 3]);
                    T.wq[i] = A / 3;
                }
            }
            tris_.push_back(T);
        }
    }

    SymMat3 strain_at(const Tri& t, int q, const Eigen::VectorXd& v) const {
        Eigen::Matrix<double, 3, 2> J = Eigen::Matrix<double, 3, 2>::Zero();
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) {
                double val = v[3 * t.v[i] + c];
                J(c, 0) += val * t.g[i].x();
                J(c, 1) += val * t.g[i].y();
            }
        SymMat3 M = planar_sym_gradient(J);
        if (!offset_.zero) M += offset_.at(t.yq[q]);
        return M;
    }

    const Mesh2D* mesh_;
    EnergyDensity f_;
    StrainOffset offset_;
    ConstraintSet cs_;
    ConstraintMap cmap_;
    std::vector<Tri> tris_;
    int nq_ = 1;
    double total_area_ = 0;
};

}  // namespace fhom

#endif
