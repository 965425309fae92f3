#ifndef FHOM_CONSTRAINTS_HPP
#define FHOM_CONSTRAINTS_HPP

#include <Eigen/Core>
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "fhom/mesh.hpp"

namespace fhom {

//! Rigid-motion data for the inner constraint psi(y) = a + (2/diamS) zeta e3 ^ y.
struct RigidData {
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    double zeta = 0;
    double diamS = 2;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();  // centroid of S (nonzero for translated domains)

    Eigen::Vector3d value_at(const Eigen::Vector2d& y) const {
        double t = 2 * zeta / diamS;
        Eigen::Vector2d d = y - center;
        return {a.x() - t * d.y(), a.y() + t * d.x(), a.z()};
    }
};

struct ConstraintSet {
    bool dirichlet_outer = false;                 // outer_V vertices pinned to 0
    std::optional<RigidData> rigid_inner;         // inner_S vertices pinned to the rigid motion
    bool periodic = false;                        // slave dofs tied to masters
    bool mean_gauge = false;                      // int psi dy = mean_integral_target
    Eigen::Vector3d mean_integral_target = Eigen::Vector3d::Zero();
    bool rotation_gauge = false;                  // int (-y2 psi1 + y1 psi2) dy = 0 (lumped)

    // optional extra regions (used for exact monotonicity comparisons on shared meshes)
    std::function<bool(const Eigen::Vector2d&)> zero_region;
    std::function<bool(const Eigen::Vector2d&)> rigid_region;

    // full-space dof indices pinned to zero; a cheap sparse gauge for
    // pure-Neumann problems whose value is rigid-motion invariant
    std::vector<int> pinned_dofs;

    bool kills_null_space() const {
        return dirichlet_outer || rigid_inner.has_value() || mean_gauge ||
               !pinned_dofs.empty() ||
               static_cast<bool>(zero_region) || static_cast<bool>(rigid_region);
    }
};

//! Affine reduction x_full = P x_free + b produced by DOF elimination.
//! Handles Dirichlet/rigid pinning, periodic master-slave ties, and linear
//! gauge constraints (component means, rotation moment) via pivot elimination.
class ConstraintMap {
public:
    Eigen::SparseMatrix<double> P;  // (3 nv) x n_free
    Eigen::VectorXd b;              // 3 nv

    int n_free() const { return static_cast<int>(P.cols()); }
    int n_full() const { return static_cast<int>(P.rows()); }

    Eigen::VectorXd full(const Eigen::VectorXd& x_free) const { return P * x_free + b; }

    static ConstraintMap build(const Mesh2D& mesh, const ConstraintSet& cs) {
        const int nv = static_cast<int>(mesh.vertices.size());
        const int nfull = 3 * nv;

        // P1 basis integrals: int phi_v = sum of incident areas / 3 (exact)
        std::vector<double> w(nv, 0.0);
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
            double a3 = mesh.tri_area(t) / 3;
            for (int k : mesh.triangles[t]) w[k] += a3;
        }

        enum class St { Free, Fixed, Slave };
        std::vector<St> st(nfull, St::Free);
        std::vector<double> fixed_val(nfull, 0.0);
        std::vector<int> master_of(nfull, -1);

        for (int v = 0; v < nv; ++v) {
            const Eigen::Vector2d& y = mesh.vertices[v];
            bool zero = (cs.dirichlet_outer && mesh.tags[v] == VTag::OuterV) ||
                        (cs.zero_region && cs.zero_region(y));
            bool rigid = (cs.rigid_inner && mesh.tags[v] == VTag::InnerS) ||
                         (cs.rigid_region && cs.rigid_region(y));
            if (zero) {
                for (int c = 0; c < 3; ++c) st[3 * v + c] = St::Fixed;
            } else if (rigid) {
                if (!cs.rigid_inner) throw std::invalid_argument("rigid_region without rigid data");
                Eigen::Vector3d val = cs.rigid_inner->value_at(y);
                for (int c = 0; c < 3; ++c) {
                    st[3 * v + c] = St::Fixed;
                    fixed_val[3 * v + c] = val[c];
                }
            } else if (cs.periodic && mesh.tags[v] == VTag::PeriodicSlave) {
                int mv = mesh.resolve_master(v);
                for (int c = 0; c < 3; ++c) {
                    st[3 * v + c] = St::Slave;
                    master_of[3 * v + c] = 3 * mv + c;
                }
            }
        }
        for (int g : cs.pinned_dofs) {
            if (g < 0 || g >= nfull) throw std::invalid_argument("constraint map: pinned dof out of range");
            st[g] = St::Fixed;
            fixed_val[g] = 0.0;
        }
        // a slave's master must itself be free or fixed
        for (int g = 0; g < nfull; ++g)
            if (st[g] == St::Slave && st[master_of[g]] == St::Slave)
                throw std::runtime_error("constraint map: unresolved slave chain");

        // gauge constraints expressed on representative (free) dofs
        struct LinCon {
            std::vector<std::pair<int, double>> coef;  // on full dof ids, pre-fold
            double rhs = 0;
        };
        std::vector<LinCon> cons;
        if (cs.mean_gauge) {
            for (int c = 0; c < 3; ++c) {
                LinCon lc;
                lc.rhs = cs.mean_integral_target[c];
                for (int v = 0; v < nv; ++v) lc.coef.push_back({3 * v + c, w[v]});
                cons.push_back(std::move(lc));
            }
        }
        if (cs.rotation_gauge) {
            LinCon lc;
            for (int v = 0; v < nv; ++v) {
                const Eigen::Vector2d& y = mesh.vertices[v];
                lc.coef.push_back({3 * v + 0, -w[v] * y.y()});
                lc.coef.push_back({3 * v + 1, w[v] * y.x()});
            }
            cons.push_back(std::move(lc));
        }

        // fold fixed values and slaves into representative coefficients
        const int nc = static_cast<int>(cons.size());
        std::vector<std::unordered_map<int, double>> folded(nc);
        std::vector<double> rhs(nc);
        for (int i = 0; i < nc; ++i) {
            rhs[i] = cons[i].rhs;
            for (auto [g, co] : cons[i].coef) {
                int r = g;
                if (st[r] == St::Slave) r = master_of[r];
                if (st[r] == St::Fixed)
                    rhs[i] -= co * fixed_val[r];
                else
                    folded[i][r] += co;
            }
        }

        // pick one pivot dof per gauge constraint (largest coefficient, distinct)
        std::vector<int> pivot(nc, -1);
        std::vector<char> is_pivot(nfull, 0);
        for (int i = 0; i < nc; ++i) {
            double best = 0;
            for (auto [g, co] : folded[i])
                if (!is_pivot[g] && std::abs(co) > best) {
                    best = std::abs(co);
                    pivot[i] = g;
                }
            if (pivot[i] < 0) throw std::runtime_error("constraint map: gauge constraint degenerate");
            is_pivot[pivot[i]] = 1;
        }

        // free column numbering (non-pivot free dofs)
        std::vector<int> col(nfull, -1);
        int nfree = 0;
        for (int g = 0; g < nfull; ++g)
            if (st[g] == St::Free && !is_pivot[g]) col[g] = nfree++;

        // solve the nc x nc pivot block: A_E x_E = rhs - A_F x_F
        Eigen::MatrixXd AE = Eigen::MatrixXd::Zero(nc, nc);
        for (int i = 0; i < nc; ++i)
            for (int j = 0; j < nc; ++j) {
                auto it = folded[i].find(pivot[j]);
                if (it != folded[i].end()) AE(i, j) = it->second;
            }
        Eigen::MatrixXd AEinv;
        if (nc > 0) {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(AE);
            if (!lu.isInvertible()) throw std::runtime_error("constraint map: dependent gauge constraints");
            AEinv = lu.inverse();
        }

        // pivot rows: x_E = AEinv rhs - AEinv A_F x_F
        std::vector<std::unordered_map<int, double>> prow(nc);  // over free columns
        Eigen::VectorXd pconst = Eigen::VectorXd::Zero(nc);
        for (int e = 0; e < nc; ++e) {
            for (int i = 0; i < nc; ++i) pconst[e] += AEinv(e, i) * rhs[i];
            for (int i = 0; i < nc; ++i) {
                double s = AEinv(e, i);
                if (s == 0) continue;
                for (auto [g, co] : folded[i]) {
                    if (is_pivot[g]) continue;
                    prow[e][col[g]] -= s * co;
                }
            }
        }
        std::vector<int> pivot_row_of(nfull, -1);
        for (int e = 0; e < nc; ++e) pivot_row_of[pivot[e]] = e;

        ConstraintMap cm;
        cm.b = Eigen::VectorXd::Zero(nfull);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(nfull + 16);
        auto emit_row = [&](int g, int rep) {
            if (st[rep] == St::Fixed) {
                cm.b[g] = fixed_val[rep];
            } else if (is_pivot[rep]) {
                int e = pivot_row_of[rep];
                cm.b[g] = pconst[e];
                for (auto [cidx, co] : prow[e]) trip.emplace_back(g, cidx, co);
            } else {
                trip.emplace_back(g, col[rep], 1.0);
            }
        };
        for (int g = 0; g < nfull; ++g)
            emit_row(g, st[g] == St::Slave ? master_of[g] : g);

        cm.P.resize(nfull, nfree);
        cm.P.setFromTriplets(trip.begin(), trip.end());
        return cm;
    }
};

}  // namespace fhom

#endif
