#ifndef FHOM_CELL_HPP
#define FHOM_CELL_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fhom/cross_section.hpp"
#include "fhom/mesh.hpp"
#include "fhom/minimize.hpp"

namespace fhom {

//! Stretching/twist rates of the fiber axis (k-regime load).
struct FiniteKLoad {
    double a = 0;     // d v3 / d x3
    double beta = 0;  // d theta / d x3
};

//! Bending/extension/twist rates (kappa-regime load).
struct FiniteKappaLoad {
    double zeta1 = 0, zeta2 = 0;  // d^2 v_alpha / d x3^2
    double a = 0;                 // d w / d x3
    double beta = 0;              // d delta / d x3
};

using CellLoad = std::variant<FiniteKLoad, FiniteKappaLoad>;

//! Affine strain offset of the k-regime load operator:
//! (2 beta/diam S)(-y2 e1.e3 + y1 e2.e3) + a e3xe3.
inline StrainOffset cell_offset(const CrossSection& S, const FiniteKLoad& L) {
    double t = 2 * L.beta / S.diameter;
    return StrainOffset::affine(L.a * sym_dyad(3, 3), t * sym_dyad(2, 3), -t * sym_dyad(1, 3));
}

//! Kappa-regime operator: the k-regime offset minus (z1 y1 + z2 y2) e3xe3.
inline StrainOffset cell_offset(const CrossSection& S, const FiniteKappaLoad& L) {
    StrainOffset o = cell_offset(S, FiniteKLoad{L.a, L.beta});
    o.C1 += -L.zeta1 * sym_dyad(3, 3);
    o.C2 += -L.zeta2 * sym_dyad(3, 3);
    return o;
}

inline StrainOffset cell_offset(const CrossSection& S, const CellLoad& load) {
    return std::visit([&](const auto& L) { return cell_offset(S, L); }, load);
}

struct CellResult {
    double value = 0;    // coeff * area-averaged minimal energy
    double avg_min = 0;  // area-averaged minimal energy before the coefficient
    MinimizeResult min;  // minimizer in free coordinates
};

//! Pure-Neumann gauge on the cross-section: the strain operator e_y kills the
//! 4-dimensional space (c1 - w y2, c2 + w y1, c3). Pinning all components at
//! one vertex plus the second component at a vertex with a different y1
//! selects one representative per orbit without changing the value, and keeps
//! the reduced stiffness sparse (integral gauges densify it).
inline ConstraintSet cell_gauge(const Mesh2D& mesh) {
    if (mesh.vertices.empty()) throw std::invalid_argument("cell_gauge: empty mesh");
    int A = 0, B = -1;
    double best = 0;
    for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v) {
        double d = std::abs(mesh.vertices[v].x() - mesh.vertices[A].x());
        if (d > best) {
            best = d;
            B = v;
        }
    }
    if (B < 0) throw std::invalid_argument("cell_gauge: degenerate vertex set");
    ConstraintSet cs;
    cs.pinned_dofs = {3 * A, 3 * A + 1, 3 * A + 2, 3 * B + 1};
    return cs;
}

//! Effective fiber energy on a prebuilt cross-section mesh. The density must
//! already be the regime-appropriate one (g itself for the k-regime, its
//! p-homogeneous tangent at zero for the kappa-regime).
inline CellResult ghom_on_mesh(const EnergyDensity& g, const Mesh2D& mesh, const CrossSection& S,
                               double coeff, const CellLoad& load,
                               const MinimizeOptions& opts = {}) {
    if (!(coeff > 0) || !std::isfinite(coeff))
        throw std::invalid_argument("ghom: coefficient must be finite and positive");
    CellResult res;
    res.min = minimize_problem(mesh, g, cell_gauge(mesh), cell_offset(S, load), opts);
    if (!res.min.converged)
        throw std::runtime_error("ghom: solver did not converge: " + res.min.message);
    res.avg_min = res.min.energy / mesh.area();
    res.value = coeff * res.avg_min;
    return res;
}

inline CellResult ghom(const EnergyDensity& g, const CrossSection& S, double coeff,
                       const CellLoad& load, double h = 0.04) {
    Mesh2D mesh = mesh_cell(S, h);
    const EnergyDensity* density = &g;
    EnergyDensity tangent = g;
    if (std::holds_alternative<FiniteKappaLoad>(load)) {
        tangent = g.tangent_at_zero();
        density = &tangent;
    }
    return ghom_on_mesh(*density, mesh, S, coeff, load);
}

//! Shared-factorization evaluator for quadratic densities: the stiffness
//! operator is independent of the load offset, so one LDLT serves all loads.
class CellFormPath {
public:
    CellFormPath(const EnergyDensity& g, const CrossSection& S, double h = 0.04)
        : S_(S), g_(g), mesh_(mesh_cell(S, h)) {
        if (!g.is_quadratic()) throw std::invalid_argument("CellFormPath: density must be quadratic");
        EnergyFunctional F(mesh_, g_, cell_gauge(mesh_));
        K_ = F.hessian(Eigen::VectorXd::Zero(F.n_free()));
        ldlt_.compute(K_);
        if (ldlt_.info() != Eigen::Success) throw std::runtime_error("CellFormPath: factorization failed");
    }

    const Mesh2D& mesh() const { return mesh_; }

    //! Area-averaged minimal energy for one load (no regime coefficient).
    double avg_min(const CellLoad& load) const {
        EnergyFunctional F(mesh_, g_, cell_gauge(mesh_), cell_offset(S_, load));
        Eigen::VectorXd g0 = F.gradient(Eigen::VectorXd::Zero(F.n_free()));
        Eigen::VectorXd x = ldlt_.solve(-g0);
        return F.energy(x) / mesh_.area();
    }

private:
    CrossSection S_;
    EnergyDensity g_;
    Mesh2D mesh_;
    Eigen::SparseMatrix<double> K_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

//! Assembled quadratic form of the kappa-regime ghom in (z1, z2, a, btilde),
//! btilde = beta / diam S. Diagonal entries from basis loads, off-diagonal by
//! polarization; symmetric by construction.
inline Eigen::Matrix4d ghom_kappa_form(const EnergyDensity& g, const CrossSection& S, double kappa,
                                       double h = 0.04) {
    EnergyDensity g0 = g.tangent_at_zero();
    CellFormPath path(g0, S, h);
    auto value = [&](const Eigen::Vector4d& x) {
        FiniteKappaLoad L{x[0], x[1], x[2], S.diameter * x[3]};
        return kappa * path.avg_min(CellLoad{L});
    };
    Eigen::Matrix4d C;
    double diag[4];
    for (int i = 0; i < 4; ++i) {
        diag[i] = value(Eigen::Vector4d::Unit(i));
        C(i, i) = diag[i];
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double mixed = value(Eigen::Vector4d::Unit(i) + Eigen::Vector4d::Unit(j));
            C(i, j) = C(j, i) = 0.5 * (mixed - diag[i] - diag[j]);
        }
    return C;
}

//! Assembled quadratic form of the k-regime ghom in (a, beta) for a quadratic
//! density; same polarization scheme as the kappa form.
inline Eigen::Matrix2d ghom_k_form(const EnergyDensity& g, const CrossSection& S, double k,
                                   double h = 0.04) {
    CellFormPath path(g, S, h);
    auto value = [&](const Eigen::Vector2d& x) {
        return k * path.avg_min(CellLoad{FiniteKLoad{x[0], x[1]}});
    };
    Eigen::Matrix2d G;
    double d0 = value(Eigen::Vector2d::Unit(0)), d1 = value(Eigen::Vector2d::Unit(1));
    G(0, 0) = d0;
    G(1, 1) = d1;
    double mixed = value(Eigen::Vector2d::Ones());
    G(0, 1) = G(1, 0) = 0.5 * (mixed - d0 - d1);
    return G;
}

//! Warping constant m = inf_phi avg_S (d1 phi - y2)^2 + (d2 phi + y1)^2,
//! computed through the vector machinery with q = phi e3: against the
//! rotational offset the integrand equals 2 |M|^2.
inline double torsion_constant(const CrossSection& S, double h = 0.02) {
    Mesh2D mesh = mesh_cell(S, h);
    StrainOffset off = StrainOffset::affine({}, sym_dyad(2, 3), -1.0 * sym_dyad(1, 3));
    MinimizeResult r = minimize_problem(mesh, EnergyDensity::p_norm(1.0, 2.0), cell_gauge(mesh), off);
    if (!r.converged) throw std::runtime_error("torsion_constant: solver did not converge");
    return 2 * r.energy / mesh.area();
}

namespace detail {

//! Oriented boundary edges (a, b) of a mesh, domain on the left.
inline std::vector<std::array<int, 2>> boundary_edges(const Mesh2D& mesh) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            count[{std::min(a, b), std::max(a, b)}]++;
        }
    std::vector<std::array<int, 2>> edges;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            if (count[{std::min(a, b), std::max(a, b)}] == 1) edges.push_back({a, b});
        }
    return edges;
}

//! Scalar P1 Neumann solve: -Delta phi = -source in S, grad phi . n = flux,
//! compatibility checked; the returned field has zero area mean.
template <class Flux>
inline Eigen::VectorXd scalar_neumann(const Mesh2D& mesh, double source, Flux flux,
                                      double* compat_residual = nullptr) {
    const int nv = static_cast<int>(mesh.vertices.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
    std::vector<double> w(nv, 0.0);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tr = mesh.triangles[t];
        double A = mesh.tri_area(t);
        Eigen::Vector2d g[3];
        for (int i = 0; i < 3; ++i) {
            const Eigen::Vector2d& b = mesh.vertices[tr[(i + 1) % 3]];
            const Eigen::Vector2d& c = mesh.vertices[tr[(i + 2) % 3]];
            g[i] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * A);
        }
        for (int i = 0; i < 3; ++i) {
            w[tr[i]] += A / 3;
            for (int j = 0; j < 3; ++j) trip.emplace_back(tr[i], tr[j], A * g[i].dot(g[j]));
        }
    }
    double flux_total = 0;
    const double gq[2] = {0.5 * (1 - 1 / std::sqrt(3.0)), 0.5 * (1 + 1 / std::sqrt(3.0))};
    for (const auto& e : boundary_edges(mesh)) {
        Eigen::Vector2d pa = mesh.vertices[e[0]], pb = mesh.vertices[e[1]];
        Eigen::Vector2d d = pb - pa;
        double len = d.norm();
        Eigen::Vector2d n(d.y() / len, -d.x() / len);  // outward for CCW triangles
        for (double t : gq) {
            Eigen::Vector2d y = pa + t * d;
            double f = flux(y, n) * len / 2;
            rhs[e[0]] += f * (1 - t);
            rhs[e[1]] += f * t;
            flux_total += f;
        }
    }
    double area = mesh.area();
    double resid = std::abs(flux_total - source * area);
    if (compat_residual) *compat_residual = resid;
    if (resid > 1e-10 * (1 + std::abs(flux_total) + std::abs(source) * area))
        throw std::runtime_error("scalar_neumann: incompatible flux/source data");
    for (int v = 0; v < nv; ++v) rhs[v] -= source * w[v];

    // pin one vertex to fix the constant, then recenter to zero mean
    Eigen::SparseMatrix<double> K(nv, nv);
    K.setFromTriplets(trip.begin(), trip.end());
    for (int k = 0; k < K.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
            if (it.row() == 0 || it.col() == 0) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    rhs[0] = 0;
    Eigen::VectorXd phi = spd_solve(K, rhs);
    double mean = 0;
    for (int v = 0; v < nv; ++v) mean += w[v] * phi[v];
    phi.array() -= mean / area;
    return phi;
}

inline Eigen::Vector2d p1_gradient(const Mesh2D& mesh, const Eigen::VectorXd& phi, int t) {
    const auto& tr = mesh.triangles[t];
    double A = mesh.tri_area(t);
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d& b = mesh.vertices[tr[(i + 1) % 3]];
        const Eigen::Vector2d& c = mesh.vertices[tr[(i + 2) % 3]];
        g += phi[tr[i]] * Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * A);
    }
    return g;
}

}  // namespace detail

//! Anisotropic-fiber cell matrix: the direct quadratic form of the
//! kappa-regime ghom in (z1, z2, a, btilde) together with the four scalar
//! Neumann warping fields and the printed entry formulas, cross-checked.
struct AnisoCellReport {
    Eigen::Matrix4d C = Eigen::Matrix4d::Zero();          // direct (source of truth)
    Eigen::Matrix4d C_entries = Eigen::Matrix4d::Zero();  // entry formulas where defined
    bool entry_defined[4][4] = {};
    std::vector<std::string> flags;  // entries whose two evaluations differ > 1%
    std::vector<Eigen::VectorXd> phi;
    std::array<double, 4> compat_residual = {};
    Mesh2D mesh;
    //! Area-weighted L2 norm of phi^(i) (fields are already mean-free).
    double phi_norm(int i) const {
        double s = 0, area = 0;
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
            double A = mesh.tri_area(t);
            area += A;
            for (int k : mesh.triangles[t]) s += A / 3 * phi[i][k] * phi[i][k];
        }
        return std::sqrt(s / area);
    }
};

inline AnisoCellReport aniso_cell_matrix(const CrossSection& S, double kappa,
                                         const EnergyDensity& g = EnergyDensity::aniso_example(),
                                         double h = 0.02) {
    AnisoCellReport rep;
    rep.C = ghom_kappa_form(g, S, kappa, h);

    Mesh2D mesh = mesh_cell(S, h);
    rep.phi.resize(4);
    rep.phi[0] = detail::scalar_neumann(
        mesh, 1.0, [](const Eigen::Vector2d& y, const Eigen::Vector2d& n) { return y.x() * n.x(); },
        &rep.compat_residual[0]);
    rep.phi[1] = detail::scalar_neumann(
        mesh, 0.0, [](const Eigen::Vector2d& y, const Eigen::Vector2d& n) { return y.y() * n.x(); },
        &rep.compat_residual[1]);
    rep.phi[2] = detail::scalar_neumann(
        mesh, 0.0, [](const Eigen::Vector2d&, const Eigen::Vector2d& n) { return -n.x(); },
        &rep.compat_residual[2]);
    rep.phi[3] = detail::scalar_neumann(
        mesh, 0.0,
        [](const Eigen::Vector2d& y, const Eigen::Vector2d& n) {
            return -2 * (-y.y() * n.x() + y.x() * n.y());
        },
        &rep.compat_residual[3]);

    // area averages needed by the entry formulas (midpoint rule, exact here)
    double area = mesh.area();
    double avg_d1[4] = {0, 0, 0, 0};  // avg of d phi^(i) / d y1
    double avg_y2sq = 0, avg_ysq = 0;
    double avg_yalpha_term[2] = {0, 0};  // avg of -y_alpha (0.5 d1 phi4 - y2)
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        double A = mesh.tri_area(t);
        Eigen::Vector2d g4 = detail::p1_gradient(mesh, rep.phi[3], t);
        for (int i = 0; i < 4; ++i) avg_d1[i] += A * detail::p1_gradient(mesh, rep.phi[i], t).x();
        const auto& tr = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            Eigen::Vector2d m = 0.5 * (mesh.vertices[tr[e]] + mesh.vertices[tr[(e + 1) % 3]]);
            avg_y2sq += A / 3 * m.y() * m.y();
            avg_ysq += A / 3 * m.squaredNorm();
            for (int al = 0; al < 2; ++al)
                avg_yalpha_term[al] += A / 3 * (-m[al] * (0.5 * g4.x() - m.y()));
        }
    }
    for (double& v : avg_d1) v /= area;
    avg_y2sq /= area;
    avg_ysq /= area;
    for (double& v : avg_yalpha_term) v /= area;

    auto set_entry = [&](int i, int j, double v) {
        rep.C_entries(i, j) = rep.C_entries(j, i) = v;
        rep.entry_defined[i][j] = rep.entry_defined[j][i] = true;
    };
    set_entry(2, 2, kappa);
    set_entry(3, 3, kappa * avg_ysq);
    set_entry(2, 3, 0.5 * kappa * 0.5 * avg_d1[3]);
    set_entry(0, 2, 0.5 * kappa * 0.5 * avg_d1[0]);
    set_entry(1, 2, 0.5 * kappa * 0.5 * avg_d1[1]);
    set_entry(0, 3, 0.5 * kappa * avg_yalpha_term[0]);
    set_entry(1, 3, 0.5 * kappa * avg_yalpha_term[1]);

    double scale = rep.C.norm();
    const char* names = "1234";
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            if (!rep.entry_defined[i][j]) {
                rep.C_entries(i, j) = rep.C_entries(j, i) = rep.C(i, j);
                continue;
            }
            if (std::abs(rep.C_entries(i, j) - rep.C(i, j)) > 0.01 * scale)
                rep.flags.push_back(std::string("C") + names[i] + names[j] + ": entry formula " +
                                    std::to_string(rep.C_entries(i, j)) + " vs direct " +
                                    std::to_string(rep.C(i, j)));
        }
    rep.mesh = std::move(mesh);
    return rep;
}

struct SoftDensityResult {
    double value = 0;
    MinimizeResult min;
};

//! Periodic soft-matrix density on a prebuilt periodic cell mesh of Y \ S.
//! The zero-mean condition over the whole cell pins the meshed-region mean to
//! minus the rigid contribution a |S| (the rotation part averages out).
inline SoftDensityResult soft_density_on_mesh(const EnergyDensity& f, const Mesh2D& mesh,
                                              double diamS, const Eigen::Vector3d& a, double zeta,
                                              const MinimizeOptions& opts = {}) {
    ConstraintSet cs;
    cs.periodic = true;
    cs.rigid_inner = RigidData{a, zeta, diamS};
    cs.mean_gauge = true;
    cs.mean_integral_target = -a * (1.0 - mesh.area());  // discrete |S| = 1 - |Y \ S|
    SoftDensityResult res;
    res.min = minimize_problem(mesh, f.recession(), cs, StrainOffset::none(), opts);
    if (!res.min.converged)
        throw std::runtime_error("soft_density: solver did not converge: " + res.min.message);
    res.value = res.min.energy;
    return res;
}

inline SoftDensityResult soft_density(const EnergyDensity& f, const CrossSection& S,
                                      const Eigen::Vector3d& a, double zeta, double h = 0.03) {
    Mesh2D mesh = mesh_periodic_cell(S, h);
    return soft_density_on_mesh(f, mesh, S.diameter, a, zeta);
}

}  // namespace fhom

#endif
