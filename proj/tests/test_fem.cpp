#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fhom/functional.hpp"
#include "fhom/minimize.hpp"
#include "helpers.hpp"

using namespace fhom;
using fhom::testing::uniform;

namespace {

ConstraintSet capacity_constraints(const Eigen::Vector3d& a, double zeta, double diamS) {
    ConstraintSet cs;
    cs.dirichlet_outer = true;
    cs.rigid_inner = RigidData{a, zeta, diamS};
    return cs;
}

}  // namespace

TEST_CASE("rigid motions carry zero energy", "[fem]") {
    Mesh2D m = mesh_cell(unit_disc(), 0.15);
    ConstraintSet cs;
    cs.mean_gauge = true;
    cs.rotation_gauge = true;
    EnergyFunctional F(m, EnergyDensity::isotropic(1.0, 1.0), cs);

    RigidData rd{{0.3, -0.2, 0.5}, 0.7, 2.0};
    Eigen::VectorXd v(3 * m.vertices.size());
    for (size_t i = 0; i < m.vertices.size(); ++i)
        v.segment<3>(3 * i) = rd.value_at(m.vertices[i]);
    CHECK(F.energy_full(v, false) < 1e-14);
}

TEST_CASE("zero field has zero energy and gradient", "[fem]") {
    Mesh2D m = mesh_annulus(unit_disc(), 3.0, 0.3);
    EnergyFunctional F(m, EnergyDensity::p_norm(1.0, 1.5),
                       capacity_constraints({0, 0, 0}, 0, 2.0));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(F.n_free());
    CHECK(F.energy(x) == 0.0);
    CHECK(F.gradient(x).norm() < 1e-14);
}

TEST_CASE("manufactured linear field energy", "[fem]") {
    // psi = (0,0,y1): e_y = e1 (.) e3, f_{lambda,mu} energy = mu A / 2
    double mu = 2.0;
    Mesh2D m = mesh_cell(unit_disc(), 0.1);
    ConstraintSet cs;
    cs.mean_gauge = true;
    cs.rotation_gauge = true;
    EnergyFunctional F(m, EnergyDensity::isotropic(1.3, mu), cs);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * m.vertices.size());
    for (size_t i = 0; i < m.vertices.size(); ++i) v[3 * i + 2] = m.vertices[i].x();
    CHECK(F.energy_full(v, false) == Catch::Approx(mu * m.area() / 2).epsilon(1e-12));
}

TEST_CASE("quadratic problems solve in one step", "[fem]") {
    Mesh2D m = mesh_annulus(unit_disc(), 3.0, 0.2);
    EnergyFunctional F(m, EnergyDensity::isotropic(1.0, 1.0),
                       capacity_constraints({1, 0, 0}, 0.3, 2.0));
    MinimizeResult r = minimize(F);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.energy > 0);
    CHECK(F.gradient(r.x_free).norm() < 1e-10 * (1 + r.energy));
}

TEST_CASE("p=1.5 radial problem converges within budget", "[fem]") {
    CrossSection D = unit_disc();
    Mesh2D m = mesh_annulus(D, 2.0, 0.05, Grading::Uniform);
    MinimizeResult r = minimize_problem(m, EnergyDensity::p_norm(1.0, 1.5),
                                        capacity_constraints({0, 0, 1}, 0, 2.0));
    CHECK(r.converged);
    CHECK(r.iterations < 40);
    for (size_t i = 1; i < r.history.size(); ++i)
        CHECK(r.history[i].energy <= r.history[i - 1].energy + 1e-12 * (1 + std::abs(r.history[i].energy)));
}

TEST_CASE("discrete Korn sanity on annulus meshes", "[fem]") {
    auto korn_constant = [](const Mesh2D& m) {
        ConstraintSet cs;
        cs.dirichlet_outer = true;
        ConstraintMap cm = ConstraintMap::build(m, cs);
        double worst = 0;
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd x(cm.n_free());
            for (int i = 0; i < x.size(); ++i) x[i] = uniform(-1, 1);
            Eigen::VectorXd v = cm.full(x);
            double grad2 = 0, sym2 = 0;
            for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
                const auto& tr = m.triangles[t];
                double A = m.tri_area(t);
                Eigen::Vector2d g[3], p[3];
                for (int i = 0; i < 3; ++i) p[i] = m.vertices[tr[i]];
                for (int i = 0; i < 3; ++i) {
                    const Eigen::Vector2d& b = p[(i + 1) % 3];
                    const Eigen::Vector2d& c = p[(i + 2) % 3];
                    g[i] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * A);
                }
                Eigen::Matrix<double, 3, 2> J = Eigen::Matrix<double, 3, 2>::Zero();
                for (int i = 0; i < 3; ++i)
                    for (int c = 0; c < 3; ++c) {
                        J(c, 0) += v[3 * tr[i] + c] * g[i].x();
                        J(c, 1) += v[3 * tr[i] + c] * g[i].y();
                    }
                grad2 += A * J.squaredNorm();
                sym2 += A * planar_sym_gradient(J).squaredNorm();
            }
            worst = std::max(worst, grad2 / sym2);
        }
        return worst;
    };
    Mesh2D m = mesh_annulus(unit_disc(), 3.0, 0.4);
    double c1 = korn_constant(m);
    double c2 = korn_constant(refine(m));
    CHECK(c1 > 1.0);
    CHECK(c2 < 3 * c1);
    CHECK(c1 < 3 * c2);
}

TEST_CASE("Galerkin energies decrease under nested refinement", "[fem]") {
    Mesh2D m = mesh_annulus(unit_disc(), 3.0, 0.5);
    m.inner_circle_radius = m.outer_circle_radius = 0;  // keep spaces exactly nested
    auto solve = [](const Mesh2D& mesh) {
        return minimize_problem(mesh, EnergyDensity::isotropic(1.0, 1.0),
                                capacity_constraints({1, 0, 1}, 0.4, 2.0))
            .energy;
    };
    double e0 = solve(m);
    Mesh2D m1 = refine(m);
    double e1 = solve(m1);
    double e2 = solve(refine(m1));
    CHECK(e1 <= e0 + 1e-12 * e0);
    CHECK(e2 <= e1 + 1e-12 * e1);
}

TEST_CASE("minimizer uniqueness for strictly convex densities", "[fem]") {
    Mesh2D m = mesh_annulus(unit_disc(), 2.0, 0.15, Grading::Uniform);
    EnergyFunctional F(m, EnergyDensity::p_norm(1.0, 1.5),
                       capacity_constraints({1, 0, 0.5}, 0, 2.0));
    MinimizeOptions cold;
    cold.x0 = Eigen::VectorXd::Zero(F.n_free());
    MinimizeResult a = minimize(F, cold);
    MinimizeResult b = minimize_problem(m, EnergyDensity::p_norm(1.0, 1.5),
                                        capacity_constraints({1, 0, 0.5}, 0, 2.0));
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.energy == Catch::Approx(b.energy).epsilon(1e-10));
}

TEST_CASE("unconstrained null space rejected", "[fem]") {
    Mesh2D m = mesh_cell(unit_disc(), 0.2);
    ConstraintSet cs;  // no constraints at all
    CHECK_THROWS_AS(EnergyFunctional(m, EnergyDensity::isotropic(1.0, 1.0), cs),
                    std::invalid_argument);
}

TEST_CASE("constraint map reproduces prescribed values", "[fem]") {
    Mesh2D m = mesh_annulus(unit_disc(), 3.0, 0.3);
    RigidData rd{{0.2, -0.4, 1.0}, 0.6, 2.0};
    ConstraintSet cs = capacity_constraints(rd.a, rd.zeta, rd.diamS);
    ConstraintMap cm = ConstraintMap::build(m, cs);
    Eigen::VectorXd x(cm.n_free());
    for (int i = 0; i < x.size(); ++i) x[i] = uniform(-1, 1);
    Eigen::VectorXd v = cm.full(x);
    for (size_t i = 0; i < m.vertices.size(); ++i) {
        if (m.tags[i] == VTag::OuterV)
            CHECK(v.segment<3>(3 * i).norm() == 0.0);
        if (m.tags[i] == VTag::InnerS)
            CHECK((v.segment<3>(3 * i) - rd.value_at(m.vertices[i])).norm() < 1e-14);
    }
}

TEST_CASE("gauge constraints hit their targets", "[fem]") {
    Mesh2D m = mesh_cell(unit_disc(), 0.15);
    ConstraintSet cs;
    cs.mean_gauge = true;
    cs.rotation_gauge = true;
    cs.mean_integral_target = {0.7, -0.2, 0.1};
    ConstraintMap cm = ConstraintMap::build(m, cs);
    Eigen::VectorXd x(cm.n_free());
    for (int i = 0; i < x.size(); ++i) x[i] = uniform(-1, 1);
    Eigen::VectorXd v = cm.full(x);

    std::vector<double> w(m.vertices.size(), 0.0);
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
        for (int k : m.triangles[t]) w[k] += m.tri_area(t) / 3;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    double rot = 0;
    for (size_t i = 0; i < m.vertices.size(); ++i) {
        mean += w[i] * v.segment<3>(3 * i);
        rot += w[i] * (-m.vertices[i].y() * v[3 * i] + m.vertices[i].x() * v[3 * i + 1]);
    }
    CHECK((mean - cs.mean_integral_target).norm() < 1e-10);
    CHECK(std::abs(rot) < 1e-10);
}
