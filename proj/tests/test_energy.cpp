#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fhom/energy.hpp"
#include "helpers.hpp"

using namespace fhom;
using fhom::testing::random_symmat;
using fhom::testing::uniform;

namespace {

SymMat3 fd_gradient(const EnergyDensity& f, const SymMat3& M, double step = 1e-5) {
    SymMat3 G;
    double* entries[6];
    SymMat3 Mc = M;
    double* slots[6] = {&Mc.m11, &Mc.m22, &Mc.m33, &Mc.m12, &Mc.m13, &Mc.m23};
    double* out[6] = {&G.m11, &G.m22, &G.m33, &G.m12, &G.m13, &G.m23};
    (void)entries;
    for (int i = 0; i < 6; ++i) {
        double save = *slots[i];
        *slots[i] = save + step;
        double fp = f.eval_smooth(Mc);
        *slots[i] = save - step;
        double fm = f.eval_smooth(Mc);
        *slots[i] = save;
        double d = (fp - fm) / (2 * step);
        // convert partial derivative to the Frobenius-pairing representative
        *out[i] = (i < 3) ? d : d / 2;
    }
    return G;
}

std::vector<EnergyDensity> all_kinds() {
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    A.diagonal() << 1, 2, 3, 2, 2, 2;
    A(0, 1) = A(1, 0) = 0.5;
    return {EnergyDensity::isotropic(1.0, 1.0), EnergyDensity::p_norm(1.0, 3.0),
            EnergyDensity::p_norm(0.7, 1.5), EnergyDensity::quadratic_form(A),
            EnergyDensity::aniso_example()};
}

}  // namespace

TEST_CASE("isotropic density closed-form values", "[energy]") {
    auto f = EnergyDensity::isotropic(1.0, 1.0);
    CHECK(f.eval(SymMat3::Identity()) == Catch::Approx(7.5).epsilon(1e-14));

    auto g = EnergyDensity::isotropic(2.0, 3.0);
    SymMat3 M = random_symmat();
    double expect = 1.0 * M.trace() * M.trace() + 3.0 * M.squaredNorm();
    CHECK(g.eval(M) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("p_norm at zero", "[energy]") {
    auto f = EnergyDensity::p_norm(1.0, 3.0);
    CHECK(f.eval(SymMat3::Zero()) == 0.0);
    CHECK(f.gradient(SymMat3::Zero()).norm() < 1e-12);
}

TEST_CASE("aniso_example matches its formula", "[energy]") {
    auto g = EnergyDensity::aniso_example();
    for (int i = 0; i < 20; ++i) {
        SymMat3 M = random_symmat();
        double expect = M.m11 * M.m11 + M.m22 * M.m22 + 2 * M.m12 * M.m12 + M.m13 * M.m13 +
                        M.m33 * M.m33 + M.m13 * M.m33 + M.m23 * M.m23;
        CHECK(g.eval(M) == Catch::Approx(expect).margin(1e-13));
    }
}

TEST_CASE("gradients match central differences", "[energy]") {
    for (const auto& f : all_kinds()) {
        for (int i = 0; i < 10; ++i) {
            SymMat3 M = random_symmat();
            if (M.norm() < 0.3) continue;  // keep clear of the p<2 singular point
            SymMat3 G = f.gradient(M);
            SymMat3 Gfd = fd_gradient(f, M);
            CHECK((G - Gfd).norm() <= 1e-5 * (1 + G.norm()));
        }
    }
}

TEST_CASE("hessian_action matches differenced gradients", "[energy]") {
    for (const auto& f : all_kinds()) {
        for (int i = 0; i < 5; ++i) {
            SymMat3 M = random_symmat();
            if (M.norm() < 0.3) continue;
            SymMat3 H = random_symmat();
            double step = 1e-6;
            SymMat3 HdM = f.hessian_action(M, H);
            SymMat3 fd = (f.gradient(M + step * H) - f.gradient(M - step * H)) * (1 / (2 * step));
            CHECK((HdM - fd).norm() <= 1e-4 * (1 + HdM.norm()));
        }
    }
}

TEST_CASE("recession and tangent densities", "[energy]") {
    auto pn = EnergyDensity::p_norm(1.0, 2.5);
    SymMat3 M = random_symmat();
    CHECK(pn.recession().eval(M) == Catch::Approx(pn.eval(M)));
    CHECK(pn.tangent_at_zero().eval(M) == Catch::Approx(pn.eval(M)));
    auto iso = EnergyDensity::isotropic(1.0, 2.0);
    CHECK(iso.recession().eval(M) == Catch::Approx(iso.eval(M)));
    CHECK(EnergyDensity::aniso_example().tangent_at_zero().eval(M) ==
          Catch::Approx(EnergyDensity::aniso_example().eval(M)));

    // numeric limits: |f(tM)/t^p - f_inf(M)| small and non-increasing in t
    for (const auto& f : all_kinds()) {
        SymMat3 N = random_symmat();
        double prev = std::numeric_limits<double>::max();
        for (double t : {1e2, 1e3, 1e4}) {
            double val = f.eval(t * N) / std::pow(t, f.exponent());
            double err = std::abs(val - f.recession().eval(N));
            CHECK(err <= prev + 1e-9 * std::abs(val));
            prev = err;
        }
        prev = std::numeric_limits<double>::max();
        for (double t : {1e-2, 1e-3, 1e-4}) {
            double val = f.eval(t * N) / std::pow(t, f.exponent());
            double err = std::abs(val - f.tangent_at_zero().eval(N));
            CHECK(err <= prev + 1e-9 * std::abs(val));
            prev = err;
        }
    }
}

TEST_CASE("convexity midpoint inequality, sampled", "[energy]") {
    for (const auto& f : all_kinds()) {
        for (int i = 0; i < 1000; ++i) {
            SymMat3 M = random_symmat(2.0), N = random_symmat(2.0);
            double mid = f.eval(0.5 * (M + N));
            double avg = 0.5 * f.eval(M) + 0.5 * f.eval(N);
            double slack = f.is_quadratic() ? 1e-12 * (1 + avg) : 1e-10 * (1 + avg);
            CHECK(mid <= avg + slack);
        }
    }
}

TEST_CASE("p-homogeneity of p_norm", "[energy]") {
    for (double p : {1.5, 2.0, 3.0}) {
        auto f = EnergyDensity::p_norm(0.8, p);
        SymMat3 M = random_symmat();
        for (double t : {0.5, 2.0, 10.0})
            CHECK(f.eval(t * M) == Catch::Approx(std::pow(t, p) * f.eval(M)).epsilon(1e-12));
    }
}

TEST_CASE("growth bounds hold on samples", "[energy]") {
    for (const auto& f : all_kinds()) {
        auto [c, C] = f.growth_constants();
        REQUIRE(C >= c);
        for (int i = 0; i < 200; ++i) {
            SymMat3 M = random_symmat(3.0);
            double np = std::pow(M.norm(), f.exponent());
            double v = f.eval(M);
            CHECK(v >= c * np - 1e-9 * (1 + np));
            CHECK(v <= C * np + 1e-9 * (1 + np));
        }
    }
}

TEST_CASE("Lipschitz-on-bounded-sets constant stable under sample growth", "[energy]") {
    for (const auto& f : all_kinds()) {
        double p = f.exponent();
        auto fitted = [&](int n) {
            double c = 0;
            for (int i = 0; i < n; ++i) {
                SymMat3 M = random_symmat(2.0), N = random_symmat(2.0);
                double den = (M - N).norm() *
                             (1 + std::pow(M.norm(), p - 1) + std::pow(N.norm(), p - 1));
                if (den < 1e-8) continue;
                c = std::max(c, std::abs(f.eval(M) - f.eval(N)) / den);
            }
            return c;
        };
        double c1 = fitted(500);
        double c2 = fitted(2000);
        CHECK(c2 <= 2.0 * c1 + 1e-12);
    }
}

TEST_CASE("non-convex quadratic table rejected at construction", "[energy]") {
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Identity();
    A(2, 2) = -1;
    CHECK_THROWS_AS(EnergyDensity::quadratic_form(A), std::invalid_argument);
}

TEST_CASE("planar symmetrized gradient", "[energy]") {
    Eigen::Matrix<double, 3, 2> J = Eigen::Matrix<double, 3, 2>::Zero();
    CHECK(planar_sym_gradient(J).norm() == 0.0);

    // planar rigid motion (-y2, y1, 0)
    J << 0, -1, 1, 0, 0, 0;
    CHECK(planar_sym_gradient(J).norm() < 1e-15);

    // psi = (0,0,y1) -> e1 (.) e3
    J.setZero();
    J(2, 0) = 1;
    SymMat3 M = planar_sym_gradient(J);
    CHECK(M.m13 == Catch::Approx(0.5));
    CHECK((M - sym_dyad(1, 3)).norm() < 1e-15);
}

TEST_CASE("positive scaling of the density", "[energy]") {
    auto f = EnergyDensity::isotropic(1.2, 0.7);
    SymMat3 M = random_symmat();
    CHECK(f.scaled(3.0).eval(M) == Catch::Approx(3 * f.eval(M)).epsilon(1e-13));
}
