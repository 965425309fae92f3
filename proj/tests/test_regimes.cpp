#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fhom/regimes.hpp"
#include "helpers.hpp"

using namespace fhom;

namespace {

// r = exp(-1/eps^2), l = eps^2 / r^5: the standard strong-contrast family
ScalingFamily strong_family(double p, double area = M_PI) {
    ScalingFamily fam;
    fam.log_r = [](double e) { return -1 / (e * e); };
    fam.log_l = [](double e) { return 2 * std::log(e) + 5 / (e * e); };
    fam.p = p;
    fam.area_S = area;
    return fam;
}

// l = c eps^2 / (r^2 |S|): makes k_eps identically c
ScalingFamily finite_k_family(double p, double c, double area = M_PI) {
    ScalingFamily fam;
    fam.log_r = [](double e) { return 3 * std::log(e); };  // r = eps^3
    fam.log_l = [area, c](double e) {
        return std::log(c) + 2 * std::log(e) - 6 * std::log(e) - std::log(area);
    };
    fam.p = p;
    fam.area_S = area;
    return fam;
}

// l = eps^2 / (r^{2+p} |S|): makes r^p k_eps identically 1
ScalingFamily finite_kappa_family(double p, double area = M_PI) {
    ScalingFamily fam;
    fam.log_r = [](double e) { return 3 * std::log(e); };
    fam.log_l = [p, area](double e) {
        return 2 * std::log(e) - (2 + p) * 3 * std::log(e) - std::log(area);
    };
    fam.p = p;
    fam.area_S = area;
    return fam;
}

}  // namespace

TEST_CASE("strong-contrast family at p = 2: kappa infinite, gamma = 1", "[regimes]") {
    RegimeReport rep = classify(strong_family(2.0));
    CHECK(std::isinf(rep.k));
    CHECK(std::isinf(rep.kappa));
    CHECK(rep.gamma_p == Catch::Approx(1.0));
    CHECK(rep.domain == DomainCase::Rigid);
    CHECK(rep.domain_label == "{0}");
    CHECK(rep.cf_branch == CfBranch::QuadraticNoTwist);
    CHECK_FALSE(rep.degenerate);
}

TEST_CASE("algebraically cancelling family gives k = 1", "[regimes]") {
    RegimeReport rep = classify(finite_k_family(2.0, 1.0));
    CHECK(rep.k == Catch::Approx(1.0));
    CHECK(rep.kappa == 0.0);
    CHECK(rep.domain == DomainCase::KFinite);
}

TEST_CASE("p above 2 forces the indicator interaction branch", "[regimes]") {
    RegimeReport rep = classify(finite_k_family(3.0, 1.0));
    CHECK(std::isinf(rep.gamma_p));
    CHECK(rep.cf_branch == CfBranch::Indicator);
}

TEST_CASE("finite-kappa family selects the bending domain", "[regimes]") {
    RegimeReport rep = classify(finite_kappa_family(2.0));
    CHECK(std::isinf(rep.k));
    CHECK(rep.kappa == Catch::Approx(1.0));
    CHECK(rep.domain == DomainCase::KappaFinite);
}

TEST_CASE("scaling l by a constant scales k and kappa, not gamma", "[regimes]") {
    double c = 3.7;
    ScalingFamily base = finite_kappa_family(1.5);
    ScalingFamily scaled = base;
    scaled.log_l = [f = base.log_l, c](double e) { return f(e) + std::log(c); };
    RegimeReport r0 = classify(base), r1 = classify(scaled);
    CHECK(r1.kappa == Catch::Approx(c * r0.kappa));
    CHECK(std::isinf(r0.k));
    CHECK(std::isinf(r1.k));
    CHECK(r1.gamma_p == Catch::Approx(r0.gamma_p));
}

TEST_CASE("zero-k and zero-gamma families are flagged degenerate", "[regimes]") {
    ScalingFamily weak = finite_k_family(2.0, 1.0);
    weak.log_l = [f = weak.log_l](double e) { return f(e) + std::log(e); };  // l smaller by eps
    RegimeReport rep = classify(weak);
    CHECK(rep.k == 0.0);
    CHECK(rep.degenerate);

    // p < 2 with r decaying too fast: gamma = lim r^{2-p}/eps^2 = 0
    ScalingFamily fast;
    fast.p = 1.5;
    fast.log_r = [](double e) { return -1 / e; };
    fast.log_l = [](double e) { return 2 * std::log(e) + 2 / e; };  // keeps k finite
    RegimeReport rf = classify(fast);
    CHECK(rf.gamma_p == 0.0);
    CHECK(rf.degenerate);
}

TEST_CASE("oscillatory families raise an indeterminate-regime error", "[regimes]") {
    ScalingFamily fam = finite_k_family(2.0, 1.0);
    // alternates between factors 1 and 3 on the default ladder eps = 0.1 * 2^-j
    fam.log_l = [f = fam.log_l](double e) {
        return f(e) + std::log(2 + std::cos(M_PI * std::log2(0.1 / e)));
    };
    CHECK_THROWS_AS(classify(fam), std::runtime_error);
}

TEST_CASE("family violating r << eps is rejected", "[regimes]") {
    ScalingFamily fam = finite_k_family(2.0, 1.0);
    fam.log_r = [](double e) { return std::log(2 * e); };
    CHECK_THROWS_AS(classify(fam), std::invalid_argument);
}

TEST_CASE("intermediate-radius band and default choice", "[regimes]") {
    ScalingFamily fam;
    fam.p = 2;
    fam.log_r = [](double e) { return -std::log(2.0) / (e * e); };  // r = 2^{-1/eps^2}
    fam.log_l = [](double e) { return 2 * std::log(e) + 2 * std::log(2.0) / (e * e); };

    double eps = 0.05;
    RBand band = admissible_R(fam, eps);
    CHECK(band.lo < band.default_R);
    CHECK(band.default_R < band.hi);
    CHECK(band.hi <= 1 / std::sqrt(std::abs(fam.log_r(eps))) * (1 + 1e-12));

    // the default map shrinks relative to both bounds along the ladder
    CHECK(r_map_admissible(fam, [&](double e) { return admissible_R(fam, e).log_default; }));
    // R = eps stays a fixed fraction of the p = 2 logarithmic bound: inadmissible
    CHECK_FALSE(r_map_admissible(fam, [](double e) { return std::log(e); }));
}

TEST_CASE("band upper bound for p below 2 comes from r^{2-p}", "[regimes]") {
    ScalingFamily fam = finite_k_family(1.5, 1.0);  // r = eps^3
    double eps = 0.01;
    RBand band = admissible_R(fam, eps);
    CHECK(band.hi == Catch::Approx(std::pow(std::exp(fam.log_r(eps)), 0.5)));
    CHECK(band.hi < eps);
}

TEST_CASE("gamma-normalized epsilon inverts the capacity scale exactly", "[regimes]") {
    CHECK(gamma_normalized_epsilon(std::exp(-100.0), 2.0, 1.0) == Catch::Approx(0.1));
    CHECK(gamma_normalized_epsilon(1e-4, 1.5, 4.0) == Catch::Approx(0.05));
    CHECK_THROWS_AS(gamma_normalized_epsilon(1e-3, 2.5, 1.0), std::invalid_argument);

    // round trip: the induced family classifies back to the requested gamma
    for (double p : {1.5, 2.0}) {
        double target = 2.3;
        ScalingFamily fam;
        fam.p = p;
        // invert eps -> r so that gamma_eps(r(eps)) is identically the target
        fam.log_r = [p, target](double e) {
            if (p == 2) return -1 / (target * e * e);
            return std::log(target * e * e) / (2 - p);
        };
        fam.log_l = [f = fam.log_r](double e) { return 2 * std::log(e) - 2 * f(e); };  // k = |S|
        RegimeReport rep = classify(fam);
        CHECK(rep.gamma_p == Catch::Approx(target));
        double r = 1e-5;
        double er = gamma_normalized_epsilon(r, p, target);
        CHECK(fam.log_r(er) == Catch::Approx(std::log(r)).epsilon(1e-9));
    }
}
