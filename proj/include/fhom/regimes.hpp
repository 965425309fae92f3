#ifndef FHOM_REGIMES_HPP
#define FHOM_REGIMES_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fhom {

//! Scaling family (eps, r_eps, l_eps) given through log-valued maps so that
//! families like r = exp(-1/eps^2) stay representable; k_eps and friends are
//! formed in log space throughout.
struct ScalingFamily {
    std::function<double(double)> log_r;  // eps -> log r_eps
    std::function<double(double)> log_l;  // eps -> log l_eps
    double p = 2;
    double area_S = M_PI;

    //! Wrap plain maps; only usable when the values fit in double range.
    static ScalingFamily from_maps(std::function<double(double)> r,
                                   std::function<double(double)> l, double p,
                                   double area_S = M_PI) {
        ScalingFamily fam;
        fam.log_r = [r = std::move(r)](double e) { return std::log(r(e)); };
        fam.log_l = [l = std::move(l)](double e) { return std::log(l(e)); };
        fam.p = p;
        fam.area_S = area_S;
        return fam;
    }
};

//! Limit-domain shape of the 1D fiber fields, selected by (k, kappa).
enum class DomainCase {
    KFinite,             // 0 < k < inf: v3, theta in W^{1,p}(0,L), zero at x3 = 0
    KInfiniteKappaZero,  // k = inf, kappa = 0: v3 = theta = 0
    KappaFinite,         // 0 < kappa < inf: bending fields (v, theta, w, delta), clamped at x3 = 0
    Rigid,               // k = kappa = inf: only the zero field survives
};

//! Branch of the matrix-fiber interaction density c^f, selected by p.
enum class CfBranch {
    ValueFunction,    // 1 < p < 2: gamma * plane capacity of (a, zeta)
    QuadraticNoTwist, // p = 2: quadratic in a, infinite for zeta != 0
    Indicator,        // p > 2: indicator of (a, zeta) = (0, 0)
};

struct RegimeReport {
    double p = 2;
    double k = 0;        // lim l r^2 |S| / eps^2, may be 0 or +inf
    double kappa = 0;    // lim r^p k_eps
    double gamma_p = 0;  // lim r^{2-p}/eps^2 (p != 2) or 1/(eps^2 |log r|) (p = 2)
    DomainCase domain = DomainCase::KFinite;
    CfBranch cf_branch = CfBranch::QuadraticNoTwist;
    bool degenerate = false;  // k = 0 or gamma = 0: the fibers drop out of the limit
    std::string domain_label;
};

namespace detail {

inline std::vector<double> eps_ladder(int n = 10, double eps0 = 0.1, double q = 0.5) {
    std::vector<double> e(n);
    for (int j = 0; j < n; ++j) e[j] = eps0 * std::pow(q, j);
    return e;
}

//! Limit of exp(x_j) from the tail of a log-valued ladder. Declared rule: the
//! last three values with ratios within 10% of 1 mean a finite limit; steady
//! log-increments beyond that threshold mean divergence to 0 or infinity.
inline double log_ladder_limit(const std::vector<double>& x, const char* what) {
    const double inf = std::numeric_limits<double>::infinity();
    const size_t n = x.size();
    if (n < 4) throw std::invalid_argument("log_ladder_limit: ladder too short");
    double d1 = x[n - 2] - x[n - 3], d2 = x[n - 1] - x[n - 2];
    const double thr = std::log(1.1);
    if (std::abs(d1) <= thr && std::abs(d2) <= thr) {
        // off-scale plateaus count as divergence, not as a finite limit
        if (x[n - 1] > 50) return inf;
        if (x[n - 1] < -50) return 0.0;
        return std::exp(x[n - 1]);
    }
    if (d1 >= -thr && d2 >= -thr) return inf;
    if (d1 <= thr && d2 <= thr) return 0.0;
    throw std::runtime_error(std::string("indeterminate regime: ") + what +
                             " oscillates along the eps ladder");
}

}  // namespace detail

inline RegimeReport classify(const ScalingFamily& fam,
                             const std::vector<double>& ladder = detail::eps_ladder()) {
    if (!fam.log_r || !fam.log_l) throw std::invalid_argument("classify: family maps unset");
    if (!(fam.p > 1)) throw std::invalid_argument("classify: need p > 1");
    if (!(fam.area_S > 0)) throw std::invalid_argument("classify: need |S| > 0");

    std::vector<double> lk, lkap, lgam;
    for (double e : ladder) {
        double lr = fam.log_r(e), ll = fam.log_l(e);
        if (!(lr < std::log(e)))
            throw std::invalid_argument("classify: family violates r_eps << eps on the ladder");
        double k = ll + 2 * lr + std::log(fam.area_S) - 2 * std::log(e);
        lk.push_back(k);
        lkap.push_back(fam.p * lr + k);
        if (fam.p == 2)
            lgam.push_back(-2 * std::log(e) - std::log(-lr));
        else
            lgam.push_back((2 - fam.p) * lr - 2 * std::log(e));
    }

    RegimeReport rep;
    rep.p = fam.p;
    rep.k = detail::log_ladder_limit(lk, "k_eps");
    rep.kappa = detail::log_ladder_limit(lkap, "r^p k_eps");
    rep.gamma_p = detail::log_ladder_limit(lgam, "gamma_eps");

    if (rep.kappa > 0 && !std::isinf(rep.k))
        throw std::runtime_error("classify: inconsistent family (kappa > 0 requires k = +inf)");

    rep.degenerate = (rep.k == 0) || (rep.gamma_p == 0);
    if (std::isinf(rep.k) && std::isinf(rep.kappa)) {
        rep.domain = DomainCase::Rigid;
        rep.domain_label = "{0}";
    } else if (std::isinf(rep.k) && rep.kappa > 0) {
        rep.domain = DomainCase::KappaFinite;
        rep.domain_label = "v in W^{2,p}(0,L), (theta,w,delta) in W^{1,p}; v3=theta=0; "
                           "w=delta=v_a=v_a'=0 at x3=0";
    } else if (std::isinf(rep.k)) {
        rep.domain = DomainCase::KInfiniteKappaZero;
        rep.domain_label = "v3=theta=0";
    } else {
        rep.domain = DomainCase::KFinite;
        rep.domain_label = "v3, theta in W^{1,p}(0,L), v3=theta=0 at x3=0";
    }
    rep.cf_branch = fam.p < 2   ? CfBranch::ValueFunction
                    : fam.p == 2 ? CfBranch::QuadraticNoTwist
                                 : CfBranch::Indicator;
    return rep;
}

//! Pointwise admissibility band for the intermediate radius R_eps:
//! r_eps << R_eps << eps, R_eps << r^{2-p}, and R_eps << 1/sqrt(|log r|) at p=2.
struct RBand {
    double lo = 0;         // r_eps
    double hi = 0;         // min of the upper bounds
    double default_R = 0;  // log-scale midpoint of the band
    double log_lo = 0, log_hi = 0, log_default = 0;  // underflow-safe versions

    bool contains(double R) const { return lo < R && R < hi; }
};

inline RBand admissible_R(const ScalingFamily& fam, double eps) {
    double lr = fam.log_r(eps);
    double lhi = std::log(eps);
    if (fam.p < 2) lhi = std::min(lhi, (2 - fam.p) * lr);
    if (fam.p == 2) lhi = std::min(lhi, -0.5 * std::log(-lr));
    if (!(lr < lhi)) throw std::runtime_error("admissible_R: empty band (inconsistent family)");
    RBand band;
    band.log_lo = lr;
    band.log_hi = lhi;
    band.log_default = 0.5 * (lr + lhi);
    band.lo = std::exp(lr);
    band.hi = std::exp(lhi);
    band.default_R = std::exp(band.log_default);
    return band;
}

//! Trend test for a candidate map eps -> R_eps: both ratios r/R and R/bound
//! must vanish along the ladder, not merely stay below 1.
inline bool r_map_admissible(const ScalingFamily& fam, const std::function<double(double)>& log_R,
                             const std::vector<double>& ladder = detail::eps_ladder()) {
    std::vector<double> lower, upper;
    for (double e : ladder) {
        double lr = fam.log_r(e), lR = log_R(e);
        double lhi = std::log(e);
        if (fam.p < 2) lhi = std::min(lhi, (2 - fam.p) * lr);
        if (fam.p == 2) lhi = std::min(lhi, -0.5 * std::log(-lr));
        lower.push_back(lr - lR);
        upper.push_back(lR - lhi);
    }
    try {
        return detail::log_ladder_limit(lower, "r/R") == 0.0 &&
               detail::log_ladder_limit(upper, "R/upper bound") == 0.0;
    } catch (const std::runtime_error&) {
        return false;
    }
}

//! The eps making gamma_eps^{(p)}(r) equal gamma_target exactly, for a single
//! physical radius r (non-periodic normalization).
inline double gamma_normalized_epsilon(double r, double p, double gamma_target) {
    if (!(r > 0 && r < 1)) throw std::invalid_argument("gamma_normalized_epsilon: need 0 < r < 1");
    if (!(gamma_target > 0)) throw std::invalid_argument("gamma_normalized_epsilon: need gamma > 0");
    if (!(p > 1) || p > 2)
        throw std::invalid_argument("gamma_normalized_epsilon: need 1 < p <= 2 (finite gamma is impossible above 2)");
    if (p == 2) return 1 / std::sqrt(gamma_target * std::abs(std::log(r)));
    return std::pow(r, (2 - p) / 2) / std::sqrt(gamma_target);
}

}  // namespace fhom

#endif
