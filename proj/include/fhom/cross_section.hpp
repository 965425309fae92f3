#ifndef FHOM_CROSS_SECTION_HPP
#define FHOM_CROSS_SECTION_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fhom {

//! Planar fiber cross-section S, centered so the centroid sits at the origin.
//! Discs keep their analytic descriptor (radius); polygons keep their vertex
//! chain. second_moments is the area average of y_i y_j over S.
struct CrossSection {
    bool is_disc = false;
    double disc_radius = 0;
    std::vector<Eigen::Vector2d> polygon;  // CCW, centered; empty for discs

    double area = 0;
    double diameter = 0;
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    Eigen::Matrix2d second_moments = Eigen::Matrix2d::Zero();
    double tau = 0;  // 2 avg|y|^2 / diam

    //! Exit parameter t of the ray t*(cos th, sin th) through the boundary.
    //! S is assumed star-shaped with respect to the origin.
    double ray_exit(double theta) const {
        if (is_disc) return disc_radius;
        Eigen::Vector2d d(std::cos(theta), std::sin(theta));
        double best = 0;
        const size_t n = polygon.size();
        for (size_t i = 0; i < n; ++i) {
            const Eigen::Vector2d& a = polygon[i];
            const Eigen::Vector2d& b = polygon[(i + 1) % n];
            Eigen::Vector2d e = b - a;
            double det = d.x() * (-e.y()) - d.y() * (-e.x());
            if (std::abs(det) < 1e-14) continue;
            double t = (a.x() * (-e.y()) - a.y() * (-e.x())) / det;
            double s = (d.x() * a.y() - d.y() * a.x()) / det;
            if (t > 0 && s >= -1e-12 && s <= 1 + 1e-12) best = std::max(best, t);
        }
        if (best <= 0) throw std::runtime_error("ray_exit: boundary not hit; S not star-shaped about 0?");
        return best;
    }

    double max_radius() const {
        if (is_disc) return disc_radius;
        double r = 0;
        for (const auto& v : polygon) r = std::max(r, v.norm());
        return r;
    }

    bool contains_unit_disc(double tol = 1e-9) const {
        if (is_disc) return disc_radius >= 1 - tol;
        const size_t n = polygon.size();
        for (size_t i = 0; i < n; ++i) {
            const Eigen::Vector2d& a = polygon[i];
            const Eigen::Vector2d& b = polygon[(i + 1) % n];
            Eigen::Vector2d e = b - a;
            double dist = std::abs(e.x() * a.y() - e.y() * a.x()) / e.norm();
            if (dist < 1 - tol) return false;
        }
        return true;
    }
};

inline CrossSection unit_disc() {
    CrossSection S;
    S.is_disc = true;
    S.disc_radius = 1;
    S.area = M_PI;
    S.diameter = 2;
    S.second_moments = 0.25 * Eigen::Matrix2d::Identity();
    S.tau = 0.5;
    return S;
}

inline CrossSection scaled_disc(double t) {
    if (t <= 0) throw std::invalid_argument("scaled_disc: need t > 0");
    CrossSection S;
    S.is_disc = true;
    S.disc_radius = t;
    S.area = M_PI * t * t;
    S.diameter = 2 * t;
    S.second_moments = (t * t / 4) * Eigen::Matrix2d::Identity();
    S.tau = t / 2;
    return S;
}

inline CrossSection make_cross_section(std::vector<Eigen::Vector2d> pts) {
    const size_t n = pts.size();
    if (n < 3) throw std::invalid_argument("polygon: need at least 3 vertices");

    double area2 = 0;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % n];
        area2 += a.x() * b.y() - b.x() * a.y();
    }
    if (area2 < 0) {
        std::reverse(pts.begin(), pts.end());
        area2 = -area2;
    }

    double diam = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) diam = std::max(diam, (pts[i] - pts[j]).norm());
    if (area2 / 2 < 1e-12 * diam * diam)
        throw std::invalid_argument("polygon: degenerate (area below tolerance)");

    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (size_t i = 0; i < n; ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % n];
        double w = a.x() * b.y() - b.x() * a.y();
        c += (w / 3) * (a + b);
    }
    c /= area2;
    for (auto& v : pts) v -= c;

    CrossSection S;
    S.polygon = std::move(pts);
    S.area = area2 / 2;
    S.diameter = diam;

    Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
    for (size_t i = 0; i < n; ++i) {
        const auto& a = S.polygon[i];
        const auto& b = S.polygon[(i + 1) % n];
        double A = 0.5 * (a.x() * b.y() - b.x() * a.y());
        Eigen::Vector2d s = a + b;
        J += (A / 12) * (a * a.transpose() + b * b.transpose() + s * s.transpose());
    }
    S.second_moments = J / S.area;
    S.tau = 2 * S.second_moments.trace() / S.diameter;
    return S;
}

inline CrossSection square_cross_section(double side = 1.0) {
    double h = side / 2;
    return make_cross_section({{-h, -h}, {h, -h}, {h, h}, {-h, h}});
}

}  // namespace fhom

#endif
