#ifndef FHOM_MESH_HPP
#define FHOM_MESH_HPP

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhom/cross_section.hpp"

namespace fhom {

enum class VTag : std::uint8_t { Interior = 0, InnerS, OuterV, PeriodicMaster, PeriodicSlave };

inline const char* tag_name(VTag t) {
    switch (t) {
        case VTag::Interior: return "interior";
        case VTag::InnerS: return "inner_S";
        case VTag::OuterV: return "outer_V";
        case VTag::PeriodicMaster: return "periodic_master";
        case VTag::PeriodicSlave: return "periodic_slave";
    }
    return "?";
}

inline VTag tag_from_name(const std::string& s) {
    if (s == "interior") return VTag::Interior;
    if (s == "inner_S") return VTag::InnerS;
    if (s == "outer_V") return VTag::OuterV;
    if (s == "periodic_master") return VTag::PeriodicMaster;
    if (s == "periodic_slave") return VTag::PeriodicSlave;
    throw std::invalid_argument("unknown vertex tag: " + s);
}

enum class Grading { Uniform, Log };

//! Conforming triangulation with per-vertex boundary tags. Immutable after
//! construction; the circle radii record which tagged vertices live on a
//! discretized circle so refinement can re-project midpoints.
struct Mesh2D {
    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<VTag> tags;
    std::vector<int> periodic_partner;  // slave -> paired master vertex, else -1

    double inner_circle_radius = 0;  // >0 when inner_S vertices sit on a circle
    double outer_circle_radius = 0;  // >0 when outer_V vertices sit on a circle
    std::string grading = "uniform";
    double target_h = 0;

    double tri_area(int t) const {
        const auto& tr = triangles[t];
        Eigen::Vector2d e1 = vertices[tr[1]] - vertices[tr[0]];
        Eigen::Vector2d e2 = vertices[tr[2]] - vertices[tr[0]];
        return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    }

    double area() const {
        double a = 0;
        for (int t = 0; t < static_cast<int>(triangles.size()); ++t) a += tri_area(t);
        return a;
    }

    void check() const {
        if (tags.size() != vertices.size() || periodic_partner.size() != vertices.size())
            throw std::runtime_error("mesh: tag/partner arrays out of sync");
        for (int t = 0; t < static_cast<int>(triangles.size()); ++t)
            if (tri_area(t) <= 0) throw std::runtime_error("mesh: non-positive triangle area");
        for (size_t v = 0; v < vertices.size(); ++v) {
            bool slave = tags[v] == VTag::PeriodicSlave;
            if (slave != (periodic_partner[v] >= 0))
                throw std::runtime_error("mesh: periodic pairing inconsistent with tags");
        }
    }

    //! Follows slave chains (corners pair through two axis translations).
    int resolve_master(int v) const {
        int m = v, guard = 0;
        while (periodic_partner[m] >= 0) {
            m = periodic_partner[m];
            if (++guard > 8) throw std::runtime_error("mesh: periodic chain cycle");
        }
        return m;
    }

    Mesh2D translated(const Eigen::Vector2d& t) const {
        Mesh2D m = *this;
        for (auto& v : m.vertices) v += t;
        m.inner_circle_radius = m.outer_circle_radius = 0;  // circles no longer centered
        return m;
    }

    Mesh2D scaled(double s) const {
        if (s <= 0) throw std::invalid_argument("mesh scale: need s > 0");
        Mesh2D m = *this;
        for (auto& v : m.vertices) v *= s;
        m.inner_circle_radius *= s;
        m.outer_circle_radius *= s;
        m.target_h *= s;
        return m;
    }
};

namespace detail {

inline int round_up_multiple8(int n) { return ((n + 7) / 8) * 8; }

//! Unit directions at angles 2 pi j / n, built with exact dihedral symmetry so
//! reflected angles give bitwise-equal coordinates (needed for periodic pairing).
inline std::vector<Eigen::Vector2d> symmetric_directions(int n) {
    if (n % 8 != 0) throw std::invalid_argument("symmetric_directions: n must be a multiple of 8");
    const int q = n / 4, o = n / 8;
    std::vector<Eigen::Vector2d> base(q + 1);
    for (int j = 0; j <= o; ++j) {
        double th = 2 * M_PI * j / n;
        base[j] = {std::cos(th), std::sin(th)};
    }
    for (int j = o + 1; j <= q; ++j) base[j] = {base[q - j].y(), base[q - j].x()};
    std::vector<Eigen::Vector2d> dir(n);
    for (int j = 0; j < q; ++j) {
        dir[j] = base[j];
        dir[q + j] = {-base[q - j].x(), base[q - j].y()};
        dir[2 * q + j] = {-base[j].x(), -base[j].y()};
        dir[3 * q + j] = {base[q - j].x(), -base[q - j].y()};
    }
    return dir;
}

//! Radial layer fractions in [0,1]; Log grading starts with thickness h at the
//! inner side and grows geometrically with the given ratio.
inline std::vector<double> layer_fractions(double span, double h, Grading g, double ratio) {
    std::vector<double> f{0.0};
    if (g == Grading::Uniform) {
        int n = std::max(1, static_cast<int>(std::ceil(span / h)));
        for (int k = 1; k <= n; ++k) f.push_back(static_cast<double>(k) / n);
        return f;
    }
    double d = 0, step = h;
    std::vector<double> off{0.0};
    while (d < span) {
        d += step;
        off.push_back(d);
        step *= ratio;
    }
    for (size_t k = 1; k < off.size(); ++k) f.push_back(off[k] / d);
    f.back() = 1.0;
    return f;
}

}  // namespace detail

//! Annulus-type mesh of V \ S with V = R*D: radial layers between the boundary
//! of S and the circle of radius R. Inner boundary tagged inner_S, outer
//! tagged outer_V.
inline Mesh2D mesh_annulus(const CrossSection& S, double R, double h,
                           Grading grading = Grading::Log, double grading_ratio = 1.3) {
    if (h <= 0) throw std::invalid_argument("mesh_annulus: need h > 0");
    double maxr = S.max_radius();
    if (R <= maxr * (1 + 1e-9)) throw std::invalid_argument("mesh_annulus: R*D does not strictly contain S");

    int ntheta = detail::round_up_multiple8(
        std::max(16, static_cast<int>(std::ceil(2 * M_PI * maxr / h))));
    auto dirs = detail::symmetric_directions(ntheta);
    double minr = S.is_disc ? S.disc_radius : [&] {
        double m = std::numeric_limits<double>::max();
        for (int j = 0; j < ntheta; ++j)
            m = std::min(m, S.ray_exit(std::atan2(dirs[j].y(), dirs[j].x())));
        return m;
    }();
    auto frac = detail::layer_fractions(R - minr, h, grading, grading_ratio);
    const int nl = static_cast<int>(frac.size()) - 1;

    Mesh2D m;
    m.grading = grading == Grading::Log ? "log" : "uniform";
    m.target_h = h;
    m.outer_circle_radius = R;
    if (S.is_disc) m.inner_circle_radius = S.disc_radius;

    for (int j = 0; j < ntheta; ++j) {
        double rS = S.is_disc ? S.disc_radius : S.ray_exit(std::atan2(dirs[j].y(), dirs[j].x()));
        for (int k = 0; k <= nl; ++k) {
            double r = rS + (R - rS) * frac[k];
            m.vertices.push_back(r * dirs[j]);
            m.tags.push_back(k == 0 ? VTag::InnerS : (k == nl ? VTag::OuterV : VTag::Interior));
        }
    }
    auto vid = [&](int j, int k) { return (j % ntheta) * (nl + 1) + k; };
    for (int j = 0; j < ntheta; ++j)
        for (int k = 0; k < nl; ++k) {
            int a = vid(j, k), b = vid(j + 1, k), c = vid(j + 1, k + 1), d = vid(j, k + 1);
            m.triangles.push_back({a, c, b});
            m.triangles.push_back({a, d, c});
        }
    m.periodic_partner.assign(m.vertices.size(), -1);
    m.check();
    return m;
}

//! Triangulation of S itself (cell problems). Boundary vertices tagged inner_S.
inline Mesh2D mesh_cell(const CrossSection& S, double h) {
    if (h <= 0) throw std::invalid_argument("mesh_cell: need h > 0");
    double maxr = S.max_radius();
    int ntheta = detail::round_up_multiple8(
        std::max(16, static_cast<int>(std::ceil(2 * M_PI * maxr / h))));
    auto dirs = detail::symmetric_directions(ntheta);
    int nl = std::max(2, static_cast<int>(std::ceil(maxr / h)));

    Mesh2D m;
    m.target_h = h;
    if (S.is_disc) m.inner_circle_radius = S.disc_radius;

    m.vertices.push_back(Eigen::Vector2d::Zero());
    m.tags.push_back(VTag::Interior);
    for (int j = 0; j < ntheta; ++j) {
        double rS = S.is_disc ? S.disc_radius : S.ray_exit(std::atan2(dirs[j].y(), dirs[j].x()));
        for (int k = 1; k <= nl; ++k) {
            m.vertices.push_back((rS * k / nl) * dirs[j]);
            m.tags.push_back(k == nl ? VTag::InnerS : VTag::Interior);
        }
    }
    auto vid = [&](int j, int k) { return k == 0 ? 0 : 1 + (j % ntheta) * nl + (k - 1); };
    for (int j = 0; j < ntheta; ++j) {
        m.triangles.push_back({vid(j, 0), vid(j, 1), vid(j + 1, 1)});
        for (int k = 1; k < nl; ++k) {
            int a = vid(j, k), b = vid(j + 1, k), c = vid(j + 1, k + 1), d = vid(j, k + 1);
            m.triangles.push_back({a, c, b});
            m.triangles.push_back({a, d, c});
        }
    }
    m.periodic_partner.assign(m.vertices.size(), -1);
    m.check();
    return m;
}

//! Mesh of Y \ S with Y = [-1/2,1/2)^2 and periodic pairing of opposite faces.
//! Left and bottom boundary vertices are slaves of their +1 translates; the
//! three non-master corners chain to (1/2, 1/2).
inline Mesh2D mesh_periodic_cell(const CrossSection& S, double h) {
    if (h <= 0) throw std::invalid_argument("mesh_periodic_cell: need h > 0");
    double maxr = S.max_radius();
    if (maxr >= 0.5 - 1e-9) throw std::invalid_argument("mesh_periodic_cell: S must be strictly inside Y");

    int ntheta = detail::round_up_multiple8(std::max(
        {16, static_cast<int>(std::ceil(2 * M_PI * maxr / h)), static_cast<int>(std::ceil(4.0 / h))}));
    auto dirs = detail::symmetric_directions(ntheta);
    double span = 0.5 * std::sqrt(2.0) - (S.is_disc ? S.disc_radius : 0.0);
    int nl = std::max(2, static_cast<int>(std::ceil(span / h)));

    Mesh2D m;
    m.target_h = h;
    if (S.is_disc) m.inner_circle_radius = S.disc_radius;

    for (int j = 0; j < ntheta; ++j) {
        double rS = S.is_disc ? S.disc_radius : S.ray_exit(std::atan2(dirs[j].y(), dirs[j].x()));
        double mcoord = std::max(std::abs(dirs[j].x()), std::abs(dirs[j].y()));
        Eigen::Vector2d outer = (0.5 / mcoord) * dirs[j];
        // snap the on-edge coordinate exactly to +-1/2
        if (std::abs(std::abs(outer.x()) - 0.5) < 1e-12) outer.x() = std::copysign(0.5, outer.x());
        if (std::abs(std::abs(outer.y()) - 0.5) < 1e-12) outer.y() = std::copysign(0.5, outer.y());
        Eigen::Vector2d inner = rS * dirs[j];
        for (int k = 0; k <= nl; ++k) {
            double t = static_cast<double>(k) / nl;
            m.vertices.push_back((1 - t) * inner + t * outer);
            m.tags.push_back(k == 0 ? VTag::InnerS : VTag::Interior);
        }
    }
    auto vid = [&](int j, int k) { return (j % ntheta) * (nl + 1) + k; };
    for (int j = 0; j < ntheta; ++j)
        for (int k = 0; k < nl; ++k) {
            int a = vid(j, k), b = vid(j + 1, k), c = vid(j + 1, k + 1), d = vid(j, k + 1);
            m.triangles.push_back({a, c, b});
            m.triangles.push_back({a, d, c});
        }

    m.periodic_partner.assign(m.vertices.size(), -1);
    std::map<std::pair<double, double>, int> outer_index;
    for (int j = 0; j < ntheta; ++j) {
        int v = vid(j, nl);
        outer_index[{m.vertices[v].x(), m.vertices[v].y()}] = v;
    }
    auto find_at = [&](double x, double y) {
        auto it = outer_index.find({x, y});
        if (it == outer_index.end())
            throw std::runtime_error("mesh_periodic_cell: missing periodic partner");
        return it->second;
    };
    for (int j = 0; j < ntheta; ++j) {
        int v = vid(j, nl);
        const Eigen::Vector2d& P = m.vertices[v];
        if (P.x() == -0.5) {  // left edge incl. corners -> right edge
            m.periodic_partner[v] = find_at(0.5, P.y());
            m.tags[v] = VTag::PeriodicSlave;
        } else if (P.y() == -0.5) {  // remaining bottom edge -> top edge
            m.periodic_partner[v] = find_at(P.x(), 0.5);
            m.tags[v] = VTag::PeriodicSlave;
        } else {
            m.tags[v] = VTag::PeriodicMaster;
        }
    }
    m.check();
    return m;
}

//! Uniform 4-way refinement; midpoints on tagged circle boundaries are
//! re-projected. Periodic meshes are not supported (pairing is regenerated
//! more cheaply by remeshing at h/2).
inline Mesh2D refine(const Mesh2D& mesh) {
    for (VTag t : mesh.tags)
        if (t == VTag::PeriodicMaster || t == VTag::PeriodicSlave)
            throw std::invalid_argument("refine: periodic meshes unsupported; remesh at h/2");

    Mesh2D m;
    m.vertices = mesh.vertices;
    m.tags = mesh.tags;
    m.inner_circle_radius = mesh.inner_circle_radius;
    m.outer_circle_radius = mesh.outer_circle_radius;
    m.grading = mesh.grading;
    m.target_h = mesh.target_h / 2;

    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find({key.first, key.second});
        if (it != midpoint.end()) return it->second;
        Eigen::Vector2d P = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
        VTag ta = mesh.tags[a], tb = mesh.tags[b];
        VTag t = VTag::Interior;
        if (ta == VTag::InnerS && tb == VTag::InnerS) {
            t = VTag::InnerS;
            if (mesh.inner_circle_radius > 0) P *= mesh.inner_circle_radius / P.norm();
        } else if (ta == VTag::OuterV && tb == VTag::OuterV) {
            t = VTag::OuterV;
            if (mesh.outer_circle_radius > 0) P *= mesh.outer_circle_radius / P.norm();
        }
        int id = static_cast<int>(m.vertices.size());
        m.vertices.push_back(P);
        m.tags.push_back(t);
        midpoint[{key.first, key.second}] = id;
        return id;
    };

    for (const auto& tr : mesh.triangles) {
        int ab = mid(tr[0], tr[1]), bc = mid(tr[1], tr[2]), ca = mid(tr[2], tr[0]);
        m.triangles.push_back({tr[0], ab, ca});
        m.triangles.push_back({ab, tr[1], bc});
        m.triangles.push_back({ca, bc, tr[2]});
        m.triangles.push_back({ab, bc, ca});
    }
    m.periodic_partner.assign(m.vertices.size(), -1);
    m.check();
    return m;
}

//! Plain-text format: header "V T", V vertex lines "x y tag", T lines "i j k".
inline void save_mesh(const Mesh2D& m, std::ostream& os) {
    os.precision(17);
    os << m.vertices.size() << ' ' << m.triangles.size() << '\n';
    for (size_t v = 0; v < m.vertices.size(); ++v)
        os << m.vertices[v].x() << ' ' << m.vertices[v].y() << ' ' << tag_name(m.tags[v]) << '\n';
    for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

inline Mesh2D load_mesh(std::istream& is) {
    size_t nv = 0, nt = 0;
    if (!(is >> nv >> nt)) throw std::runtime_error("load_mesh: bad header");
    Mesh2D m;
    m.vertices.resize(nv);
    m.tags.resize(nv);
    for (size_t v = 0; v < nv; ++v) {
        std::string tag;
        if (!(is >> m.vertices[v].x() >> m.vertices[v].y() >> tag))
            throw std::runtime_error("load_mesh: bad vertex line");
        m.tags[v] = tag_from_name(tag);
    }
    m.triangles.resize(nt);
    for (size_t t = 0; t < nt; ++t) {
        auto& tr = m.triangles[t];
        if (!(is >> tr[0] >> tr[1] >> tr[2])) throw std::runtime_error("load_mesh: bad triangle line");
        for (int k : tr)
            if (k < 0 || k >= static_cast<int>(nv)) throw std::runtime_error("load_mesh: index out of range");
    }
    // re-derive periodic pairing by translation matching
    m.periodic_partner.assign(nv, -1);
    for (size_t v = 0; v < nv; ++v) {
        if (m.tags[v] != VTag::PeriodicSlave) continue;
        for (size_t w = 0; w < nv; ++w) {
            if (m.tags[w] != VTag::PeriodicMaster && m.tags[w] != VTag::PeriodicSlave) continue;
            if (w == v) continue;
            Eigen::Vector2d d = m.vertices[w] - m.vertices[v];
            if ((std::abs(d.x() - 1) < 1e-9 && std::abs(d.y()) < 1e-9) ||
                (std::abs(d.y() - 1) < 1e-9 && std::abs(d.x()) < 1e-9)) {
                m.periodic_partner[v] = static_cast<int>(w);
                break;
            }
        }
        if (m.periodic_partner[v] < 0) throw std::runtime_error("load_mesh: unpaired periodic slave");
    }
    m.check();
    return m;
}

}  // namespace fhom

#endif
