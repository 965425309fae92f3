// Command line front end: configuration-driven runs of the capacity, cell,
// regime, and fiber-limit computations with reproducible CSV/JSON output.
// Every run writes its resolved configuration hash into the output header so
// identical configs byte-reproduce their files.
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhom/capacity.hpp"
#include "fhom/cell.hpp"
#include "fhom/limit1d.hpp"
#include "fhom/regimes.hpp"

using json = nlohmann::json;
using namespace fhom;

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

//! Resolved-config hash: stable across runs with the same flags and config file.
std::string config_hash(const CLI::App& app) {
    std::ostringstream os;
    os << app.config_to_str(true, false);
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(os.str());
    return hex.str();
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);  // binary: byte-identical reruns on any platform
    if (!file) throw CLI::RuntimeError("cannot open output file: " + path, 4);
    return file;
}

struct DensitySpec {
    std::string kind = "isotropic";  // isotropic | pnorm | aniso
    double p = 2.0;
    double lambda = 1.0, mu = 1.0, c = 1.0;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--f-kind", kind, "density: isotropic | pnorm | aniso")
            ->check(CLI::IsMember({"isotropic", "pnorm", "aniso"}))
            ->capture_default_str();
        cmd->add_option("-p,--exponent", p, "growth exponent p > 1")->capture_default_str();
        cmd->add_option("--lambda", lambda, "first isotropic coefficient")->capture_default_str();
        cmd->add_option("--mu", mu, "second isotropic coefficient")->capture_default_str();
        cmd->add_option("--coef", c, "p-norm coefficient")->capture_default_str();
    }

    EnergyDensity make() const {
        if (kind == "isotropic") {
            if (p != 2.0) throw CLI::RuntimeError("isotropic density requires p = 2", 2);
            return EnergyDensity::isotropic(lambda, mu);
        }
        if (kind == "pnorm") return EnergyDensity::p_norm(c, p);
        if (p != 2.0) throw CLI::RuntimeError("aniso density requires p = 2", 2);
        return EnergyDensity::aniso_example();
    }
};

struct SectionSpec {
    std::string shape = "disc";  // disc | square
    double size = 1.0;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("-S,--section", shape, "cross section: disc | square")
            ->check(CLI::IsMember({"disc", "square"}))
            ->capture_default_str();
        cmd->add_option("--size", size, "disc radius or square side")->capture_default_str();
    }

    CrossSection make() const {
        return shape == "disc" ? scaled_disc(size) : square_cross_section(size);
    }
};

// ---------------------------------------------------------------- cap

struct CapArgs {
    DensitySpec f;
    SectionSpec S;
    std::vector<double> a{0, 0, 0};
    double zeta = 0;
    std::vector<double> ladder;
    double h = 0.04;
    std::string out;
};

void run_cap(const CapArgs& c, const std::string& hash) {
    EnergyDensity f = c.f.make();
    CrossSection S = c.S.make();
    Eigen::Vector3d a{c.a[0], c.a[1], c.a[2]};
    double p = f.exponent();
    std::ofstream file;
    std::ostream& os = open_out(file, c.out);
    os << "# fhom cap, config " << hash << "\n";
    os << "# section " << c.S.shape << " size " << c.S.size << ", target h " << c.h << "\n";
    os << "r,R,h,value,scaled_value,error_estimate\n";
    os << std::setprecision(12);

    if (p == 2.0) {
        // contrast ladder r = 2^-k, R = 1/(k log 2): scaled_value = |log r| cap
        std::vector<double> ks = c.ladder.empty() ? std::vector<double>{6, 7, 8, 9, 10} : c.ladder;
        double prev = 0;
        bool first = true;
        for (double k : ks) {
            double r = std::pow(2.0, -k), R = 1.0 / (k * std::log(2.0));
            ScaledCapacityP2 sc = scaled_capacity_p2(f, S, r, R, a, c.h);
            os << r << "," << R << "," << c.h << "," << sc.raw_cap << "," << sc.value << ","
               << (first ? 0.0 : std::abs(sc.value - prev)) << "\n";
            prev = sc.value;
            first = false;
        }
    } else if (p < 2.0) {
        // plane-limit ladder: scaled_value is the extrapolated limit (constant column)
        std::vector<double> Rs = c.ladder.empty() ? std::vector<double>{4, 8, 16, 32} : c.ladder;
        MinimizeOptions opts;
        opts.max_iter = 500;
        PlaneLimitResult r = capacity_plane_limit(f, S, a, c.zeta, Rs, c.h, opts);
        for (size_t i = 0; i < r.R_ladder.size(); ++i)
            os << "," << r.R_ladder[i] << "," << c.h << "," << r.values[i] << "," << r.limit << ","
               << (i + 1 == r.R_ladder.size() ? r.error_estimate : 0.0) << "\n";
    } else {
        // p > 2: values decay to zero; scaled_value compensates the fitted rate
        std::vector<double> Rs = c.ladder.empty() ? std::vector<double>{2, 4, 8, 16} : c.ladder;
        for (double R : Rs) {
            CapacityQuery q;
            q.f = f;
            q.S = S;
            q.a = a;
            q.zeta = c.zeta;
            q.R = R;
            q.h = c.h;
            double v = capacity(q).value;
            double s = (p - 2) / (p - 1);
            os << "," << R << "," << c.h << "," << v << "," << v * (std::pow(R, s * (p - 1)))
               << ",0\n";
        }
    }
}

// ---------------------------------------------------------------- cell / soft-cell

struct CellArgs {
    DensitySpec g;
    SectionSpec S;
    std::string form = "kappa";  // kappa | k | aniso
    double coeff = 1.0;          // kappa or k
    double h = 0.04;
    std::string out;
};

void write_matrix_block(std::ostream& os, const std::string& name, const Eigen::MatrixXd& M,
                        json extra = json::object()) {
    json j;
    j["form"] = name;
    std::vector<std::vector<double>> rows(M.rows());
    for (int i = 0; i < M.rows(); ++i)
        for (int k = 0; k < M.cols(); ++k) rows[i].push_back(M(i, k));
    j["matrix"] = rows;
    for (auto& [key, val] : extra.items()) j[key] = val;
    os << "# " << j.dump() << "\n";
}

void run_cell(const CellArgs& c, const std::string& hash) {
    EnergyDensity g = c.g.make();
    CrossSection S = c.S.make();
    std::ofstream file;
    std::ostream& os = open_out(file, c.out);
    os << "# fhom cell, config " << hash << "\n";
    os << std::setprecision(12);
    os << "load,value\n";
    if (c.form == "k") {
        Eigen::Matrix2d G = ghom_k_form(g, S, c.coeff, c.h);
        auto val = [&](const Eigen::Vector2d& x) { return x.dot(G * x); };
        os << "e1," << val({1, 0}) << "\n";
        os << "e2," << val({0, 1}) << "\n";
        os << "e1+e2," << val({1, 1}) << "\n";
        write_matrix_block(os, "k", G);
    } else if (c.form == "kappa") {
        Eigen::Matrix4d C = ghom_kappa_form(g, S, c.coeff, c.h);
        for (int i = 0; i < 4; ++i) {
            Eigen::Vector4d e = Eigen::Vector4d::Unit(i);
            os << "e" << i + 1 << "," << e.dot(C * e) << "\n";
        }
        Eigen::Vector4d ones = Eigen::Vector4d::Ones();
        os << "ones," << ones.dot(C * ones) << "\n";
        write_matrix_block(os, "kappa", C);
    } else {
        AnisoCellReport rep = aniso_cell_matrix(S, c.coeff, g, c.h);
        for (int i = 0; i < 4; ++i) {
            Eigen::Vector4d e = Eigen::Vector4d::Unit(i);
            os << "e" << i + 1 << "," << e.dot(rep.C * e) << "\n";
        }
        json extra;
        extra["flags"] = rep.flags;
        write_matrix_block(os, "aniso_direct", rep.C, extra);
        write_matrix_block(os, "aniso_entry_formulas", rep.C_entries);
    }
}

struct SoftArgs {
    DensitySpec f;
    SectionSpec S;
    std::vector<double> a{0, 0, 0};
    double zeta = 0;
    double h = 0.03;
    std::string out;
};

void run_soft(const SoftArgs& c, const std::string& hash) {
    EnergyDensity f = c.f.make();
    CrossSection S = c.S.make();
    Eigen::Vector3d a{c.a[0], c.a[1], c.a[2]};
    std::ofstream file;
    std::ostream& os = open_out(file, c.out);
    os << "# fhom soft-cell, config " << hash << "\n";
    os << std::setprecision(12);
    os << "a1,a2,a3,zeta,value\n";
    double v = soft_density(f, S, a, c.zeta, c.h).value;
    os << a[0] << "," << a[1] << "," << a[2] << "," << c.zeta << "," << v << "\n";

    if (f.exponent() == 2.0) {
        // quadratic density: assemble the full form in (a, zeta) from 10 solves
        // sharing one factorization
        Mesh2D mesh = mesh_periodic_cell(S, c.h);
        ConstraintSet cs;
        cs.periodic = true;
        cs.rigid_inner = RigidData{{0, 0, 0}, 0, S.diameter};
        cs.mean_gauge = true;
        QuadraticPath path(mesh, f.is_quadratic() ? f : f.recession(), cs);
        double frac = 1.0 - mesh.area();
        auto value = [&](const Eigen::Vector4d& x) {
            Eigen::Vector3d av = x.head<3>();
            return path.solve_with(RigidData{av, x[3], S.diameter}, -av * frac).first;
        };
        Eigen::Matrix4d Q;
        for (int i = 0; i < 4; ++i) Q(i, i) = value(Eigen::Vector4d::Unit(i));
        for (int i = 0; i < 4; ++i)
            for (int k = i + 1; k < 4; ++k) {
                double m = value(Eigen::Vector4d::Unit(i) + Eigen::Vector4d::Unit(k));
                Q(i, k) = Q(k, i) = 0.5 * (m - Q(i, i) - Q(k, k));
            }
        write_matrix_block(os, "soft_quadratic", Q);
    }
}

// ---------------------------------------------------------------- regime

struct RegimeArgs {
    std::string family = "power";  // power | strong
    double r_exp = 3, l_coef = 1, l_exp = -4;
    double p = 2, area = M_PI;
    std::string out;
};

ScalingFamily make_family(const RegimeArgs& c) {
    ScalingFamily fam;
    fam.p = c.p;
    fam.area_S = c.area;
    if (c.family == "strong") {
        fam.log_r = [](double e) { return -1 / (e * e); };
        fam.log_l = [](double e) { return 2 * std::log(e) + 5 / (e * e); };
    } else {
        fam.log_r = [ar = c.r_exp](double e) { return ar * std::log(e); };
        fam.log_l = [lc = c.l_coef, al = c.l_exp](double e) {
            return std::log(lc) + al * std::log(e);
        };
    }
    return fam;
}

void run_regime(const RegimeArgs& c, const std::string& hash) {
    RegimeReport r = classify(make_family(c));
    json j;
    j["config_hash"] = hash;
    j["family"] = c.family;
    j["p"] = r.p;
    auto num = [](double v) { return std::isinf(v) ? json("inf") : json(v); };
    j["k"] = num(r.k);
    j["kappa"] = num(r.kappa);
    j["gamma_p"] = num(r.gamma_p);
    j["domain"] = r.domain_label;
    switch (r.cf_branch) {
        case CfBranch::ValueFunction: j["cf_branch"] = "value_function"; break;
        case CfBranch::QuadraticNoTwist: j["cf_branch"] = "quadratic_no_twist"; break;
        case CfBranch::Indicator: j["cf_branch"] = "indicator"; break;
    }
    j["degenerate"] = r.degenerate;
    std::ofstream file;
    std::ostream& os = open_out(file, c.out);
    os << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- limit1d

struct Limit1dArgs {
    std::string regime = "kappa";  // kappa | k
    DensitySpec g;
    SectionSpec S;
    double kappa = 1.0, k = 1.0;
    double gamma = 1.0, p = 2.0;
    double length = 1.0, tau = 0.5;
    int nodes = 101;
    double h_cell = 0.05;
    double beta0 = 0, g0z = 0;
    std::string u_file;
    std::string out;
};

//! Piecewise-linear interpolant of matrix velocity samples (x, u1, u2, u3).
std::function<Eigen::Vector3d(double)> load_u_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::RuntimeError("cannot read u samples: " + path, 4);
    std::vector<double> xs;
    std::vector<Eigen::Vector3d> us;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, u1, u2, u3;
        if (ls >> x >> u1 >> u2 >> u3) {
            xs.push_back(x);
            us.push_back({u1, u2, u3});
        }
    }
    if (xs.size() < 2) throw CLI::RuntimeError("u samples: need at least two rows", 4);
    return [xs, us](double x) {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        size_t i = std::clamp<size_t>(it - xs.begin(), 1, xs.size() - 1);
        double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return Eigen::Vector3d((1 - t) * us[i - 1] + t * us[i]);
    };
}

void run_limit1d(const Limit1dArgs& c, const std::string& hash) {
    EnergyDensity g = c.g.make();
    CrossSection S = c.S.make();
    FiberProblem fp;
    fp.diamS = S.diameter;
    fp.tau = c.tau;
    fp.length = c.length;
    fp.n_nodes = c.nodes;
    if (c.regime == "kappa") {
        fp.regime = DomainCase::KappaFinite;
        fp.C = ghom_kappa_form(g, S, c.kappa, c.h_cell);
    } else {
        fp.regime = DomainCase::KFinite;
        fp.G = ghom_k_form(g, S, c.k, c.h_cell);
    }
    if (c.p == 2.0)
        fp.cfd = CapacityDensity::from_quadratic(Eigen::Matrix3d::Identity(), c.gamma);
    else
        fp.cfd = CapacityDensity::from_power_form(Eigen::Matrix4d::Identity(), c.gamma, c.p);
    if (!c.u_file.empty()) fp.u_line = load_u_samples(c.u_file);
    if (c.beta0 != 0) fp.forces.beta0_avg = [b = c.beta0](double) { return b; };
    if (c.g0z != 0) fp.forces.g0_avg = [gz = c.g0z](double) { return Eigen::Vector3d(0, 0, gz); };

    FiberSolution sol = solve_fiber(fp);
    std::ofstream file;
    std::ostream& os = open_out(file, c.out);
    os << "# fhom limit1d, config " << hash << "\n";
    os << "# regime " << c.regime << ", energy " << std::setprecision(12) << sol.energy << "\n";
    os << "x3,v1,v2,v3,theta,w,delta\n";
    auto at = [](const Eigen::VectorXd& v, int i) { return v.size() ? v[i] : 0.0; };
    for (int i = 0; i < sol.t.x.size(); ++i)
        os << sol.t.x[i] << "," << sol.t.v(i, 0) << "," << sol.t.v(i, 1) << "," << sol.t.v(i, 2)
           << "," << at(sol.t.theta, i) << "," << at(sol.t.w, i) << "," << at(sol.t.delta, i)
           << "\n";
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    CapArgs cap;
    std::string param = "zeta";  // zeta | a1 | a3
    std::vector<double> values;
    std::string out_dir = "sweep";
    int jobs = 1;
};

void run_sweep(const SweepArgs& c, const std::string& hash) {
    if (c.values.empty()) throw CLI::RuntimeError("sweep: --values is required", 2);
    std::filesystem::create_directories(c.out_dir);
    std::atomic<size_t> next{0};
    std::atomic<int> failures{0};
    auto worker = [&] {
        for (size_t i = next++; i < c.values.size(); i = next++) {
            CapArgs point = c.cap;  // workers share only immutable inputs
            double v = c.values[i];
            if (c.param == "zeta")
                point.zeta = v;
            else if (c.param == "a1")
                point.a[0] = v;
            else
                point.a[2] = v;
            std::ostringstream name;
            name << c.out_dir << "/cap_" << c.param << "_" << v << ".csv";
            point.out = name.str();
            try {
                run_cap(point, hash);
            } catch (const std::exception& e) {
                std::cerr << "sweep point " << c.param << "=" << v << " failed: " << e.what()
                          << "\n";
                ++failures;
            }
        }
    };
    std::vector<std::thread> pool;
    int n = std::clamp(c.jobs, 1, static_cast<int>(c.values.size()));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failures > 0) throw CLI::RuntimeError("sweep: " + std::to_string(failures) + " points failed", 3);
    std::cout << "sweep: " << c.values.size() << " points written to " << c.out_dir << "\n";
}

// ---------------------------------------------------------------- verify

struct VerifyRow {
    std::string name;
    double measured, target, tol;
    bool pass() const { return std::abs(measured - target) <= tol; }
};

int run_verify(const std::string& suite) {
    std::vector<VerifyRow> rows;

    if (suite == "quick" || suite == "all" || suite == "isotropic") {
        rows.push_back({"disc torsion constant", torsion_constant(unit_disc(), 0.04), 0.5, 2e-3});
        double lam = 1.0, mu = 1.0;
        double E2 = mu * (3 * lam + 2 * mu) / (2 * (lam + mu));
        Eigen::Matrix4d C = ghom_kappa_form(EnergyDensity::isotropic(lam, mu), unit_disc(), 1.0, 0.05);
        rows.push_back({"bending cell C11", C(0, 0), E2 / 4, 0.02 * E2 / 4});
        rows.push_back({"bending cell C33", C(2, 2), E2, 0.02 * E2});
        rows.push_back({"bending cell C44", C(3, 3), mu, 0.02 * mu});
    }
    if (suite == "quick" || suite == "all") {
        Mesh2D mesh = mesh_annulus(unit_disc(), 2.0, 0.03, Grading::Uniform);
        double v3 = capacity_on_mesh(EnergyDensity::p_norm(1.0, 3.0), mesh, {0, 0, 1}, 0, 2.0).value;
        double s = 0.5;
        double oracle = std::pow(s / (std::pow(2.0, s) - 1), 2.0);
        rows.push_back({"radial p=3 capacity", v3 / (std::pow(2.0, -1.5) * 2 * M_PI), oracle,
                        0.02 * oracle});
        RegimeArgs unit;  // algebraically cancelling power family: k = 1
        unit.area = M_PI;
        unit.l_coef = 1.0 / M_PI;  // divide out |S| so the limit is exactly 1
        RegimeReport r = classify(make_family(unit));
        rows.push_back({"unit power family k", r.k, 1.0, 1e-9});
    }

    int fails = 0;
    std::cout << std::left << std::setw(28) << "check" << std::setw(16) << "measured"
              << std::setw(16) << "target" << "status\n";
    for (const VerifyRow& row : rows) {
        bool ok = row.pass();
        fails += ok ? 0 : 1;
        std::cout << std::left << std::setw(28) << row.name << std::setw(16)
                  << std::setprecision(8) << row.measured << std::setw(16) << row.target
                  << (ok ? "PASS" : "FAIL") << "\n";
    }
    std::cout << (fails == 0 ? "all checks passed" : std::to_string(fails) + " checks FAILED")
              << "\n";
    return fails == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"effective quantities of high-contrast fiber composites"};
    app.set_config("--config", "", "key = value config file; flags override file keys");
    app.require_subcommand(1);

    CapArgs cap;
    CLI::App* cap_cmd = app.add_subcommand("cap", "anisotropic capacity along a domain ladder");
    cap.f.add_flags(cap_cmd);
    cap.S.add_flags(cap_cmd);
    cap_cmd->add_option("-a,--translation", cap.a, "translation vector a")->expected(3)
        ->delimiter(',');
    cap_cmd->add_option("--zeta", cap.zeta, "rotation amplitude")->capture_default_str();
    cap_cmd->add_option("--ladder", cap.ladder, "contrast exponents (p = 2) or radii (p != 2)")
        ->delimiter(',');
    cap_cmd->add_option("--mesh-h", cap.h, "target mesh size")->capture_default_str();
    cap_cmd->add_option("-o,--out", cap.out, "output CSV (default stdout)");

    CellArgs cell;
    CLI::App* cell_cmd = app.add_subcommand("cell", "effective cell quadratic forms");
    cell.g.add_flags(cell_cmd);
    cell.S.add_flags(cell_cmd);
    cell_cmd->add_option("--form", cell.form, "k | kappa | aniso")
        ->check(CLI::IsMember({"k", "kappa", "aniso"}))
        ->capture_default_str();
    cell_cmd->add_option("--coeff", cell.coeff, "regime coefficient k or kappa")
        ->capture_default_str();
    cell_cmd->add_option("--mesh-h", cell.h, "target mesh size")->capture_default_str();
    cell_cmd->add_option("-o,--out", cell.out, "output CSV (default stdout)");

    SoftArgs soft;
    soft.S.size = 0.3;  // the inclusion must fit strictly inside the unit cell
    CLI::App* soft_cmd = app.add_subcommand("soft-cell", "periodic soft-matrix density");
    soft.f.add_flags(soft_cmd);
    soft.S.add_flags(soft_cmd);
    soft_cmd->add_option("-a,--translation", soft.a, "translation vector a")->expected(3)
        ->delimiter(',');
    soft_cmd->add_option("--zeta", soft.zeta, "rotation amplitude")->capture_default_str();
    soft_cmd->add_option("--mesh-h", soft.h, "target mesh size")->capture_default_str();
    soft_cmd->add_option("-o,--out", soft.out, "output CSV (default stdout)");

    RegimeArgs reg;
    CLI::App* reg_cmd = app.add_subcommand("regime", "classify a contrast scaling family");
    reg_cmd->add_option("--family", reg.family, "power | strong")
        ->check(CLI::IsMember({"power", "strong"}))
        ->capture_default_str();
    reg_cmd->add_option("--r-exp", reg.r_exp, "r = eps^alpha exponent")->capture_default_str();
    reg_cmd->add_option("--l-coef", reg.l_coef, "l coefficient")->capture_default_str();
    reg_cmd->add_option("--l-exp", reg.l_exp, "l = c eps^beta exponent")->capture_default_str();
    reg_cmd->add_option("-p,--exponent", reg.p, "growth exponent")->capture_default_str();
    reg_cmd->add_option("--area", reg.area, "cross section area |S|")->capture_default_str();
    reg_cmd->add_option("-o,--out", reg.out, "output JSON (default stdout)");

    Limit1dArgs lim;
    CLI::App* lim_cmd = app.add_subcommand("limit1d", "decoupled fiber line problem");
    lim.g.add_flags(lim_cmd);
    lim.S.add_flags(lim_cmd);
    lim_cmd->add_option("--regime", lim.regime, "kappa (bending) | k (stretch)")
        ->check(CLI::IsMember({"kappa", "k"}))
        ->capture_default_str();
    lim_cmd->add_option("--kappa", lim.kappa, "bending coefficient")->capture_default_str();
    lim_cmd->add_option("--k", lim.k, "stretch coefficient")->capture_default_str();
    lim_cmd->add_option("--gamma", lim.gamma, "coupling strength gamma")->capture_default_str();
    lim_cmd->add_option("--coupling-p", lim.p, "coupling exponent")->capture_default_str();
    lim_cmd->add_option("--length", lim.length, "fiber length")->capture_default_str();
    lim_cmd->add_option("--tau", lim.tau, "twisting force weight")->capture_default_str();
    lim_cmd->add_option("--nodes", lim.nodes, "grid nodes")->capture_default_str();
    lim_cmd->add_option("--h-cell", lim.h_cell, "cell mesh size for the forms")
        ->capture_default_str();
    lim_cmd->add_option("--beta0", lim.beta0, "constant twisting force density")
        ->capture_default_str();
    lim_cmd->add_option("--g0z", lim.g0z, "constant axial force density")->capture_default_str();
    lim_cmd->add_option("--u-file", lim.u_file, "CSV of matrix velocity samples x,u1,u2,u3");
    lim_cmd->add_option("-o,--out", lim.out, "output CSV (default stdout)");

    SweepArgs sw;
    CLI::App* sw_cmd = app.add_subcommand("sweep", "capacity parameter sweep");
    sw.cap.f.add_flags(sw_cmd);
    sw.cap.S.add_flags(sw_cmd);
    sw_cmd->add_option("-a,--translation", sw.cap.a, "base translation vector")->expected(3)
        ->delimiter(',');
    sw_cmd->add_option("--zeta", sw.cap.zeta, "base rotation amplitude")->capture_default_str();
    sw_cmd->add_option("--ladder", sw.cap.ladder, "ladder passed to each point")->delimiter(',');
    sw_cmd->add_option("--mesh-h", sw.cap.h, "target mesh size")->capture_default_str();
    sw_cmd->add_option("--param", sw.param, "swept parameter: zeta | a1 | a3")
        ->check(CLI::IsMember({"zeta", "a1", "a3"}))
        ->capture_default_str();
    sw_cmd->add_option("--values", sw.values, "swept values")->delimiter(',')->required();
    sw_cmd->add_option("--out-dir", sw.out_dir, "directory for per-point CSV files")
        ->capture_default_str();
    sw_cmd->add_option("-j,--jobs", sw.jobs, "worker pool size")->capture_default_str();

    std::string suite = "quick";
    CLI::App* ver_cmd = app.add_subcommand("verify", "run the built-in oracle checks");
    ver_cmd->add_option("--suite", suite, "quick | isotropic | all")
        ->check(CLI::IsMember({"quick", "isotropic", "all"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        std::string hash = config_hash(app);
        if (cap_cmd->parsed()) run_cap(cap, hash);
        if (cell_cmd->parsed()) run_cell(cell, hash);
        if (soft_cmd->parsed()) run_soft(soft, hash);
        if (reg_cmd->parsed()) run_regime(reg, hash);
        if (lim_cmd->parsed()) run_limit1d(lim, hash);
        if (sw_cmd->parsed()) run_sweep(sw, hash);
        if (ver_cmd->parsed()) return run_verify(suite);
    } catch (const CLI::RuntimeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.get_exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
