// Command-line front end: exact spectral solves, asymptotic evaluation,
// region classification, curve tabulation, conditional laws, Monte Carlo
// simulation and reproduction of the reference tables/figure data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "amsq/approx.hpp"
#include "amsq/conditional.hpp"
#include "amsq/kernel.hpp"
#include "amsq/params.hpp"
#include "amsq/saddle.hpp"
#include "amsq/simulate.hpp"
#include "amsq/spectral.hpp"

using nlohmann::json;

namespace {

constexpr const char* kSchemaVersion = "amsq-output-v1";

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Output {
    std::string format = "csv";
    std::string path;
    std::vector<std::string> columns;
    std::vector<json> rows;
    std::string command;
    json params_echo;

    void add_row(const json& row) { rows.push_back(row); }

    void write() const {
        std::ostream* os = &std::cout;
        std::ofstream file;
        if (!path.empty()) {
            file.open(path);
            if (!file) throw std::runtime_error("cannot open output file: " + path);
            os = &file;
        }
        if (format == "json") {
            json doc;
            doc["schema"] = kSchemaVersion;
            doc["command"] = command;
            doc["params"] = params_echo;
            doc["rows"] = rows;
            *os << doc.dump(2) << "\n";
            return;
        }
        *os << "# " << kSchemaVersion << " command=" << command
            << " params=" << params_echo.dump() << "\n";
        for (size_t i = 0; i < columns.size(); ++i)
            *os << columns[i] << (i + 1 < columns.size() ? "," : "\n");
        for (const auto& row : rows) {
            for (size_t i = 0; i < columns.size(); ++i) {
                const json& v = row.at(columns[i]);
                if (v.is_number_float())
                    *os << g17(v.get<double>());
                else if (v.is_string())
                    *os << v.get<std::string>();
                else
                    *os << v.dump();
                *os << (i + 1 < columns.size() ? "," : "\n");
            }
        }
    }
};

struct CommonOpts {
    int n = 0;
    double lambda = 0.0;
    double c = -1.0;
    double gamma = -1.0;
    std::string format = "csv";
    std::string out;

    amsq::Model model() const {
        double cc = c;
        if (cc < 0.0 && gamma > 0.0) cc = gamma * n;
        amsq::ModelParams p{n, lambda, cc};
        auto v = amsq::validate(p);
        if (!v.ok) throw amsq::error(v.code, v.detail);
        return amsq::Model{p, amsq::derive_params(p)};
    }

    json echo() const {
        json j;
        j["n"] = n;
        j["lambda"] = lambda;
        j["c"] = c < 0.0 && gamma > 0.0 ? gamma * n : c;
        return j;
    }
};

void add_model_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--n", o.n, "number of sources")->envname("AMSQ_N");
    cmd->add_option("--lambda", o.lambda, "off->on rate")->envname("AMSQ_LAMBDA");
    auto* copt = cmd->add_option("--c", o.c, "channel capacity")->envname("AMSQ_C");
    cmd->add_option("--gamma", o.gamma, "c/N, alternative to --c")
        ->envname("AMSQ_GAMMA")
        ->excludes(copt);
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->envname("AMSQ_FORMAT");
    cmd->add_option("--out", o.out, "output path (default stdout)")->envname("AMSQ_OUT");
}

std::vector<double> parse_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& s : items) {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) out.push_back(std::stod(tok));
        }
    }
    return out;
}

// Theta column of the reference tables: Theta0 at k = 0, Theta+ for
// 0 < k < transition, Theta for interior k, Theta1 at k = N.
double table_theta(const amsq::Model& m, int k, double x) {
    double y = x / m.n(), z = double(k) / m.n();
    if (k == 0) return amsq::solve_theta0(m, y).theta;
    if (k == m.n()) return amsq::solve_theta1(m, y).theta;
    bool r3 = z <= m.d.gamma ||
              (amsq::in_coalescence_window(m, z) && y > amsq::curve_ystar(m, z));
    return r3 ? amsq::solve_theta_plus(m, y, z).theta : amsq::solve_theta(m, y, z).theta;
}

int cmd_params(const CommonOpts& o) {
    Output out;
    out.command = "params";
    out.format = o.format;
    out.path = o.out;
    out.params_echo = o.echo();
    out.columns = {"field", "value"};
    amsq::Model m = o.model();
    auto row = [&](const char* k, double v) { out.add_row({{"field", k}, {"value", v}}); };
    row("gamma", m.d.gamma);
    row("rho", m.d.rho);
    row("phi", m.d.phi);
    row("delta", m.d.delta);
    row("alpha", m.d.alpha);
    row("beta", m.d.beta);
    row("theta0", m.d.theta0);
    row("epsilon", m.d.epsilon);
    row("c_floor", m.d.c_floor);
    row("spectrum_size", m.spectrum_size());
    out.write();
    return 0;
}

int cmd_exact(const CommonOpts& o, std::vector<int> ks, std::vector<double> xs,
              bool use_double) {
    amsq::Model m = o.model();
    if (ks.empty())
        for (int k = 0; k <= m.n(); ++k) ks.push_back(k);
    Output out;
    out.command = "exact";
    out.format = o.format;
    out.path = o.out;
    out.params_echo = o.echo();
    out.columns = {"k", "x", "F", "f", "flags"};
    auto emit = [&](auto&& sol) {
        for (int k : ks)
            for (double x : xs) {
                auto F = sol.cdf(k, x);
                auto f = sol.density(k, std::max(x, 1e-300));
                std::string flags;
                if (F.flags.cancellation || f.flags.cancellation) flags = "CANCELLATION";
                out.add_row({{"k", k}, {"x", x}, {"F", F.value}, {"f", f.value}, {"flags", flags}});
            }
    };
    if (use_double)
        emit(amsq::build_solution(m));
    else
        emit(amsq::build_solution_dd(m));
    out.write();
    return 0;
}

int cmd_asymptotic(const CommonOpts& o, std::vector<int> ks, std::vector<double> xs,
                   bool all_regions) {
    amsq::Model m = o.model();
    if (ks.empty())
        for (int k = 0; k <= m.n(); ++k) ks.push_back(k);
    Output out;
    out.command = "asymptotic";
    out.format = o.format;
    out.path = o.out;
    out.params_echo = o.echo();
    out.columns = {"k", "x", "y", "z", "region", "saddle", "F_approx", "f_approx",
                   "is_deviation", "flags"};
    for (int k : ks) {
        for (double x : xs) {
            double y = x / m.n(), z = double(k) / m.n();
            json row{{"k", k}, {"x", x}, {"y", y}, {"z", z}};
            try {
                auto v = amsq::classify(m, y, z);
                auto d = amsq::density_approx(m, k, x);
                row["region"] = amsq::region_name(d.region);
                row["saddle"] = d.saddle ? *d.saddle : 0.0;
                row["f_approx"] = d.value.value();
                // CDF-level value from the region formula where available
                double F = std::numeric_limits<double>::quiet_NaN();
                bool dev = false;
                switch (d.region) {
                    case amsq::RegionTag::R1:
                    case amsq::RegionTag::R2: {
                        auto a = amsq::interior_G1(m, y, z);
                        F = a.value.value();
                        dev = a.is_deviation;
                        break;
                    }
                    case amsq::RegionTag::R3: {
                        auto a = amsq::interior_G2(m, y, z);
                        F = a.value.value();
                        dev = a.is_deviation;
                        break;
                    }
                    case amsq::RegionTag::I: F = amsq::corner_I(m, k, x).value.value(); break;
                    case amsq::RegionTag::II: F = amsq::transition_II(m, y, z).value.value(); break;
                    case amsq::RegionTag::III: {
                        auto a = amsq::boundary_III(m, k, y);
                        F = a.value.value();
                        dev = true;
                        break;
                    }
                    case amsq::RegionTag::IV:
                    case amsq::RegionTag::VI: {
                        auto a = amsq::boundary_IV(m, m.n() - k, y);
                        F = a.value.value();
                        dev = a.is_deviation;
                        break;
                    }
                    case amsq::RegionTag::V: F = amsq::corner_V(m, m.n() - k, y).value.value(); break;
                    case amsq::RegionTag::VII: F = amsq::boundary_VII(m, x, z).value.value(); break;
                    case amsq::RegionTag::VIII:
                        F = amsq::corner_VIII(m, m.n() - k, x).value.value();
                        break;
                }
                row["F_approx"] = F;
                row["is_deviation"] = dev ? 1 : 0;
                row["flags"] = "";
                (void)v;
            } catch (const amsq::error& e) {
                if (!all_regions) throw;
                row["region"] = "-";
                row["saddle"] = 0.0;
                row["F_approx"] = 0.0;
                row["f_approx"] = 0.0;
                row["is_deviation"] = 0;
                row["flags"] = amsq::errc_name(e.code());
            }
            out.add_row(row);
        }
    }
    out.write();
    return 0;
}

int cmd_curves(const CommonOpts& o, double z_min, double z_max, int steps) {
    amsq::Model m = o.model();
    Output out;
    out.command = "curves";
    out.format = o.format;
    out.path = o.out;
    out.params_echo = o.echo();
    out.columns = {"z", "Y0", "Y1", "Ystar", "Y2"};
    for (int i = 0; i <= steps; ++i) {
        double z = z_min + (z_max - z_min) * i / steps;
        auto c = amsq::curves(m, z);
        out.add_row({{"z", z},
                     {"Y0", c.y0},
                     {"Y1", c.y1 ? *c.y1 : std::numeric_limits<double>::quiet_NaN()},
                     {"Ystar", c.ystar ? *c.ystar : std::numeric_limits<double>::quiet_NaN()},
                     {"Y2", c.y2}});
    }
    out.write();
    return 0;
}

int cmd_classify(const CommonOpts& o, std::vector<double> ys, std::vector<double> zs) {
    amsq::Model m = o.model();
    Output out;
    out.command = "classify";
    out.format = o.format;
    out.path = o.out;
    out.params_echo = o.echo();
    out.columns = {"y", "z", "region", "distance_to_boundary"};
    for (double z : zs)
        for (double y : ys) {
            auto v = amsq::classify(m, y, z);
            out.add_row({{"y", y},
                         {"z", z},
                         {"region", amsq::region_name(v.tag)},
                         {"distance_to_boundary", v.distance_to_boundary}});
        }
    out.write();
    return 0;
}

int cmd_kernel_dump(const CommonOpts& o, const std::string& fn, double from, double to,
                    int steps, double z_fixed) {
    amsq::Model m = o.model();
    Output out;
    out.command = "kernel-dump";
    out.format = o.format;
    out.path = o.out;
    out.params_echo = o.echo();
    out.columns = {"arg", "value"};
    auto eval = [&](double t) -> double {
        if (fn == "sigma") return amsq::sigma(m, t);
        if (fn == "V") return amsq::branch_kernel(m, t).V;
        if (fn == "Delta") return amsq::branch_kernel(m, t).Delta;
        if (fn == "R1") return amsq::branch_kernel(m, t).R1;
        if (fn == "R2") return amsq::branch_kernel(m, t).R2;
        if (fn == "mu") return amsq::mu(m, t);
        if (fn == "mu_prime") return amsq::mu_prime(m, t);
        if (fn == "phi_entropy") return amsq::phi_entropy(m, t);
        if (fn == "theta_star") return amsq::theta_star(m, t);
        if (fn == "Y0") return amsq::curve_y0(m, t);
        if (fn == "Y1") return amsq::curve_y1(m, t);
        if (fn == "Ystar") return amsq::curve_ystar(m, t);
        if (fn == "Y2") return amsq::curve_y2(m, t);
        if (fn == "eta_ww_minus") return amsq::eta_ww(m, amsq::Branch::minus, t, z_fixed);
        if (fn == "eta_ww_plus") return amsq::eta_ww(m, amsq::Branch::plus, t, z_fixed);
        if (fn == "W_minus") return amsq::saddle_w(m, t, z_fixed).w_minus;
        if (fn == "W_plus") return amsq::saddle_w(m, t, z_fixed).w_plus;
        if (fn == "D") return amsq::discriminant(m, t, z_fixed);
        if (fn == "P_exact") return amsq::product_exact(m, t).value();
        if (fn == "P_tilde") return amsq::product_fixed(m, t);
        throw amsq::error(amsq::errc::out_of_range, "unknown function: " + fn);
    };
    for (int i = 0; i <= steps; ++i) {
        double t = from + (to - from) * i / steps;
        out.add_row({{"arg", t}, {"value", eval(t)}});
    }
    out.write();
    return 0;
}

int cmd_conditional(const CommonOpts& o, const std::string& given) {
    amsq::Model m = o.model();
    auto eq = given.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("--given", "expected buffer=X or sources=K");
    std::string what = given.substr(0, eq);
    double val = std::stod(given.substr(eq + 1));

    amsq::ConditionalLaw law;
    if (what == "buffer")
        law = amsq::sources_given_buffer(m, val);
    else if (what == "sources")
        law = amsq::buffer_given_sources(m, int(std::lround(val)));
    else
        throw CLI::ValidationError("--given", "expected buffer=X or sources=K");

    json descriptor;
    descriptor["kind"] = amsq::law_name(law.kind);
    descriptor["location"] = law.location;
    descriptor["scale"] = law.scale;
    descriptor["truncated_mass"] = law.truncated_mass;
    json terms = json::array();
    for (auto& [w, r] : law.mixture_terms) terms.push_back({{"weight", w}, {"second", r}});
    descriptor["mixture_terms"] = terms;

    Output out;
    out.command = "conditional";
    out.format = o.format;
    out.path = o.out;
    out.params_echo = o.echo();
    out.params_echo["given"] = given;
    out.params_echo["law"] = descriptor;
    out.columns = {"t", "density"};
    // sampled density curve
    if (law.kind == amsq::LawKind::gaussian) {
        for (int i = 0; i <= 200; ++i) {
            double t = law.location - 4 * law.scale + 8 * law.scale * i / 200.0;
            double d = std::exp(-0.5 * std::pow((t - law.location) / law.scale, 2)) /
                       (law.scale * std::sqrt(2 * M_PI));
            out.add_row({{"t", t}, {"density", d}});
        }
    } else if (law.kind == amsq::LawKind::exponential) {
        for (int i = 0; i <= 200; ++i) {
            double t = 6.0 * law.scale * i / 200.0;
            out.add_row({{"t", t}, {"density", std::exp(-t / law.scale) / law.scale}});
        }
    } else if (law.kind == amsq::LawKind::exp_mixture) {
        double mean = 0.0;
        for (auto& [w, rate] : law.mixture_terms) mean += w / rate;
        for (int i = 0; i <= 200; ++i) {
            double chi = 6.0 * mean * i / 200.0;
            double d = 0.0;
            for (auto& [w, rate] : law.mixture_terms) d += w * rate * std::exp(-rate * chi);
            out.add_row({{"t", chi}, {"density", d}});
        }
    } else {
        for (auto& [w, l] : law.mixture_terms)
            out.add_row({{"t", m.d.c_floor + l}, {"density", w}});
    }
    out.write();
    return 0;
}

int cmd_simulate(const CommonOpts& o, const amsq::SimConfig& cfg, bool compare) {
    amsq::Model m = o.model();
    auto est = amsq::run_simulation(m, cfg);
    Output out;
    out.command = "simulate";
    out.format = o.format;
    out.path = o.out;
    out.params_echo = o.echo();
    out.params_echo["horizon"] = cfg.horizon;
    out.params_echo["replications"] = cfg.replications;
    out.params_echo["seed"] = cfg.seed;
    out.columns = {"k", "x", "estimate", "half_width", "exact", "z_score", "covered"};
    if (compare) {
        auto sol = amsq::build_solution_dd(m);
        auto rep = amsq::compare_simulation(est, sol);
        for (const auto& c : rep.cells)
            out.add_row({{"k", c.k},
                         {"x", c.x},
                         {"estimate", c.estimate},
                         {"half_width", c.half_width},
                         {"exact", c.exact},
                         {"z_score", c.z_score},
                         {"covered", c.covered ? 1 : 0}});
        out.params_echo["comparison"] = {{"considered", rep.considered},
                                         {"covered", rep.covered},
                                         {"coverage", rep.coverage},
                                         {"max_abs_z", rep.max_abs_z}};
        if (o.format == "csv")
            std::cerr << "coverage " << rep.covered << "/" << rep.considered << " = "
                      << rep.coverage << "\n";
    } else {
        for (int k = 0; k <= est.n; ++k)
            for (size_t i = 0; i < est.x_grid.size(); ++i)
                out.add_row({{"k", k},
                             {"x", est.x_grid[i]},
                             {"estimate", est.joint[k][i]},
                             {"half_width", est.half_widths[k][i]},
                             {"exact", 0.0},
                             {"z_score", 0.0},
                             {"covered", 1}});
    }
    out.write();
    return 0;
}

int cmd_tables(const CommonOpts& o, const std::string& out_dir) {
    amsq::Model m = o.model();
    auto sol = amsq::build_solution_dd(m);
    const double x = 1.0;
    auto path = [&](const std::string& name) {
        return out_dir.empty() ? name : out_dir + "/" + name;
    };

    {
        Output t1;
        t1.command = "tables:table1";
        t1.format = o.format;
        t1.path = path("table1." + o.format);
        t1.params_echo = o.echo();
        t1.columns = {"k", "theta", "exact", "theta0_F3", "thetaplus_G2"};
        for (int k = 0; k <= 9; ++k) {
            double y = x / m.n(), z = double(k) / m.n();
            json row{{"k", k}, {"theta", table_theta(m, k, x)},
                     {"exact", sol.density(k, x).value}};
            double f3 = std::numeric_limits<double>::quiet_NaN();
            if (k <= m.d.c_floor - 1) {
                auto a = amsq::boundary_III(m, k, y);
                f3 = std::fabs(*a.saddle) * std::fabs(a.value.value());
            }
            double g2 = std::numeric_limits<double>::quiet_NaN();
            if (k >= 1) {
                auto a = amsq::interior_G2(m, y, z);
                g2 = std::fabs(*a.saddle) * std::fabs(a.value.value());
            }
            row["theta0_F3"] = f3;
            row["thetaplus_G2"] = g2;
            t1.add_row(row);
        }
        t1.write();
    }
    {
        Output t2;
        t2.command = "tables:table2";
        t2.format = o.format;
        t2.path = path("table2." + o.format);
        t2.params_echo = o.echo();
        t2.columns = {"k", "theta", "exact", "theta_G1", "theta1_F4"};
        for (int k = 10; k <= m.n(); ++k) {
            double y = x / m.n(), z = double(k) / m.n();
            json row{{"k", k}, {"theta", table_theta(m, k, x)},
                     {"exact", sol.density(k, x).value}};
            double g1 = std::numeric_limits<double>::quiet_NaN();
            if (k < m.n()) {
                auto a = amsq::interior_G1(m, y, z);
                g1 = std::fabs(*a.saddle) * std::fabs(a.value.value());
            }
            double f4 = std::numeric_limits<double>::quiet_NaN();
            if (m.n() - k <= 4) {
                auto a = amsq::boundary_IV(m, m.n() - k, y);
                f4 = std::fabs(*a.saddle) * std::fabs(a.value.value());
            }
            row["theta_G1"] = g1;
            row["theta1_F4"] = f4;
            t2.add_row(row);
        }
        t2.write();
    }
    // figure data: x-sweeps at fixed k, z-sweep at x = 0.001, k-sweep at x = 5
    auto sweep_x = [&](int k, double x_max, const std::string& name) {
        Output f;
        f.command = "tables:" + name;
        f.format = o.format;
        f.path = path(name + "." + o.format);
        f.params_echo = o.echo();
        f.columns = {"x", "exact", "approx"};
        for (int i = 1; i <= 160; ++i) {
            double xx = x_max * i / 160.0;
            double ap = std::numeric_limits<double>::quiet_NaN();
            try {
                ap = std::fabs(amsq::density_approx(m, k, xx).value.value());
            } catch (const amsq::error&) {
            }
            f.add_row({{"x", xx}, {"exact", sol.density(k, xx).value}, {"approx", ap}});
        }
        f.write();
    };
    sweep_x(17, 8.0, "fig_density_k17");
    sweep_x(3, 8.0, "fig_density_k3");
    sweep_x(0, 8.0, "fig_density_k0");
    {
        Output f;
        f.command = "tables:fig_z_sweep";
        f.format = o.format;
        f.path = path("fig_z_sweep_x0.001." + o.format);
        f.params_echo = o.echo();
        f.columns = {"k", "ln_exact", "ln_approx"};
        for (int k = m.d.c_floor + 1; k < m.n(); ++k) {
            double z = double(k) / m.n();
            double ap = std::numeric_limits<double>::quiet_NaN();
            try {
                auto a = amsq::boundary_VII(m, 0.001, z);
                ap = std::log(*a.saddle * m.n()) + a.value.log_mag;
            } catch (const amsq::error&) {
            }
            auto ex = sol.density(k, 0.001);
            f.add_row({{"k", k},
                       {"ln_exact", ex.log_value.sign != 0 ? ex.log_value.log_mag
                                                           : std::numeric_limits<double>::quiet_NaN()},
                       {"ln_approx", ap}});
        }
        f.write();
    }
    {
        Output f;
        f.command = "tables:fig_k_sweep";
        f.format = o.format;
        f.path = path("fig_k_sweep_x5." + o.format);
        f.params_echo = o.echo();
        f.columns = {"k", "exact", "approx"};
        for (int k = 1; k < m.n(); ++k) {
            double ap = std::numeric_limits<double>::quiet_NaN();
            try {
                ap = std::fabs(amsq::density_approx(m, k, 5.0).value.value());
            } catch (const amsq::error&) {
            }
            f.add_row({{"k", k}, {"exact", sol.density(k, 5.0).value}, {"approx", ap}});
        }
        f.write();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state analysis of the N-source on-off fluid buffer"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value config file");
    app.get_config_formatter_base()->comment('#');

    CommonOpts common;
    add_model_flags(&app, common);

    auto* params = app.add_subcommand("params", "validate and echo derived parameters");

    auto* exact = app.add_subcommand("exact", "exact spectral CDF/density rows");
    std::vector<int> exact_k;
    std::vector<std::string> exact_x;
    bool exact_double = false;
    exact->add_option("--k", exact_k, "source counts (default: all)");
    exact->add_option("--x", exact_x, "buffer levels (comma lists ok)")->required();
    exact->add_flag("--double", exact_double, "plain double precision (default: double-double)");

    auto* asym = app.add_subcommand("asymptotic", "asymptotic approximations");
    std::vector<int> asym_k;
    std::vector<std::string> asym_x;
    bool all_regions = false;
    asym->add_option("--k", asym_k, "source counts (default: all)");
    asym->add_option("--x", asym_x, "buffer levels")->required();
    asym->add_flag("--all-regions", all_regions, "tolerate per-point region errors");

    auto* curves = app.add_subcommand("curves", "region boundary curves");
    double z_min = 0.0, z_max = 1.0;
    int z_steps = 100;
    curves->add_option("--z-min", z_min);
    curves->add_option("--z-max", z_max);
    curves->add_option("--steps", z_steps);

    auto* classify = app.add_subcommand("classify", "region classification of (y, z) points");
    std::vector<std::string> cls_y, cls_z;
    classify->add_option("--y", cls_y, "y values")->required();
    classify->add_option("--z", cls_z, "z values")->required();

    auto* kdump = app.add_subcommand("kernel-dump", "tabulate a kernel function over a grid");
    std::string kfn;
    double kfrom = 0.0, kto = 1.0, kz = 0.5;
    int ksteps = 100;
    kdump->add_option("--function", kfn, "function name")->required();
    kdump->add_option("--from", kfrom)->required();
    kdump->add_option("--to", kto)->required();
    kdump->add_option("--steps", ksteps);
    kdump->add_option("--z", kz, "fixed z for the w/eta functions");

    auto* cond = app.add_subcommand("conditional", "conditional limit laws");
    std::string given;
    cond->add_option("--given", given, "buffer=X or sources=K")->required();

    auto* sim = app.add_subcommand("simulate", "Monte Carlo oracle");
    amsq::SimConfig scfg;
    std::vector<std::string> sim_grid;
    bool sim_compare = false;
    sim->add_option("--horizon", scfg.horizon);
    sim->add_option("--warmup", scfg.warmup);
    sim->add_option("--reps", scfg.replications);
    sim->add_option("--seed", scfg.seed);
    sim->add_option("--confidence", scfg.confidence);
    sim->add_option("--x-grid", sim_grid, "grid of buffer levels")->required();
    sim->add_flag("--compare-exact", sim_compare, "compare against the exact solution");

    auto* tables = app.add_subcommand("tables", "reproduce the reference tables and figure data");
    std::string out_dir;
    tables->add_option("--out-dir", out_dir, "directory for the emitted files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (params->parsed()) return cmd_params(common);
        if (exact->parsed())
            return cmd_exact(common, exact_k, parse_list(exact_x), exact_double);
        if (asym->parsed()) return cmd_asymptotic(common, asym_k, parse_list(asym_x), all_regions);
        if (curves->parsed()) return cmd_curves(common, z_min, z_max, z_steps);
        if (classify->parsed())
            return cmd_classify(common, parse_list(cls_y), parse_list(cls_z));
        if (kdump->parsed()) return cmd_kernel_dump(common, kfn, kfrom, kto, ksteps, kz);
        if (cond->parsed()) return cmd_conditional(common, given);
        if (sim->parsed()) {
            scfg.x_grid = parse_list(sim_grid);
            return cmd_simulate(common, scfg, sim_compare);
        }
        if (tables->parsed()) return cmd_tables(common, out_dir);
    } catch (const amsq::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
