// gbrisk: analytics and simulation harness for two-segment (green/brown)
// credit portfolios under a skew-normal two-factor model.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "gbrisk/exposure.hpp"
#include "gbrisk/lhp.hpp"
#include "gbrisk/mc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gbrisk;

namespace {

// Scenario presets shipped as data; an external --config file may override or
// extend them. "conv-*" are the convergence-study settings, "scenario-*" the
// sensitivity-study ones.
constexpr const char* kPresets = R"json({
  "scenarios": {
    "conv-1":     {"p_g": 0.005, "p_b": 0.010, "rho_g": 0.10, "rho_b": 0.10,
                   "omega_g": 0.30, "count_share_g": 0.30, "alpha": 0.5, "decay": 0.0},
    "conv-2":     {"p_g": 0.200, "p_b": 0.150, "rho_g": 0.15, "rho_b": 0.15,
                   "omega_g": 0.30, "count_share_g": 0.30, "alpha": 0.5, "decay": 0.0},
    "scenario-1": {"p_g": 0.028, "p_b": 0.028, "rho_g": 0.10, "rho_b": 0.15,
                   "omega_g": 0.25, "count_share_g": 0.25, "alpha": 0.0, "decay": 0.0},
    "scenario-2": {"p_g": 0.028, "p_b": 0.028, "rho_g": 0.15, "rho_b": 0.10,
                   "omega_g": 0.25, "count_share_g": 0.25, "alpha": 0.0, "decay": 0.0},
    "scenario-3": {"p_g": 0.020, "p_b": 0.028, "rho_g": 0.10, "rho_b": 0.10,
                   "omega_g": 0.25, "count_share_g": 0.25, "alpha": 0.0, "decay": 0.0},
    "scenario-4": {"p_g": 0.030, "p_b": 0.028, "rho_g": 0.10, "rho_b": 0.10,
                   "omega_g": 0.25, "count_share_g": 0.25, "alpha": 0.0, "decay": 0.0}
  },
  "alpha_sens_configs": [
    {"id": "corporate-normal", "p": 0.01, "rho": 0.15},
    {"id": "sme-normal",       "p": 0.03, "rho": 0.20},
    {"id": "corporate-stress", "p": 0.04, "rho": 0.20},
    {"id": "sme-stress",       "p": 0.06, "rho": 0.25}
  ]
})json";

struct Scenario {
    std::string name;
    double p_g = 0.0, p_b = 0.0, rho_g = 0.0, rho_b = 0.0;
    double omega_g = 0.25, count_share_g = 0.25;
    double alpha = 0.0;  // factor shape gamma
    double decay = 0.0;
};

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 7443;
    std::size_t samples = 1'000'000;
    bool quick = false;
    json merged;         // presets overlaid with the config file
    std::uint64_t hash = 0;

    std::size_t effective_samples() const { return quick ? 10'000 : samples; }
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void load_config(Options& opt) {
    opt.merged = json::parse(kPresets);
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw CLI::ValidationError("--config", "cannot open " + opt.config_path);
        json user = json::parse(in, nullptr, true, true);
        opt.merged.merge_patch(user);
    }
    opt.hash = fnv1a(opt.merged.dump() + "|" + std::to_string(opt.seed));
}

std::vector<std::string> scenario_names(const Options& opt) {
    std::vector<std::string> names;
    for (const auto& [k, v] : opt.merged.at("scenarios").items()) names.push_back(k);
    return names;
}

Scenario get_scenario(const Options& opt, const std::string& name) {
    const auto& all = opt.merged.at("scenarios");
    if (!all.contains(name)) {
        std::string list;
        for (const auto& n : scenario_names(opt)) list += " " + n;
        throw CLI::ValidationError("scenario", "unknown scenario '" + name +
                                                   "'; available:" + list);
    }
    const auto& j = all.at(name);
    Scenario s;
    s.name = name;
    s.p_g = j.at("p_g");
    s.p_b = j.at("p_b");
    s.rho_g = j.at("rho_g");
    s.rho_b = j.at("rho_b");
    s.omega_g = j.at("omega_g");
    s.count_share_g = j.value("count_share_g", s.omega_g);
    s.alpha = j.value("alpha", 0.0);
    s.decay = j.value("decay", 0.0);
    return s;
}

LimitModel limit_model(const Scenario& s, double alpha) {
    const double d = delta_from_shape(alpha);
    LoanClassParams green{s.p_g, s.rho_g, d, s.omega_g, 100};
    LoanClassParams brown{s.p_b, s.rho_b, d, 1.0 - s.omega_g, 100};
    return LimitModel(green, brown);
}

PortfolioSpec portfolio(const Scenario& s, std::size_t n, double alpha, double decay) {
    const double d = delta_from_shape(alpha);
    auto ng = static_cast<std::size_t>(std::lround(s.count_share_g * double(n)));
    if (ng == 0) ng = 1;
    if (ng >= n) ng = n - 1;
    PortfolioSpec spec;
    spec.green = {s.p_g, s.rho_g, d, s.omega_g, ng};
    spec.brown = {s.p_b, s.rho_b, d, 1.0 - s.omega_g, n - ng};
    spec.exposure_law = decay == 0.0 ? ExposureLaw::uniform() : ExposureLaw::power(decay);
    return spec;
}

class CsvWriter {
  public:
    CsvWriter(const Options& opt, const std::string& command, const fs::path& path,
              const std::string& header)
        : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        char prov[160];
        std::snprintf(prov, sizeof(prov), "# gbrisk %s config=%016" PRIx64 " seed=%" PRIu64,
                      command.c_str(), opt.hash, opt.seed);
        out_ << prov << "\n" << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return buf;
    }

  private:
    std::ofstream out_;
};

void write_plot_script(const fs::path& dir, const std::string& name,
                       const std::string& body) {
    std::ofstream out(dir / name, std::ios::trunc);
    out << "#!/usr/bin/env python3\n"
        << "import pandas as pd\nimport matplotlib\nmatplotlib.use('Agg')\n"
        << "import matplotlib.pyplot as plt\n\n"
        << body;
}

// ---------------------------------------------------------------- commands

int cmd_limit(const Options& opt) {
    fs::create_directories(opt.out_dir);
    CsvWriter csv(opt, "limit", fs::path(opt.out_dir) / "limit_curves.csv",
                  "scenario,alpha,loss,density,cdf");
    const std::vector<std::string> ids = {"scenario-1", "scenario-2", "scenario-3",
                                          "scenario-4"};
    constexpr int grid = 2001;
    for (const auto& id : ids) {
        const auto s = get_scenario(opt, id);
        for (double alpha : {-0.8, 0.0, 0.8}) {
            const auto model = limit_model(s, alpha);
            for (int k = 1; k <= grid; ++k) {
                const double ell = double(k) / double(grid + 1);
                csv.row({id, CsvWriter::num(alpha), CsvWriter::num(ell),
                         CsvWriter::num(mix_density(model, ell)),
                         CsvWriter::num(mix_cdf(model, ell))});
            }
        }
    }
    write_plot_script(opt.out_dir, "plot_limit.py", R"(df = pd.read_csv('limit_curves.csv', comment='#')
fig, axes = plt.subplots(2, 2, figsize=(11, 8))
for ax, (sid, g) in zip(axes.flat, df.groupby('scenario')):
    for alpha, ga in g.groupby('alpha'):
        ax.plot(ga.loss, ga.density, label=f'alpha={alpha}')
    ax.set_xlim(0, 0.12); ax.set_title(sid); ax.legend()
fig.tight_layout(); fig.savefig('limit_densities.png', dpi=150)
)");
    std::cout << "limit: wrote limit_curves.csv (" << ids.size() * 3 * grid << " rows)\n";
    return 0;
}

int cmd_var(const Options& opt) {
    fs::create_directories(opt.out_dir);
    {
        CsvWriter csv(opt, "var", fs::path(opt.out_dir) / "var_pg.csv",
                      "scenario,alpha,beta,p_g,var");
        for (const std::string id : {"scenario-1", "scenario-2"}) {
            auto s = get_scenario(opt, id);
            s.p_b = 0.028;
            for (double alpha : {-0.8, 0.8}) {
                for (double beta : {0.99, 0.995, 0.999}) {
                    for (int i = 0; i <= 28; ++i) {
                        const double pg = 0.004 + 0.002 * i;
                        auto sc = s;
                        sc.p_g = pg;
                        csv.row({id, CsvWriter::num(alpha), CsvWriter::num(beta),
                                 CsvWriter::num(pg),
                                 CsvWriter::num(mix_var(limit_model(sc, alpha), beta))});
                    }
                }
            }
        }
    }
    {
        CsvWriter csv(opt, "var", fs::path(opt.out_dir) / "var_omega.csv",
                      "scenario,alpha,omega_g,var999");
        for (const std::string id :
             {"scenario-1", "scenario-2", "scenario-3", "scenario-4"}) {
            const auto s = get_scenario(opt, id);
            for (double alpha : {-0.8, 0.0, 0.8}) {
                for (int i = 0; i <= 20; ++i) {
                    auto sc = s;
                    sc.omega_g = double(i) / 20.0;
                    csv.row({id, CsvWriter::num(alpha), CsvWriter::num(sc.omega_g),
                             CsvWriter::num(mix_var(limit_model(sc, alpha), 0.999))});
                }
            }
        }
    }
    write_plot_script(opt.out_dir, "plot_var.py", R"(pg = pd.read_csv('var_pg.csv', comment='#')
fig, axes = plt.subplots(1, 2, figsize=(11, 5))
for ax, (sid, g) in zip(axes, pg.groupby('scenario')):
    for (alpha, beta), ga in g.groupby(['alpha', 'beta']):
        style = '-' if alpha < 0 else '-.'
        ax.plot(ga.p_g, ga['var'], style, label=f'a={alpha} b={beta}')
    ax.set_title(sid); ax.set_xlabel('p_G'); ax.legend(fontsize=7)
fig.tight_layout(); fig.savefig('var_pg.png', dpi=150)

om = pd.read_csv('var_omega.csv', comment='#')
fig, axes = plt.subplots(2, 2, figsize=(11, 8))
for ax, (sid, g) in zip(axes.flat, om.groupby('scenario')):
    for alpha, ga in g.groupby('alpha'):
        color = 'red' if alpha == 0 else None
        ax.plot(ga.omega_g, ga.var999, color=color, label=f'alpha={alpha}')
    ax.set_title(sid); ax.set_xlabel('omega_G'); ax.legend()
fig.tight_layout(); fig.savefig('var_omega.png', dpi=150)
)");
    std::cout << "var: wrote var_pg.csv and var_omega.csv\n";
    return 0;
}

int cmd_alpha_sens(const Options& opt) {
    fs::create_directories(opt.out_dir);
    CsvWriter csv(opt, "alpha-sens", fs::path(opt.out_dir) / "alpha_sens.csv",
                  "config_id,p,rho,alpha,var99");
    for (const auto& cfg : opt.merged.at("alpha_sens_configs")) {
        const std::string id = cfg.at("id");
        const double p = cfg.at("p"), rho = cfg.at("rho");
        for (int i = -30; i <= 30; ++i) {
            const double alpha = i / 10.0;
            Scenario sc;
            sc.p_g = sc.p_b = p;
            sc.rho_g = sc.rho_b = rho;
            sc.omega_g = 0.5;
            csv.row({id, CsvWriter::num(p), CsvWriter::num(rho), CsvWriter::num(alpha),
                     CsvWriter::num(mix_var(limit_model(sc, alpha), 0.99))});
        }
    }
    write_plot_script(opt.out_dir, "plot_alpha_sens.py", R"(df = pd.read_csv('alpha_sens.csv', comment='#')
fig, ax = plt.subplots(figsize=(7, 5))
for cid, g in df.groupby('config_id'):
    ax.plot(g.alpha, g.var99, label=cid)
ax.set_xlabel('alpha'); ax.set_ylabel('VaR 99%'); ax.legend()
fig.tight_layout(); fig.savefig('alpha_sens.png', dpi=150)
)");
    std::cout << "alpha-sens: wrote alpha_sens.csv\n";
    return 0;
}

int cmd_converge(const Options& opt) {
    fs::create_directories(opt.out_dir);
    const std::vector<std::size_t> sizes = {500, 1000, 2000, 3000, 4000, 5000};
    McConfig mc;
    mc.n_samples = opt.effective_samples();
    mc.seed = opt.seed;
    for (const std::string id : {"conv-1", "conv-2"}) {
        const auto s = get_scenario(opt, id);
        const auto model = limit_model(s, s.alpha);
        CsvWriter csv(opt, "converge",
                      fs::path(opt.out_dir) / ("converge_" + id + ".csv"),
                      "n,a,level,var_empirical,var_analytic,error,hhi_g,hhi_b");
        for (double decay : {0.0, 0.6}) {
            const auto tmpl = portfolio(s, 500, s.alpha, decay);
            const auto rows = convergence_experiment(tmpl, sizes, mc, model);
            for (const auto& r : rows)
                csv.row({std::to_string(r.n), CsvWriter::num(r.decay),
                         CsvWriter::num(r.level), CsvWriter::num(r.var_empirical),
                         CsvWriter::num(r.var_analytic), CsvWriter::num(r.error),
                         CsvWriter::num(r.hhi_green), CsvWriter::num(r.hhi_brown)});
        }
    }
    write_plot_script(opt.out_dir, "plot_converge.py", R"(import glob
fig, axes = plt.subplots(2, 2, figsize=(11, 8))
panels = [(f, a) for f in sorted(glob.glob('converge_conv-*.csv')) for a in (0.0, 0.6)]
for ax, (fname, a) in zip(axes.flat, panels):
    df = pd.read_csv(fname, comment='#')
    df = df[df.a == a]
    for level, g in df.groupby('level'):
        ax.plot(g.n, g.error.abs(), marker='o', label=f'beta={level}')
    ax.set_title(f'{fname} a={a}'); ax.set_xlabel('n'); ax.legend()
fig.tight_layout(); fig.savefig('converge_errors.png', dpi=150)
)");
    std::cout << "converge: wrote converge_conv-1.csv and converge_conv-2.csv (N_samp="
              << mc.n_samples << ")\n";
    return 0;
}

int cmd_fit_exposures(const Options& opt, const std::string& csv_path) {
    fs::create_directories(opt.out_dir);
    const auto data = read_exposure_csv(csv_path);
    if (data.renormalized)
        std::cerr << "warning: input weights did not sum to 1 +- 1e-6; renormalized\n";

    const auto fit = fit_power_law(data.weights);
    if (std::abs(fit.a) < 1e-3)
        std::cerr << "warning: fitted decay is ~0; the power-law model is degenerate "
                     "(uniform exposures)\n";

    CsvWriter csv(opt, "fit-exposures", fs::path(opt.out_dir) / "fit_report.csv",
                  "a,b,c,rmse,r2,hhi_data,hhi_limit_approx,hhi_limit_exact,hhi_rate_exp");
    std::string lim = "", exact = "", rate = "";
    try {
        const auto l = hhi_powerlaw_limit(fit.a);
        lim = CsvWriter::num(l.limit);
        if (l.exact_limit) exact = CsvWriter::num(*l.exact_limit);
        if (l.rate_exponent) rate = CsvWriter::num(*l.rate_exponent);
    } catch (const std::domain_error&) {
        // boundary exponent: leave the limit columns empty
    }
    csv.row({CsvWriter::num(fit.a), CsvWriter::num(fit.b), CsvWriter::num(fit.c),
             CsvWriter::num(fit.rmse), CsvWriter::num(fit.r2),
             CsvWriter::num(hhi(data.weights)), lim, exact, rate});
    std::cout << "fit-exposures: a=" << fit.a << " b=" << fit.b << " c=" << fit.c
              << " rmse=" << fit.rmse << " r2=" << fit.r2
              << " hhi=" << hhi(data.weights) << "\n";
    return 0;
}

int cmd_simulate(const Options& opt, const std::string& scenario, std::size_t n,
                 double decay_override, bool has_decay, bool dump_samples) {
    fs::create_directories(opt.out_dir);
    const auto s = get_scenario(opt, scenario);
    const double decay = has_decay ? decay_override : s.decay;
    const auto spec = portfolio(s, n, s.alpha, decay);

    McConfig mc;
    mc.n_samples = opt.effective_samples();
    mc.seed = opt.seed;

    std::vector<double> raw;
    const auto summary = simulate_losses(spec, mc, dump_samples ? &raw : nullptr);

    CsvWriter csv(opt, "simulate", fs::path(opt.out_dir) / "simulate_summary.csv",
                  "statistic,value");
    csv.row({"scenario", scenario});
    csv.row({"n", std::to_string(n)});
    csv.row({"a", CsvWriter::num(decay)});
    csv.row({"n_samples", std::to_string(summary.n_samples)});
    csv.row({"mean", CsvWriter::num(summary.mean)});
    csv.row({"variance", CsvWriter::num(summary.variance)});
    csv.row({"hhi_g", CsvWriter::num(summary.hhi_green)});
    csv.row({"hhi_b", CsvWriter::num(summary.hhi_brown)});
    for (const auto& [level, q] : summary.empirical_quantiles)
        csv.row({"var_" + CsvWriter::num(level), CsvWriter::num(q)});

    if (dump_samples) {
        CsvWriter sraw(opt, "simulate", fs::path(opt.out_dir) / "simulate_samples.csv",
                       "replication,loss");
        for (std::size_t i = 0; i < raw.size(); ++i)
            sraw.row({std::to_string(i), CsvWriter::num(raw[i])});
    }
    std::cout << "simulate: " << scenario << " n=" << n
              << " mean=" << summary.mean << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"green-brown credit portfolio analytics"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config_path, "JSON config overriding the presets");
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--seed", opt.seed, "RNG seed");
    app.add_option("--samples", opt.samples, "Monte Carlo replications");
    app.add_flag("--quick", opt.quick, "reduced sample count (10^4)");

    auto* limit = app.add_subcommand("limit", "limit-law density/cdf curves");
    auto* var = app.add_subcommand("var", "VaR profiles over p_G and omega_G");
    auto* alpha = app.add_subcommand("alpha-sens", "VaR99 as a function of the shape");
    auto* conv = app.add_subcommand("converge", "convergence study vs portfolio size");

    std::string fit_csv;
    auto* fit = app.add_subcommand("fit-exposures", "fit the power-law exposure model");
    fit->add_option("csv", fit_csv, "ranked-exposure CSV (rank,weight)")->required();

    std::string sim_scenario = "conv-1";
    std::size_t sim_n = 1000;
    double sim_decay = 0.0;
    bool dump_samples = false;
    auto* sim = app.add_subcommand("simulate", "one finite-portfolio simulation");
    sim->add_option("--scenario", sim_scenario, "scenario preset name");
    sim->add_option("--n", sim_n, "portfolio size");
    auto* decay_opt = sim->add_option("--decay", sim_decay, "exposure decay exponent a");
    sim->add_flag("--dump-samples", dump_samples, "write raw loss samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        load_config(opt);
        if (limit->parsed()) return cmd_limit(opt);
        if (var->parsed()) return cmd_var(opt);
        if (alpha->parsed()) return cmd_alpha_sens(opt);
        if (conv->parsed()) return cmd_converge(opt);
        if (fit->parsed()) return cmd_fit_exposures(opt, fit_csv);
        if (sim->parsed())
            return cmd_simulate(opt, sim_scenario, sim_n, sim_decay,
                                decay_opt->count() > 0, dump_samples);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
