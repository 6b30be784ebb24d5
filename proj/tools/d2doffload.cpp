// d2doffload: analytic model, Monte Carlo oracle and validation suite for
// cache-enabled cellular networks with coordinated D2D offloading.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "d2d/config.hpp"
#include "d2d/errors.hpp"
#include "d2d/experiment.hpp"
#include "d2d/report.hpp"
#include "d2d/validation.hpp"

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfig = 2, kNumerical = 3 };

struct Common {
    std::string profile = "table1";
    std::vector<std::string> sets;
    std::string scheme, k, c, tau_db;
    std::string trials;
    std::string seed;
    unsigned workers = 0;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& o, bool sweep) {
    cmd->add_option("-p,--profile", o.profile, "Profile name or path (default table1)");
    cmd->add_option("--set", o.sets, "Override a profile key, key=value (repeatable)");
    cmd->add_option("--workers", o.workers, "Worker threads");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials (accepts 1e6)");
    if (sweep) {
        cmd->add_option("--scheme", o.scheme, "Selection schemes, e.g. NS,US");
        cmd->add_option("--k", o.k, "k values, e.g. 1..8 or 1,2,4");
        cmd->add_option("--c", o.c, "Content indices, e.g. 1,10,100");
        cmd->add_option("--tau-db", o.tau_db, "Link threshold axis in dB, e.g. -10,0,10");
    }
    cmd->add_option("-o,--out", o.out, "Output file (default stdout)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

d2d::ExperimentConfig resolve(const Common& o) {
    auto cfg = d2d::load_profile(o.profile);
    for (const auto& s : o.sets) d2d::apply_override(cfg, s);
    if (!o.scheme.empty()) d2d::apply_override(cfg, "schemes=" + o.scheme);
    if (!o.k.empty()) d2d::apply_override(cfg, "k=" + o.k);
    if (!o.c.empty()) d2d::apply_override(cfg, "c=" + o.c);
    if (!o.tau_db.empty()) d2d::apply_override(cfg, "tau_db=" + o.tau_db);
    if (!o.trials.empty()) d2d::apply_override(cfg, "trials=" + o.trials);
    if (!o.seed.empty()) d2d::apply_override(cfg, "seed=" + o.seed);
    if (o.workers > 0) d2d::apply_override(cfg, "workers=" + std::to_string(o.workers));
    return cfg;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw d2d::ConfigError("cannot open output file '" + path + "'");
    f << text;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytic model and Monte Carlo oracle for cache-enabled D2D offloading"};
    app.require_subcommand(1);

    Common an_opts;
    std::string an_metrics = "coverage";
    std::string an_method;
    auto* analytic = app.add_subcommand("analytic", "Evaluate analytic metrics over the sweep");
    add_common(analytic, an_opts, true);
    analytic->add_option("-m,--metric", an_metrics, "Comma-separated metrics");
    analytic->add_option("--method", an_method, "exact or bound")->check(CLI::IsMember({"exact", "bound"}));

    Common sim_opts;
    std::string sim_obs = "p-in";
    d2d::SimulateRequest sim_req;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates with 95% confidence intervals");
    add_common(simulate, sim_opts, true);
    simulate->add_option("--observable", sim_obs, "Comma-separated observables");
    simulate->add_option("--i", sim_req.order, "Helper order for distance-hist");
    simulate->add_option("--bins", sim_req.hist_bins, "Histogram bins");
    simulate->add_option("--pmf-max", sim_req.pmf_max, "Largest helper count tabulated");

    Common val_opts;
    d2d::ValidationOptions vopts;
    std::string only;
    auto* validate = app.add_subcommand("validate", "Run the analytic-vs-simulation reconciliation suite");
    add_common(validate, val_opts, false);
    validate->add_option("--trial-scale", vopts.trial_scale, "Multiply every Monte Carlo trial count");
    validate->add_option("--only", only, "Comma-separated check ids");

    Common opt_opts;
    auto* optimal = app.add_subcommand("optimal-k", "Optimal k and gains per scheme and content");
    add_common(optimal, opt_opts, true);

    Common dump_opts;
    auto* profile = app.add_subcommand("profile", "Profile utilities");
    profile->require_subcommand(1);
    auto* dump = profile->add_subcommand("dump", "Print the resolved profile");
    add_common(dump, dump_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*analytic) {
            auto cfg = resolve(an_opts);
            if (!an_method.empty()) d2d::apply_override(cfg, "method=" + an_method);
            const auto rows = d2d::cmd_analytic(cfg, split(an_metrics));
            emit(d2d::render(rows, d2d::parse_format(an_opts.format)), an_opts.out);
        } else if (*simulate) {
            const auto cfg = resolve(sim_opts);
            sim_req.observables = split(sim_obs);
            const auto rows = d2d::cmd_simulate(cfg, sim_req);
            emit(d2d::render(rows, d2d::parse_format(sim_opts.format)), sim_opts.out);
        } else if (*optimal) {
            const auto cfg = resolve(opt_opts);
            const auto rows = d2d::cmd_optimal_k(cfg);
            emit(d2d::render(rows, d2d::parse_format(opt_opts.format)), opt_opts.out);
        } else if (*dump) {
            emit(d2d::dump_profile(resolve(dump_opts)), dump_opts.out);
        } else if (*validate) {
            const auto cfg = resolve(val_opts);
            if (val_opts.workers > 0) vopts.workers = val_opts.workers;
            if (!val_opts.seed.empty()) vopts.seed = cfg.sim.seed;
            for (auto id : d2d::parse_int_list(only)) vopts.only.push_back(static_cast<int>(id));
            std::ostringstream report;
            int failed = 0;
            d2d::run_validation(cfg, vopts, [&](const d2d::CheckResult& r) {
                const auto text = d2d::format_check(r);
                std::cout << text;
                std::cout.flush();
                report << text;
                if (!r.pass) ++failed;
            });
            std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
            if (!val_opts.out.empty()) emit(report.str(), val_opts.out);
            return failed == 0 ? kOk : kValidationFailed;
        }
    } catch (const d2d::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const d2d::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const d2d::InsufficientSamples& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
