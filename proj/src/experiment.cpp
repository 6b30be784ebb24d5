#include "d2d/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "d2d/errors.hpp"

namespace d2d {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::string num_label(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string with_tau(const std::string& metric, double tau_db) { return metric + "@tau_db=" + num_label(tau_db); }

std::vector<double> tau_axis(const Sweep& s, double fallback_linear) {
    if (!s.tau_db.empty()) return s.tau_db;
    return {10.0 * std::log10(fallback_linear)};
}

bool is_link_metric(const std::string& m) { return m.rfind("link-", 0) == 0; }

void check_names(const std::vector<std::string>& requested, const std::vector<std::string>& known,
                 const char* what) {
    if (requested.empty()) throw ConfigError(std::string("no ") + what + " requested");
    for (const auto& m : requested) {
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            std::string list;
            for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
            throw ConfigError(std::string("unknown ") + what + " '" + m + "' (known: " + list + ")");
        }
    }
}

Row mc_row(std::string scheme, std::optional<std::int64_t> k, std::optional<std::int64_t> c, std::string metric,
           const mc::Estimate& e, std::uint64_t seed) {
    return {std::move(scheme), k, c, std::move(metric), e.mean, "mc", e.ci_halfwidth, e.samples, seed};
}

double cellular_rate_factor(std::int64_t c, const ExperimentConfig& cfg) {
    return hit_mbs(c, cfg.cache) ? 1.0 : cfg.network.beta;
}

}  // namespace

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (w <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < w; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> analytic_metric_names() {
    return {"mode-prob",         "offloaded",     "coverage", "coverage-d2d",      "coverage-cellular", "rate",
            "rate-d2d",          "rate-cellular", "link-coverage-d2d", "link-coverage-cellular"};
}

std::vector<std::string> simulate_observable_names() {
    return {"p-in",         "mode-prob",        "coverage", "rate", "coverage-d2d", "rate-d2d",
            "link-coverage-cellular", "link-coverage-d2d", "spectral-efficiency-cellular", "distance-hist",
            "helper-count-pmf"};
}

std::vector<Row> cmd_analytic(const ExperimentConfig& cfg, const std::vector<std::string>& metrics) {
    check_names(metrics, analytic_metric_names(), "metric");
    const PerformanceModel model(cfg.network, cfg.cache, cfg.model);
    const Method method = cfg.method;
    const std::string mname = to_string(method);
    const bool bound = method == Method::bound;

    // Grid slots are filled in parallel and emitted in sweep order.
    struct Slot {
        SelectionScheme s;
        int k;
        std::int64_t c;
        std::string metric;
        double tau_db;
    };
    std::vector<Slot> slots;
    const auto taus = tau_axis(cfg.sweep, cfg.network.tau_d);
    for (const auto& m : metrics) {
        if (m == "link-coverage-cellular") {
            for (double t : tau_axis(cfg.sweep, cfg.network.tau_m)) slots.push_back({SelectionScheme::NS, 0, 0, m, t});
        }
    }
    std::vector<int> orders = cfg.sweep.k;
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    for (const auto& m : metrics) {
        if (m != "link-coverage-d2d") continue;
        for (int i : orders) {
            for (double t : taus) slots.push_back({SelectionScheme::NS, i, 0, m, t});
        }
    }
    for (auto s : cfg.sweep.schemes) {
        for (int k : cfg.sweep.k) {
            for (auto c : cfg.sweep.c) {
                for (const auto& m : metrics) {
                    if (!is_link_metric(m)) slots.push_back({s, k, c, m, 0.0});
                }
            }
        }
    }

    std::vector<Row> rows(slots.size());
    parallel_for(slots.size(), cfg.sim.workers, [&](std::size_t j) {
        const Slot& q = slots[j];
        Row r;
        r.metric = q.metric;
        r.method = mname;
        if (q.metric == "link-coverage-cellular") {
            r.metric = with_tau(q.metric, q.tau_db);
            r.method = "exact";
            r.value = model.gamma_m_at(db_to_linear(q.tau_db));
        } else if (q.metric == "link-coverage-d2d") {
            r.metric = with_tau(q.metric, q.tau_db);
            r.method = "exact";
            r.k = q.k;
            r.value = model.gamma_d_at(q.k, db_to_linear(q.tau_db));
        } else {
            r.scheme = std::string(to_string(q.s));
            r.k = q.k;
            r.c = q.c;
            const auto& m = q.metric;
            try {
                if (m == "mode-prob") {
                    r.value = bound ? p_d2d_mode_bound(q.s, q.c, q.k, cfg.cache)
                                    : p_d2d_mode(q.s, q.c, q.k, cfg.network.eta_d(), cfg.cache);
                } else if (m == "offloaded") {
                    r.value = model.offloaded(q.s, q.k, bound);
                } else if (m == "coverage") {
                    r.value = model.coverage_overall(q.s, q.c, q.k, method).value;
                } else if (m == "coverage-d2d") {
                    r.method = "exact";
                    r.value = model.coverage_d2d_mode(q.s, q.c, q.k);
                } else if (m == "coverage-cellular") {
                    r.method = "exact";
                    r.value = model.gamma_m();
                } else if (m == "rate") {
                    r.value = model.avg_rate_overall(q.s, q.c, q.k, method).value;
                } else if (m == "rate-d2d") {
                    r.method = "exact";
                    r.value = model.avg_rate_d2d(q.s, q.c, q.k);
                } else if (m == "rate-cellular") {
                    r.value = model.avg_rate_cellular(q.s, q.c, q.k, bound);
                }
            } catch (const UndefinedConditional&) {
                r.value = std::numeric_limits<double>::quiet_NaN();
            }
        }
        rows[j] = std::move(r);
    });
    return rows;
}

std::vector<Row> cmd_simulate(const ExperimentConfig& cfg, const SimulateRequest& req) {
    check_names(req.observables, simulate_observable_names(), "observable");
    const auto& n = cfg.network;
    const auto& sim = cfg.sim;
    const std::uint64_t seed = sim.seed;
    const std::int64_t min_samples = 1;
    std::vector<Row> rows;
    const PerformanceModel model(cfg.network, cfg.cache, cfg.model);

    for (const auto& obs : req.observables) {
        if (obs == "p-in") {
            rows.push_back(mc_row("", std::nullopt, std::nullopt, obs, mc::estimate_p_inside(n, sim, min_samples), seed));
        } else if (obs == "mode-prob") {
            std::vector<mc::ModeQuery> q;
            std::vector<Row> pending;
            for (auto s : cfg.sweep.schemes) {
                for (int k : cfg.sweep.k) {
                    for (auto c : cfg.sweep.c) {
                        q.push_back({s, k, hit_d2d(c, cfg.cache)});
                        pending.push_back({std::string(to_string(s)), k, c, obs, 0.0, "mc", {}, {}, seed});
                    }
                }
            }
            const auto est = mc::estimate_mode(n, sim, q, cfg.us_variant, min_samples);
            for (std::size_t j = 0; j < q.size(); ++j) {
                rows.push_back(mc_row(pending[j].scheme, pending[j].k, pending[j].c, obs, est[j], seed));
            }
        } else if (obs == "coverage" || obs == "rate") {
            for (auto s : cfg.sweep.schemes) {
                for (int k : cfg.sweep.k) {
                    for (auto c : cfg.sweep.c) {
                        mc::TrialRequest tr{s, cfg.us_variant, k, hit_d2d(c, cfg.cache), true,
                                            model.eta_u_cellular(s, k), model.eta_u_d2d(s, k),
                                            cellular_rate_factor(c, cfg)};
                        const auto acc = mc::run_trials(sim, 1, [&](std::uint64_t t, std::vector<double>& out) {
                            const auto o = mc::run_trial(t, n, sim, tr);
                            if (o.discarded) return;
                            out[0] = obs == "rate" ? o.rate : ((o.covered_m || o.covered_d) ? 1.0 : 0.0);
                        });
                        rows.push_back(mc_row(std::string(to_string(s)), k, c, obs, acc.estimate(0, min_samples), seed));
                    }
                }
            }
        } else if (obs == "coverage-d2d" || obs == "rate-d2d") {
            for (auto s : cfg.sweep.schemes) {
                for (int k : cfg.sweep.k) {
                    for (auto c : cfg.sweep.c) {
                        mc::TrialRequest tr{s, cfg.us_variant, k, hit_d2d(c, cfg.cache), true,
                                            model.eta_u_cellular(s, k), model.eta_u_d2d(s, k),
                                            cellular_rate_factor(c, cfg)};
                        const auto acc = mc::run_trials(sim, 2, [&](std::uint64_t t, std::vector<double>& out) {
                            const auto o = mc::run_trial(t, n, sim, tr);
                            if (o.discarded || o.mode == 0) return;
                            out[0] = o.covered_d ? 1.0 : 0.0;
                            out[1] = o.rate;
                        });
                        mc::Estimate e;
                        try {
                            e = acc.estimate(obs == "coverage-d2d" ? 0 : 1, min_samples);
                        } catch (const InsufficientSamples&) {
                            e.samples = 0;  // no trial reached D2D mode
                        }
                        rows.push_back(mc_row(std::string(to_string(s)), k, c, obs, e, seed));
                    }
                }
            }
        } else if (obs == "link-coverage-cellular") {
            const auto taus_db = tau_axis(cfg.sweep, n.tau_m);
            std::vector<double> taus;
            for (double t : taus_db) taus.push_back(db_to_linear(t));
            const auto est = mc::estimate_cellular_coverage(n, sim, taus, min_samples);
            for (std::size_t j = 0; j < taus.size(); ++j) {
                rows.push_back(mc_row("", std::nullopt, std::nullopt, with_tau(obs, taus_db[j]), est[j], seed));
            }
        } else if (obs == "link-coverage-d2d") {
            const auto taus_db = tau_axis(cfg.sweep, n.tau_d);
            std::vector<double> taus;
            for (double t : taus_db) taus.push_back(db_to_linear(t));
            const int max_order = *std::max_element(cfg.sweep.k.begin(), cfg.sweep.k.end());
            const auto est = mc::estimate_d2d_coverage(n, sim, max_order, taus, 0);
            std::vector<int> orders = cfg.sweep.k;
            std::sort(orders.begin(), orders.end());
            orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
            for (int i : orders) {
                for (std::size_t j = 0; j < taus.size(); ++j) {
                    rows.push_back(mc_row("", i, std::nullopt, with_tau(obs, taus_db[j]),
                                          est[(i - 1) * taus.size() + j], seed));
                }
            }
        } else if (obs == "spectral-efficiency-cellular") {
            rows.push_back(mc_row("", std::nullopt, std::nullopt, obs,
                                  mc::estimate_cellular_spectral_efficiency(n, sim, min_samples), seed));
        } else if (obs == "distance-hist") {
            if (req.order < 1) throw ConfigError("distance-hist: order must be >= 1");
            if (req.hist_bins < 1) throw ConfigError("distance-hist: need at least one bin");
            const double spacing = 1.0 / std::sqrt(n.lambda_m);
            const double width = req.hist_range_spacings * spacing / req.hist_bins;
            std::vector<double> edges(static_cast<std::size_t>(req.hist_bins) + 1);
            for (std::size_t b = 0; b < edges.size(); ++b) edges[b] = static_cast<double>(b) * width;
            const auto h = mc::conditional_distance_histogram(req.order, n, sim, edges);
            const std::int64_t i = req.order;
            auto count_row = [&](const char* name, std::int64_t v) {
                rows.push_back({"", i, std::nullopt, name, static_cast<double>(v), "mc", std::nullopt, h.trials, seed});
            };
            count_row("distance-hist-trials", h.trials);
            count_row("distance-hist-retained-true-cell", h.retained_true);
            count_row("distance-hist-discarded-few-in-cell", h.discarded_few_in_cell);
            count_row("distance-hist-retained-disk", h.retained_disk);
            count_row("distance-hist-discarded-outside-bmax", h.discarded_outside_bmax);
            count_row("distance-hist-discarded-few-in-disk", h.discarded_few_in_disk);
            count_row("distance-hist-discarded-degenerate", h.discarded_degenerate);
            for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
                const std::string mid = num_label(0.5 * (edges[b] + edges[b + 1]));
                rows.push_back({"", i, std::nullopt, "distance-pdf-true-cell@r_m=" + mid, h.true_cell[b], "mc",
                                std::nullopt, h.retained_true, seed});
                rows.push_back({"", i, std::nullopt, "distance-pdf-disk@r_m=" + mid, h.disk[b], "mc", std::nullopt,
                                h.retained_disk, seed});
            }
        } else if (obs == "helper-count-pmf") {
            const auto pmf = mc::helper_count_pmf(n, sim, req.pmf_max);
            for (std::size_t j = 0; j < pmf.counts.size(); ++j) {
                const double p = static_cast<double>(pmf.counts[j]) / static_cast<double>(pmf.trials);
                const double ci = pmf.trials > 1 ? kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(pmf.trials))
                                                 : std::numeric_limits<double>::infinity();
                const std::string label = j + 1 == pmf.counts.size() ? "helper-count-pmf@j>" + std::to_string(req.pmf_max)
                                                                      : "helper-count-pmf@j=" + std::to_string(j);
                rows.push_back({"", std::nullopt, std::nullopt, label, p, "mc", ci, pmf.trials, seed});
            }
        }
    }
    return rows;
}

std::vector<Row> cmd_optimal_k(const ExperimentConfig& cfg) {
    auto ks = cfg.sweep.k;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.size() < 2) throw ConfigError("optimal-k needs a k range with at least two values");
    const int lo = ks.front(), hi = ks.back();
    ModelOptions opts = cfg.model;
    opts.k_max = std::max(opts.k_max, hi);
    const PerformanceModel model(cfg.network, cfg.cache, opts);
    const double gamma_m = model.gamma_m();
    const double t_ca = model.baseline_cached();
    const double t_bh = model.baseline_backhaul();

    struct Slot {
        SelectionScheme s;
        std::int64_t c;
    };
    std::vector<Slot> slots;
    for (auto s : cfg.sweep.schemes) {
        for (auto c : cfg.sweep.c) slots.push_back({s, c});
    }
    std::vector<std::vector<Row>> out(slots.size());
    parallel_for(slots.size(), cfg.sim.workers, [&](std::size_t j) {
        const auto [s, c] = slots[j];
        const std::string sn(to_string(s));
        const auto cov = model.optimal_k_coverage(s, c, lo, hi);
        const auto rate = model.optimal_k_rate(s, c, lo, hi);
        auto row = [&](int k, const char* metric, double v) { return Row{sn, k, c, metric, v, "exact", {}, {}, {}}; };
        out[j] = {
            row(cov.k, "k-opt-coverage", cov.k),
            row(cov.k, "coverage-at-k-opt", cov.value),
            row(cov.k, "gain-coverage-pct", (cov.value - gamma_m) / gamma_m * 100.0),
            row(rate.k, "k-opt-rate", rate.k),
            row(rate.k, "rate-at-k-opt", rate.value),
            row(rate.k, "gain-rate-vs-cached-pct", (rate.value - t_ca) / t_ca * 100.0),
            row(rate.k, "gain-rate-vs-backhaul-pct", (rate.value - t_bh) / t_bh * 100.0),
        };
    });
    std::vector<Row> rows;
    for (auto& v : out) rows.insert(rows.end(), v.begin(), v.end());
    return rows;
}

}  // namespace d2d
