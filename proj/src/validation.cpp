#include "d2d/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "d2d/errors.hpp"
#include "d2d/experiment.hpp"

namespace d2d {

namespace {

constexpr double kPi = std::numbers::pi;

// Tolerances.
constexpr double kPinTarget = 0.2;
constexpr double kPinTol = 0.005;
constexpr double kPinSeconds = 120.0;
constexpr double kModeSigmas = 3.0;
constexpr double kUsFlatTol = 1e-12;
constexpr double kBoundGapTol = 0.10;
constexpr double kDistL1Tol = 0.08;
constexpr double kDistSeconds = 600.0;
constexpr double kSparseL1Tol = 0.02;
constexpr double kSparseLensTol = 0.10;
constexpr double kCellCovTol = 0.01;
constexpr double kClosedFormTol = 1e-6;
constexpr double kD2DGapTol = 0.03;
constexpr double kHypRelTol = 1e-9;
constexpr double kGammaRelTol = 1e-12;
constexpr double kLensSigmas = 3.0;
constexpr double kLensDerivRelTol = 1e-6;

std::int64_t scaled(double trials, const ValidationOptions& o) {
    return std::max<std::int64_t>(100, static_cast<std::int64_t>(std::llround(trials * o.trial_scale)));
}

mc::SimConfig sim_for(const ExperimentConfig& cfg, const ValidationOptions& o, double trials) {
    mc::SimConfig s = cfg.sim;
    s.trials = scaled(trials, o);
    s.seed = o.seed;
    s.workers = o.workers;
    return s;
}

std::string f(double v, int prec = 4) {
    std::ostringstream out;
    out << std::setprecision(prec) << v;
    return out.str();
}

std::string fixed(double v, int prec = 4) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(prec) << v;
    return out.str();
}

struct Ctx {
    CheckResult r;
    void sub(bool ok, const std::string& text) {
        r.details.push_back(std::string(ok ? "ok   " : "FAIL ") + text);
        r.pass = r.pass && ok;
    }
};

const double kRefArea = kPi * 500.0 * 500.0;

NetworkParams distance_setting(const NetworkParams& base) {
    NetworkParams n = base;
    n.lambda_m = 20.0 / kRefArea;
    n.lambda_d = 200.0 / kRefArea;
    return n;
}

// Oracles ---------------------------------------------------------------------

using Quad = __float128;

// Power series of 2F1 summed in binary128.
double hyp2f1_series_q(double a, double b, double c, double z) {
    Quad term = 1, sum = 1;
    const Quad zq = z;
    for (int n = 0; n < 2'000'000; ++n) {
        term *= (Quad(a) + n) * (Quad(b) + n) / ((Quad(c) + n) * (n + 1)) * zq;
        sum += term;
        const Quad at = term < 0 ? -term : term;
        if (n > 10 && at < sum * Quad(1e-30)) break;
    }
    return static_cast<double>(sum);
}

// 2F1(1, b; 1+b; -x) from series that converge in each range.
double unit_hyp2f1_neg_oracle(double b, double x) {
    if (x < 0.5) {
        Quad sum = 0, pw = 1;
        for (int n = 0; n < 400; ++n) {
            sum += Quad(b) / (Quad(b) + n) * pw;
            pw *= -Quad(x);
        }
        return static_cast<double>(sum);
    }
    if (x <= 4.0) {
        const double w = x / (1.0 + x);
        const long double pre = std::pow(1.0L + static_cast<long double>(x), -static_cast<long double>(b));
        return static_cast<double>(pre * static_cast<long double>(hyp2f1_series_q(b, b, 1.0 + b, w)));
    }
    Quad series = 0, pw = 1.0 / Quad(x);
    for (int n = 0; n < 400; ++n) {
        series += (n % 2 == 0 ? 1 : -1) * pw / (Quad(n) + 1 - Quad(b));
        pw /= Quad(x);
    }
    const long double lb = b, lx = x;
    const long double lead = std::pow(lx, -lb) * std::numbers::pi_v<long double> / std::sin(std::numbers::pi_v<long double> * lb);
    return static_cast<double>(Quad(b) * (Quad(lead) - series));
}

long double poisson_cdf_oracle(int i, double x) {
    const long double lx = x;
    long double term = std::exp(-lx), sum = 0.0L;
    for (int j = 0; j < i; ++j) {
        sum += term;
        term *= lx / (j + 1);
    }
    return sum;
}

// Checks ----------------------------------------------------------------------

void check_p_inside(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    for (double factor : {1.0, 7.3}) {
        NetworkParams n = cfg.network;
        n.lambda_m *= factor;
        const auto e = mc::estimate_p_inside(n, sim_for(cfg, o, 1e6), 100);
        const double dev = std::abs(e.mean - kPinTarget);
        c.sub(dev <= kPinTol, "lambda_m x" + f(factor) + ": p_in = " + fixed(e.mean) + " +/- " + fixed(e.ci_halfwidth) +
                                  " (|p_in - 0.2| = " + fixed(dev) + ", tol " + f(kPinTol) + ", n=" +
                                  std::to_string(e.samples) + ")");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.sub(secs <= kPinSeconds, "runtime " + fixed(secs, 1) + " s (limit " + f(kPinSeconds) + " s)");
}

void check_mode_probabilities(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions& o) {
    const auto sim = sim_for(cfg, o, 1e5);
    const double eta = cfg.network.eta_d();
    std::vector<mc::ModeQuery> q;
    std::vector<double> analytic;
    std::vector<std::string> label;
    for (auto s : {SelectionScheme::NS, SelectionScheme::US}) {
        for (std::int64_t cc : {1, 10, 100}) {
            for (int k : {1, 2, 4, 8}) {
                q.push_back({s, k, hit_d2d(cc, cfg.cache)});
                analytic.push_back(p_d2d_mode(s, cc, k, eta, cfg.cache));
                label.push_back(std::string(to_string(s)) + " c=" + std::to_string(cc) + " k=" + std::to_string(k));
            }
        }
    }
    auto z_of = [](double p, const mc::Estimate& e) {
        const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(e.samples));
        if (sd == 0.0) return e.mean == p ? 0.0 : std::numeric_limits<double>::infinity();
        return (e.mean - p) / sd;
    };
    const auto est = mc::estimate_mode(cfg.network, sim, q, cfg.us_variant, 100);
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double z = z_of(analytic[j], est[j]);
        c.sub(std::abs(z) <= kModeSigmas, label[j] + ": analytic " + fixed(analytic[j]) + ", mc " + fixed(est[j].mean) +
                                              ", z = " + fixed(z, 2) + " (tol " + f(kModeSigmas) + " sigma)");
    }
    for (std::int64_t cc : {1, 10, 100}) {
        double lo = 1.0, hi = 0.0;
        for (int k : {1, 2, 4, 8}) {
            const double p = p_d2d_mode(SelectionScheme::US, cc, k, eta, cfg.cache);
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        c.sub(hi - lo <= kUsFlatTol, "US c=" + std::to_string(cc) + " analytic spread over k: " + f(hi - lo, 3) +
                                         " (tol " + f(kUsFlatTol) + ")");
    }
    // Which uniform-selection variant reproduces the analytic column.
    for (auto v : {mc::UsVariant::select_then_check, mc::UsVariant::check_then_select}) {
        std::vector<mc::ModeQuery> us(q.begin() + 12, q.end());
        const auto e = mc::estimate_mode(cfg.network, sim, us, v, 100);
        double worst = 0.0;
        for (std::size_t j = 0; j < us.size(); ++j) worst = std::max(worst, std::abs(z_of(analytic[12 + j], e[j])));
        c.r.details.push_back("info US variant " + std::string(to_string(v)) + ": max |z| = " + fixed(worst, 2) +
                              (worst <= kModeSigmas ? " (consistent)" : " (inconsistent)"));
    }
}

void check_bound(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions& o) {
    double worst = 0.0;
    std::string where;
    for (std::int64_t cc : {1, 10, 100}) {
        for (int k = 1; k <= 4; ++k) {
            const double exact = p_d2d_mode(SelectionScheme::NS, cc, k, 10.0, cfg.cache);
            const double bound = p_d2d_mode_bound(SelectionScheme::NS, cc, k, cfg.cache);
            const double gap = exact > 0.0 ? (bound - exact) / exact : (bound == 0.0 ? 0.0 : 1.0);
            if (gap >= worst) {
                worst = gap;
                where = "c=" + std::to_string(cc) + " k=" + std::to_string(k);
            }
        }
    }
    c.sub(worst <= kBoundGapTol, "eta_d=10, k<=4: max relative gap " + fixed(worst) + " at " + where + " (tol " +
                                     f(kBoundGapTol) + ")");

    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 500; ++t) {
        const double eta = std::exp(std::log(0.1) + u(rng) * std::log(1000.0));
        const double zeta = 0.2 + 1.3 * u(rng);
        const auto cd = static_cast<std::int64_t>(1 + u(rng) * 99);
        const CacheParams cache(10000, zeta, 500, cd);
        const auto cc = static_cast<std::int64_t>(std::ceil(std::exp(u(rng) * std::log(10000.0))));
        const int k = 1 + static_cast<int>(u(rng) * 12);
        const auto s = u(rng) < 0.5 ? SelectionScheme::NS : SelectionScheme::US;
        const double margin = p_d2d_mode_bound(s, cc, k, cache) - p_d2d_mode(s, cc, k, eta, cache);
        min_margin = std::min(min_margin, margin);
        if (margin < -1e-12) ++violations;
    }
    c.sub(violations == 0, "500 random draws: bound >= exact violated " + std::to_string(violations) +
                               " times (min margin " + f(min_margin, 3) + ")");
}

double histogram_l1(const DistanceDistribution& d, const mc::DistanceHistogram& h, bool disk) {
    const auto& dens = disk ? h.disk : h.true_cell;
    double l1 = 0.0, mc_in = 0.0;
    for (std::size_t b = 0; b < dens.size(); ++b) {
        const double w = h.edges[b + 1] - h.edges[b];
        l1 += std::abs(d.mass_between(h.edges[b], h.edges[b + 1]) - dens[b] * w);
        mc_in += dens[b] * w;
    }
    l1 += std::abs((1.0 - d.cdf(h.edges.back())) - (1.0 - mc_in));
    return l1;
}

double histogram_l1_unconstrained(int i, double lambda_d, const mc::DistanceHistogram& h) {
    double l1 = 0.0, mc_in = 0.0;
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
        const double w = h.edges[b + 1] - h.edges[b];
        const double a = unconstrained_ccdf(i, h.edges[b], lambda_d) - unconstrained_ccdf(i, h.edges[b + 1], lambda_d);
        l1 += std::abs(a - h.true_cell[b] * w);
        mc_in += h.true_cell[b] * w;
    }
    l1 += std::abs(unconstrained_ccdf(i, h.edges.back(), lambda_d) - (1.0 - mc_in));
    return l1;
}

void check_distance(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const NetworkParams n = distance_setting(cfg.network);
    const double spacing = 1.0 / std::sqrt(n.lambda_m);
    std::vector<double> edges(121);
    for (std::size_t b = 0; b < edges.size(); ++b) edges[b] = static_cast<double>(b) * spacing / 40.0;
    // ~1e5 retained realisations for i = 4, where about 5 % are dropped.
    const auto hs = mc::conditional_distance_histograms(4, n, sim_for(cfg, o, 1.06e5), edges);
    for (int i = 1; i <= 4; ++i) {
        const auto& h = hs[i - 1];
        const auto dist = build_distance_distribution(i, n.geometry(), cfg.model.grid);
        c.sub(dist.norm_defect() <= cfg.model.grid.norm_tolerance,
              "i=" + std::to_string(i) + " analytic mass " + fixed(dist.raw_mass(), 5) + " (tol +/-" +
                  f(cfg.model.grid.norm_tolerance) + ")");
        const double l1 = histogram_l1(dist, h, false);
        const double l1u = histogram_l1_unconstrained(i, n.lambda_d, h);
        const double l1d = histogram_l1(dist, h, true);
        c.sub(l1 <= kDistL1Tol, "i=" + std::to_string(i) + " L1(analytic, true-cell MC) = " + fixed(l1) + " (tol " +
                                    f(kDistL1Tol) + ", retained " + std::to_string(h.retained_true) + ")");
        if (i >= 2) {
            c.sub(l1 < l1u, "i=" + std::to_string(i) + " analytic beats unconstrained: " + fixed(l1) + " < " + fixed(l1u));
        } else {
            c.r.details.push_back("info i=1 unconstrained L1 = " + fixed(l1u));
        }
        c.r.details.push_back("info i=" + std::to_string(i) + " L1(analytic, disk-conditioned MC) = " + fixed(l1d) +
                              " (retained " + std::to_string(h.retained_disk) + ")");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.sub(secs <= kDistSeconds, "runtime " + fixed(secs, 1) + " s (limit " + f(kDistSeconds) + " s)");
}

void check_sparse(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions&) {
    const NetworkParams base = distance_setting(cfg.network);
    std::vector<double> l1s, lens;
    for (double scale : {1.0, 10.0, 100.0}) {
        GeometryParams g = base.geometry();
        g.lambda_m /= scale;
        const auto d = build_distance_distribution(1, g, cfg.model.grid);
        const int steps = 20000;
        const double rmax = d.r_max(), h = rmax / steps;
        double l1 = 0.0;
        for (int b = 0; b < steps; ++b) {
            const double r = (b + 0.5) * h;
            l1 += std::abs(d(r) - unconstrained_pdf(1, r, g.lambda_d)) * h;
        }
        l1 += unconstrained_ccdf(1, rmax, g.lambda_d);
        l1s.push_back(l1);
        lens.push_back(d.lens_mass_fraction());
        c.r.details.push_back("info lambda_m / " + f(scale) + ": L1(f_R1, unconstrained) = " + fixed(l1, 5) +
                              ", lens-term mass fraction = " + fixed(d.lens_mass_fraction()) + ", mass " +
                              fixed(d.raw_mass(), 5));
    }
    c.sub(l1s[0] > l1s[1] && l1s[1] > l1s[2], "L1 strictly decreasing as lambda_m shrinks");
    c.sub(l1s[2] < kSparseL1Tol, "sparsest L1 " + fixed(l1s[2], 5) + " (tol " + f(kSparseL1Tol) + ")");
    c.sub(lens[0] > lens[1] && lens[1] > lens[2] && lens[2] <= kSparseLensTol,
          "lens-term fraction decreasing to " + fixed(lens[2]) + " (tol " + f(kSparseLensTol) + ")");
}

void check_cellular(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions& o) {
    std::vector<double> taus_db, taus;
    for (int db = -10; db <= 20; db += 5) {
        taus_db.push_back(db);
        taus.push_back(db_to_linear(db));
    }
    const auto est = mc::estimate_cellular_coverage(cfg.network, sim_for(cfg, o, 1e6), taus, 100);
    double worst = 0.0;
    for (std::size_t t = 0; t < taus.size(); ++t) {
        const double a = coverage_cellular_at(taus[t], cfg.network);
        const double gap = std::abs(a - est[t].mean);
        worst = std::max(worst, gap);
        c.sub(gap <= kCellCovTol, "tau=" + f(taus_db[t]) + " dB: analytic " + fixed(a) + ", mc " + fixed(est[t].mean) +
                                      " +/- " + fixed(est[t].ci_halfwidth) + " (tol " + f(kCellCovTol) + ")");
    }
    NetworkParams quiet = cfg.network;
    quiet.sigma2 = 0.0;
    quiet.alpha = 4.0;
    double worst_cf = 0.0;
    for (int db = -10; db <= 30; db += 2) {
        const double tau = db_to_linear(db);
        const double st = std::sqrt(tau);
        const double closed = 1.0 / (1.0 + st * (kPi / 2.0 - std::atan(1.0 / st)));
        worst_cf = std::max(worst_cf, std::abs(closed - coverage_cellular_at(tau, quiet)));
    }
    c.sub(worst_cf <= kClosedFormTol, "noise-free alpha=4 closed form vs quadrature: max |diff| " + f(worst_cf, 3) +
                                          " (tol " + f(kClosedFormTol) + ")");
}

void check_d2d_links(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions& o) {
    const PerformanceModel model(cfg.network, cfg.cache, cfg.model);
    std::vector<double> taus_db, taus;
    for (int db = -10; db <= 30; db += 5) {
        taus_db.push_back(db);
        taus.push_back(db_to_linear(db));
    }
    bool ordered = true, beats = false;
    std::string beat_range;
    std::vector<std::vector<double>> an(4, std::vector<double>(taus.size()));
    for (std::size_t t = 0; t < taus.size(); ++t) {
        for (int i = 1; i <= 4; ++i) an[i - 1][t] = model.gamma_d_at(i, taus[t]);
        for (int i = 1; i < 4; ++i) ordered = ordered && an[i - 1][t] > an[i][t];
        if (an[0][t] > model.gamma_m_at(taus[t])) {
            beats = true;
            beat_range += (beat_range.empty() ? "" : ",") + f(taus_db[t]);
        }
    }
    c.sub(ordered, "Gamma_d,i strictly decreasing in i=1..4 at every tau");
    c.sub(beats, "Gamma_d,1 > Gamma_m at tau_db in {" + beat_range + "}");
    const auto est = mc::estimate_d2d_coverage(cfg.network, sim_for(cfg, o, 1e5), 4, taus, 100);
    double worst = 0.0;
    std::string where;
    for (int i = 1; i <= 4; ++i) {
        for (std::size_t t = 0; t < taus.size(); ++t) {
            const double gap = std::abs(an[i - 1][t] - est[(i - 1) * taus.size() + t].mean);
            if (gap > worst) {
                worst = gap;
                where = "i=" + std::to_string(i) + " tau=" + f(taus_db[t]) + " dB (analytic " + fixed(an[i - 1][t]) +
                        ", mc " + fixed(est[(i - 1) * taus.size() + t].mean) + ")";
            }
        }
    }
    c.sub(worst <= kD2DGapTol, "max |analytic - mc| = " + fixed(worst) + " at " + where + " (tol " + f(kD2DGapTol) + ")");
}

void check_optimal_k(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions&) {
    const PerformanceModel base(cfg.network, cfg.cache, cfg.model);
    const int hi = cfg.model.k_max;
    int ns_k = -1;
    bool ns_invariant = true, ns_interior = true, us_one = true;
    std::string ns_seen;
    for (double zeta : {0.4, 0.8, 1.2}) {
        for (std::int64_t cd : {5, 20, 50}) {
            const auto m = base.with_cache(CacheParams(cfg.cache.library_size(), zeta, cfg.cache.cache_mbs(), cd));
            for (std::int64_t cc : {1, 10, 100}) {
                const int kn = m.optimal_k_coverage(SelectionScheme::NS, cc, 1, hi).k;
                const int ku = m.optimal_k_coverage(SelectionScheme::US, cc, 1, hi).k;
                if (ns_k < 0) ns_k = kn;
                if (kn != ns_k) {
                    ns_invariant = false;
                    ns_seen += " (zeta=" + f(zeta) + ",C_d=" + std::to_string(cd) + ",c=" + std::to_string(cc) +
                               "):" + std::to_string(kn);
                }
                ns_interior = ns_interior && kn > 1 && kn < hi;
                us_one = us_one && ku == 1;
            }
        }
    }
    c.sub(us_one, "US coverage argmax k = 1 on all 27 (zeta, C_d, c) combinations");
    c.sub(ns_interior, "NS coverage argmax interior (1 < k* < " + std::to_string(hi) + "), k* = " + std::to_string(ns_k));
    c.sub(ns_invariant, "NS coverage argmax identical across zeta, C_d, c" + ns_seen);
    std::string seq;
    bool monotone = true;
    int prev = 0;
    for (std::int64_t cc : {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000}) {
        const int k = base.optimal_k_rate(SelectionScheme::NS, cc, 1, hi).k;
        monotone = monotone && k >= prev;
        prev = k;
        seq += (seq.empty() ? "" : " ") + std::to_string(cc) + ":" + std::to_string(k);
    }
    c.sub(monotone, "NS rate argmax nondecreasing in c (c:k* " + seq + ")");
}

void check_gain(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions&) {
    const PerformanceModel model(cfg.network, cfg.cache, cfg.model);
    const auto g = model.coverage_gain(1);
    c.sub(g.gain_ns > g.gain_us, "G_NS(1) = " + fixed(g.gain_ns, 1) + " % > G_US(1) = " + fixed(g.gain_us, 1) + " %");
    c.sub(g.gain_us > 0.0, "G_US(1) > 0");
    c.r.details.push_back("info k*_NS = " + std::to_string(g.ns.k) + ", Gamma_NS = " + fixed(g.ns.value) +
                          ", k*_US = " + std::to_string(g.us.k) + ", Gamma_US = " + fixed(g.us.value) +
                          ", Gamma_m = " + fixed(g.gamma_m) + "; reference figures: >50 % (NS), 35 % (US)");
}

void check_math(Ctx& c, const ExperimentConfig&, const ValidationOptions& o) {
    std::mt19937_64 rng(o.seed + 10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::string where;
    auto track = [&](double got, double want, const std::string& label) {
        const double rel = std::abs(got - want) / std::abs(want);
        if (!(rel <= worst)) {
            worst = rel;
            where = label;
        }
    };
    for (int t = 0; t < 300; ++t) {
        const int i = 1 + static_cast<int>(u(rng) * 30);
        const double eta = std::exp(std::log(0.01) + u(rng) * std::log(1e4));
        const double z = eta / (eta + 3.5);
        track(math::hyp2f1(1.0, i + 3.5, i + 1.0, z), hyp2f1_series_q(1.0, i + 3.5, i + 1.0, z),
              "2F1(1," + f(i + 3.5) + ";" + f(i + 1.0) + ";" + f(z) + ")");
    }
    for (int t = 0; t < 300; ++t) {
        const double b = 0.02 + 0.96 * u(rng);
        const double w = 0.5 * u(rng);
        track(math::hyp2f1(1.0, 1.0, 1.0 + b, w), hyp2f1_series_q(1.0, 1.0, 1.0 + b, w),
              "2F1(1,1;" + f(1 + b) + ";" + f(w) + ")");
    }
    for (int t = 0; t < 400; ++t) {
        const double b = 0.05 + 0.9 * u(rng);
        const double x = std::pow(10.0, -4.0 + 8.0 * u(rng));
        track(unit_hyp2f1_neg(b, x), unit_hyp2f1_neg_oracle(b, x), "2F1(1," + f(b) + ";" + f(1 + b) + ";-" + f(x) + ")");
    }
    c.sub(worst <= kHypRelTol, "2F1 vs binary128 partial sums, 1000 samples: max rel err " + f(worst, 3) + " at " +
                                   where + " (tol " + f(kHypRelTol) + ")");

    double worst_g = 0.0;
    int compared = 0;
    for (int t = 0; t < 1000; ++t) {
        const int i = 1 + static_cast<int>(u(rng) * 40);
        const double x = std::pow(10.0, -3.0 + 5.5 * u(rng));
        const long double want = poisson_cdf_oracle(i, x);
        if (want < 1e-280L) continue;
        ++compared;
        const double rel = static_cast<double>(std::abs(math::regularized_upper_gamma(i, x) - want) / want);
        worst_g = std::max(worst_g, rel);
    }
    c.sub(worst_g <= kGammaRelTol, "upper incomplete gamma vs Poisson CDF (" + std::to_string(compared) +
                                       " samples): max rel err " + f(worst_g, 3) + " (tol " + f(kGammaRelTol) + ")");

    int lens_fail = 0;
    double worst_z = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double y = 0.2 + u(rng), x = 0.2 + u(rng);
        const double lo = std::abs(x - y), hi = x + y;
        const double r = lo + (0.05 + 0.9 * u(rng)) * (hi - lo);
        const int n = 200000;
        int hits = 0;
        for (int s = 0; s < n; ++s) {
            const double px = (2.0 * u(rng) - 1.0) * r, py = (2.0 * u(rng) - 1.0) * r;
            if (px * px + py * py <= r * r && (px - y) * (px - y) + py * py <= x * x) ++hits;
        }
        const double p = static_cast<double>(hits) / n;
        const double est = 4.0 * r * r * p, sd = 4.0 * r * r * std::sqrt(p * (1.0 - p) / n);
        const double z = std::abs(lens_area(r, y, x) - est) / sd;
        worst_z = std::max(worst_z, z);
        if (z > kLensSigmas) ++lens_fail;
    }
    c.sub(lens_fail == 0, "lens area vs rejection sampling, 20 configurations: max |z| " + fixed(worst_z, 2) + " (tol " +
                              f(kLensSigmas) + " sigma)");

    double worst_d = 0.0;
    for (int t = 0; t < 200; ++t) {
        const double y = 0.2 + u(rng), x = 0.2 + u(rng);
        const double lo = std::abs(x - y), hi = x + y;
        const double r = lo + (0.05 + 0.9 * u(rng)) * (hi - lo);
        const double h = 1e-5 * r;
        const double fd = (lens_area(r + h, y, x) - lens_area(r - h, y, x)) / (2.0 * h);
        const double an = lens_area_derivative(r, y, x);
        worst_d = std::max(worst_d, std::abs(fd - an) / std::abs(an));
    }
    c.sub(worst_d <= kLensDerivRelTol, "lens derivative vs central differences, 200 samples: max rel err " +
                                           f(worst_d, 3) + " (tol " + f(kLensDerivRelTol) + ")");
}

void check_determinism(Ctx& c, const ExperimentConfig& cfg, const ValidationOptions& o) {
    ExperimentConfig small = cfg;
    small.sim.trials = 3000;
    small.sim.chunk = 256;
    small.sim.seed = o.seed;
    small.sweep.schemes = {SelectionScheme::NS, SelectionScheme::US};
    small.sweep.k = {1, 4};
    small.sweep.c = {1, 10};
    small.sweep.tau_db = {0.0, 10.0};
    SimulateRequest req;
    req.observables = {"p-in", "mode-prob", "coverage", "rate", "link-coverage-cellular"};
    std::vector<std::string> csv, json;
    for (unsigned w : {1u, 2u, 5u}) {
        small.sim.workers = w;
        const auto rows = cmd_simulate(small, req);
        csv.push_back(render_csv(rows));
        json.push_back(render_json(rows));
    }
    const bool same = csv[0] == csv[1] && csv[0] == csv[2] && json[0] == json[1] && json[0] == json[2];
    c.sub(same, "simulate output at 1, 2 and 5 workers byte-identical (" + std::to_string(csv[0].size()) + " CSV bytes)");
    const bool round = parse_rows(json[0], Format::json) == parse_rows(csv[0], Format::csv);
    c.sub(round, "CSV and JSON renderings parse to identical rows");
}

struct Spec {
    int id;
    const char* name;
    void (*run)(Ctx&, const ExperimentConfig&, const ValidationOptions&);
};

const Spec kChecks[] = {
    {1, "inside-disk probability is 1/5 at two densities", check_p_inside},
    {2, "D2D-mode probabilities match simulation", check_mode_probabilities},
    {3, "D2D-mode upper bound is tight and dominates", check_bound},
    {4, "distance distribution matches true-cell histograms", check_distance},
    {5, "distance distribution approaches the unconstrained law for sparse MBSs", check_sparse},
    {6, "cellular coverage matches simulation", check_cellular},
    {7, "D2D link coverage ordering and simulation gap", check_d2d_links},
    {8, "optimal k structure", check_optimal_k},
    {9, "coverage gain ordering at c=1", check_gain},
    {10, "math kernels against independent oracles", check_math},
    {11, "simulate output is deterministic across worker counts", check_determinism},
};

}  // namespace

std::vector<CheckResult> run_validation(const ExperimentConfig& cfg, const ValidationOptions& opts,
                                        const std::function<void(const CheckResult&)>& on_result) {
    if (!(opts.trial_scale > 0.0)) throw ConfigError("validation: trial scale must be > 0");
    std::vector<CheckResult> out;
    for (const auto& s : kChecks) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), s.id) == opts.only.end()) continue;
        Ctx c;
        c.r.id = s.id;
        c.r.name = s.name;
        c.r.pass = true;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            s.run(c, cfg, opts);
        } catch (const std::exception& ex) {
            c.sub(false, std::string("aborted: ") + ex.what());
        }
        c.r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) on_result(c.r);
        out.push_back(std::move(c.r));
    }
    return out;
}

std::string format_check(const CheckResult& r) {
    std::ostringstream out;
    out << (r.pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << r.id << "] " << r.name << "  (" << std::fixed
        << std::setprecision(1) << r.seconds << " s)\n";
    for (const auto& d : r.details) out << "        " << d << '\n';
    return out.str();
}

}  // namespace d2d
