#include "d2d/mc_oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "d2d/errors.hpp"

namespace d2d::mc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZ95 = 1.959963984540054;

struct Pt {
    double x, y;
};

double exp1(Philox4x32& rng) { return -std::log1p(-rng.uniform()); }

std::int64_t poisson(double mean, Philox4x32& rng) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> d(mean);
    return d(rng);
}

// Square [-h, h]^2 bucketed into G x G cells; optional periodic wrap.
class PointIndex {
public:
    PointIndex(const std::vector<Pt>& pts, double half, double cell, bool torus)
        : pts_(pts), half_(half), torus_(torus) {
        grid_ = std::max(1, static_cast<int>(std::ceil(2.0 * half / cell)));
        cs_ = 2.0 * half / grid_;
        start_.assign(static_cast<std::size_t>(grid_) * grid_ + 1, 0);
        std::vector<int> cell_of(pts.size());
        for (std::size_t p = 0; p < pts.size(); ++p) {
            cell_of[p] = flat(index(pts[p].x), index(pts[p].y));
            ++start_[cell_of[p] + 1];
        }
        for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
        items_.resize(pts.size());
        std::vector<int> fill(start_.begin(), start_.end() - 1);
        for (std::size_t p = 0; p < pts.size(); ++p) items_[fill[cell_of[p]]++] = static_cast<int>(p);
    }

    double dist2(Pt a, Pt b) const {
        double dx = a.x - b.x, dy = a.y - b.y;
        if (torus_) {
            const double side = 2.0 * half_;
            dx -= side * std::round(dx / side);
            dy -= side * std::round(dy / side);
        }
        return dx * dx + dy * dy;
    }

    // Nearest point to q other than `skip`; returns (index, squared distance).
    std::pair<int, double> nearest(Pt q, int skip = -1) const {
        const int ci = index(q.x), cj = index(q.y);
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        const int max_ring = torus_ ? grid_ / 2 + 1 : grid_;
        for (int ring = 0; ring <= max_ring; ++ring) {
            for (int di = -ring; di <= ring; ++di) {
                for (int dj = -ring; dj <= ring; ++dj) {
                    if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
                    int a = ci + di, b = cj + dj;
                    if (torus_) {
                        a = ((a % grid_) + grid_) % grid_;
                        b = ((b % grid_) + grid_) % grid_;
                    } else if (a < 0 || b < 0 || a >= grid_ || b >= grid_) {
                        continue;
                    }
                    const int c = flat(a, b);
                    for (int k = start_[c]; k < start_[c + 1]; ++k) {
                        const int p = items_[k];
                        if (p == skip) continue;
                        const double d2 = dist2(q, pts_[p]);
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best = p;
                        }
                    }
                }
            }
            const double reach = ring * cs_;
            if (best >= 0 && best_d2 <= reach * reach) break;
        }
        return {best, best_d2};
    }

private:
    int index(double v) const { return std::clamp(static_cast<int>(std::floor((v + half_) / cs_)), 0, grid_ - 1); }
    int flat(int a, int b) const { return a * grid_ + b; }

    const std::vector<Pt>& pts_;
    double half_;
    bool torus_;
    int grid_;
    double cs_;
    std::vector<int> start_, items_;
};

struct Window {
    double half;  // disk radius or half side of the torus
    bool torus;
    double area() const { return torus ? 4.0 * half * half : kPi * half * half; }
    Pt sample(Philox4x32& rng) const {
        if (torus) return {(2.0 * rng.uniform() - 1.0) * half, (2.0 * rng.uniform() - 1.0) * half};
        const double r = half * std::sqrt(rng.uniform());
        const double t = 2.0 * kPi * rng.uniform();
        return {r * std::cos(t), r * std::sin(t)};
    }
};

Window make_window(const NetworkParams& n, const SimConfig& cfg) {
    return {cfg.window_radius(n.lambda_m), cfg.edge == EdgePolicy::toroidal};
}

std::vector<Pt> sample_points(double lambda, const Window& w, Philox4x32& rng) {
    const std::int64_t count = poisson(lambda * w.area(), rng);
    std::vector<Pt> pts(static_cast<std::size_t>(count));
    for (auto& p : pts) p = w.sample(rng);
    return pts;
}

double mean_spacing(double lambda_m) { return 1.0 / std::sqrt(lambda_m); }

double interference(const std::vector<double>& dists, double power, double alpha, Philox4x32& rng) {
    double s = 0.0;
    for (double d : dists) s += power * exp1(rng) * std::pow(d, -alpha);
    return s;
}

}  // namespace

std::string_view to_string(EdgePolicy p) { return p == EdgePolicy::toroidal ? "toroidal" : "oversized_window"; }

std::string_view to_string(UsVariant v) {
    return v == UsVariant::select_then_check ? "us_select_then_check" : "us_check_then_select";
}

UsVariant parse_us_variant(std::string_view s) {
    if (s == "us_select_then_check" || s == "select_then_check") return UsVariant::select_then_check;
    if (s == "us_check_then_select" || s == "check_then_select") return UsVariant::check_then_select;
    throw DomainError("unknown US variant '" + std::string(s) + "'");
}

void SimConfig::validate() const {
    if (trials < 1) throw DomainError("SimConfig: trials must be >= 1");
    if (!(window_factor >= 3.0)) throw DomainError("SimConfig: window factor must be >= 3 mean inter-MBS spacings");
    if (!(measurement_factor >= 0.0)) throw DomainError("SimConfig: measurement factor must be >= 0");
    if (workers < 1) throw DomainError("SimConfig: workers must be >= 1");
    if (chunk < 1) throw DomainError("SimConfig: chunk must be >= 1");
}

double SimConfig::window_radius(double lambda_m) const {
    return (measurement_factor + window_factor) * mean_spacing(lambda_m);
}

Realization sample_realization(const NetworkParams& n, const SimConfig& cfg, const Needs& needs, Philox4x32& rng) {
    Realization out;
    const Window win = make_window(n, cfg);
    const auto mbs = sample_points(n.lambda_m, win, rng);
    if (mbs.size() < 2) {
        out.discarded = true;
        out.reason = "fewer_than_two_mbs";
        return out;
    }
    const PointIndex index(mbs, win.half, mean_spacing(n.lambda_m), win.torus);
    const Pt origin{0.0, 0.0};
    const auto [serving, y2] = index.nearest(origin);
    const auto [neighbour, nb2] = index.nearest(mbs[serving], serving);
    (void)neighbour;
    out.y = std::sqrt(y2);
    out.x = 0.5 * std::sqrt(nb2);
    out.inside_bmax = out.y <= out.x;

    if (needs.mbs_interference) {
        out.mbs_interferers.reserve(mbs.size() - 1);
        for (std::size_t j = 0; j < mbs.size(); ++j) {
            if (static_cast<int>(j) != serving) out.mbs_interferers.push_back(std::sqrt(index.dist2(origin, mbs[j])));
        }
    }
    if (!needs.helpers && !needs.d2d_interference) return out;

    const auto helpers = sample_points(n.lambda_d, win, rng);
    const double x2 = out.x * out.x;
    std::vector<std::int64_t> seen;
    std::vector<double> chosen;
    if (needs.d2d_interference) {
        seen.assign(mbs.size(), 0);
        chosen.assign(mbs.size(), 0.0);
    }
    for (const Pt& h : helpers) {
        const int cell = index.nearest(h).first;
        const double d = std::sqrt(index.dist2(origin, h));
        if (cell == serving) {
            out.cell_helpers.push_back(d);
            if (index.dist2(h, mbs[serving]) <= x2) out.disk_helpers.push_back(d);
        } else if (needs.d2d_interference) {
            // reservoir sample of one active helper per cell
            const auto c = static_cast<std::size_t>(cell);
            ++seen[c];
            if (seen[c] == 1 || rng.uniform() * static_cast<double>(seen[c]) < 1.0) chosen[c] = d;
        }
    }
    std::sort(out.cell_helpers.begin(), out.cell_helpers.end());
    std::sort(out.disk_helpers.begin(), out.disk_helpers.end());
    if (needs.d2d_interference) {
        for (std::size_t c = 0; c < mbs.size(); ++c) {
            if (seen[c] > 0) out.d2d_interferers.push_back(chosen[c]);
        }
    }
    return out;
}

std::int64_t sample_typical_cell_count(const NetworkParams& n, const SimConfig& cfg, Philox4x32& rng) {
    const Window win = make_window(n, cfg);
    auto mbs = sample_points(n.lambda_m, win, rng);
    mbs.insert(mbs.begin(), Pt{0.0, 0.0});
    const PointIndex index(mbs, win.half, mean_spacing(n.lambda_m), win.torus);
    const auto helpers = sample_points(n.lambda_d, win, rng);
    std::int64_t count = 0;
    for (const Pt& h : helpers) {
        if (index.nearest(h).first == 0) ++count;
    }
    return count;
}

namespace {

int select_helper(const Realization& r, const TrialRequest& req, Philox4x32& rng) {
    const int m = static_cast<int>(std::min<std::int64_t>(req.k, static_cast<std::int64_t>(r.cell_helpers.size())));
    std::vector<bool> avail(m);
    for (int i = 0; i < m; ++i) avail[i] = rng.uniform() < req.h_d;
    if (m == 0) return 0;
    if (req.scheme == SelectionScheme::NS) {
        for (int i = 0; i < m; ++i) {
            if (avail[i]) return i + 1;
        }
        return 0;
    }
    const double u = rng.uniform();
    if (req.us == UsVariant::select_then_check) {
        const int j = std::min(m - 1, static_cast<int>(u * m));
        return avail[j] ? j + 1 : 0;
    }
    std::vector<int> holding;
    for (int i = 0; i < m; ++i) {
        if (avail[i]) holding.push_back(i);
    }
    if (holding.empty()) return 0;
    const int pick = std::min(static_cast<int>(holding.size()) - 1, static_cast<int>(u * holding.size()));
    return holding[pick] + 1;
}

}  // namespace

TrialOutcome run_trial(std::uint64_t trial, const NetworkParams& n, const SimConfig& cfg, const TrialRequest& req) {
    if (req.k < 1) throw DomainError("run_trial: k must be >= 1");
    Philox4x32 rng(cfg.seed, trial);
    const Needs needs{true, req.sinr, req.sinr};
    const Realization r = sample_realization(n, cfg, needs, rng);
    TrialOutcome out;
    if (r.discarded) {
        out.discarded = true;
        out.reason = r.reason;
        return out;
    }
    out.n_helpers_in_cell = static_cast<std::int64_t>(r.cell_helpers.size());
    out.inside_bmax = r.inside_bmax;
    out.mode = select_helper(r, req, rng);
    out.r_serving = out.mode == 0 ? r.y : r.cell_helpers[out.mode - 1];
    if (!req.sinr) return out;

    if (out.mode == 0) {
        const double signal = n.p_m * exp1(rng) * std::pow(r.y, -n.alpha);
        out.sinr = signal / (n.sigma2 + interference(r.mbs_interferers, n.p_m, n.alpha, rng));
        out.covered_m = out.sinr >= n.tau_m;
        const double users = 1.0 + static_cast<double>(poisson(req.eta_u_cellular, rng));
        out.rate = n.w_m * req.cellular_rate_factor * std::log2(1.0 + out.sinr) / users;
    } else {
        const double signal = n.p_d * exp1(rng) * std::pow(out.r_serving, -n.alpha);
        out.sinr = signal / (n.sigma2 + interference(r.d2d_interferers, n.p_d, n.alpha, rng));
        out.covered_d = out.sinr >= n.tau_d;
        const double users = 1.0 + static_cast<double>(poisson(req.eta_u_d2d, rng));
        out.rate = n.w_d * std::log2(1.0 + out.sinr) / users;
    }
    return out;
}

void Accumulator::add(const std::vector<double>& values) {
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double v = values[j];
        if (std::isnan(v)) {
            ++skipped_[j];
            continue;
        }
        sum_[j] += v;
        sq_[j] += v * v;
        ++n_[j];
    }
}

void Accumulator::merge(const Accumulator& o) {
    for (std::size_t j = 0; j < sum_.size(); ++j) {
        sum_[j] += o.sum_[j];
        sq_[j] += o.sq_[j];
        n_[j] += o.n_[j];
        skipped_[j] += o.skipped_[j];
    }
}

Estimate Accumulator::estimate(std::size_t j, std::int64_t min_samples) const {
    Estimate e;
    e.samples = n_.at(j);
    e.discarded = skipped_.at(j);
    if (e.samples < min_samples) {
        throw InsufficientSamples("estimate: " + std::to_string(e.samples) + " retained samples, need at least " +
                                  std::to_string(min_samples));
    }
    if (e.samples == 0) return e;
    const double nn = static_cast<double>(e.samples);
    e.mean = sum_[j] / nn;
    if (e.samples < 2) return e;
    const double var = std::max(0.0, (sq_[j] - nn * e.mean * e.mean) / (nn - 1.0));
    e.ci_halfwidth = kZ95 * std::sqrt(var / nn);
    return e;
}

Accumulator run_trials(const SimConfig& cfg, std::size_t width,
                       const std::function<void(std::uint64_t, std::vector<double>&)>& trial) {
    return parallel_reduce<Accumulator>(
        cfg, [width] { return Accumulator(width); },
        [&](std::uint64_t t, Accumulator& acc) {
            std::vector<double> out(width, std::numeric_limits<double>::quiet_NaN());
            trial(t, out);
            acc.add(out);
        },
        [](Accumulator& a, const Accumulator& b) { a.merge(b); });
}

Estimate estimate_p_inside(const NetworkParams& n, const SimConfig& cfg, std::int64_t min_samples) {
    const auto acc = run_trials(cfg, 1, [&](std::uint64_t t, std::vector<double>& out) {
        Philox4x32 rng(cfg.seed, t);
        const auto r = sample_realization(n, cfg, {}, rng);
        if (!r.discarded) out[0] = r.inside_bmax ? 1.0 : 0.0;
    });
    return acc.estimate(0, min_samples);
}

std::vector<Estimate> estimate_mode(const NetworkParams& n, const SimConfig& cfg, const std::vector<ModeQuery>& q,
                                    UsVariant us, std::int64_t min_samples) {
    int k_max = 1;
    for (const auto& m : q) {
        if (m.k < 1) throw DomainError("estimate_mode: k must be >= 1");
        k_max = std::max(k_max, m.k);
    }
    const auto acc = run_trials(cfg, q.size(), [&](std::uint64_t t, std::vector<double>& out) {
        Philox4x32 rng(cfg.seed, t);
        const auto r = sample_realization(n, cfg, {true, false, false}, rng);
        if (r.discarded) return;
        // common random numbers across queries
        std::vector<double> u(k_max);
        for (auto& v : u) v = rng.uniform();
        const double pick = rng.uniform();
        const auto n_cell = static_cast<std::int64_t>(r.cell_helpers.size());
        for (std::size_t j = 0; j < q.size(); ++j) {
            const int m = static_cast<int>(std::min<std::int64_t>(q[j].k, n_cell));
            bool d2d = false;
            if (m > 0) {
                if (q[j].scheme == SelectionScheme::US && us == UsVariant::select_then_check) {
                    const int s = std::min(m - 1, static_cast<int>(pick * m));
                    d2d = u[s] < q[j].h_d;
                } else {
                    for (int i = 0; i < m && !d2d; ++i) d2d = u[i] < q[j].h_d;
                }
            }
            out[j] = d2d ? 1.0 : 0.0;
        }
    });
    std::vector<Estimate> res;
    for (std::size_t j = 0; j < q.size(); ++j) res.push_back(acc.estimate(j, min_samples));
    return res;
}

namespace {

double cellular_sinr(const Realization& r, const NetworkParams& n, Philox4x32& rng) {
    const double signal = n.p_m * exp1(rng) * std::pow(r.y, -n.alpha);
    return signal / (n.sigma2 + interference(r.mbs_interferers, n.p_m, n.alpha, rng));
}

}  // namespace

std::vector<Estimate> estimate_cellular_coverage(const NetworkParams& n, const SimConfig& cfg,
                                                 const std::vector<double>& taus, std::int64_t min_samples) {
    const auto acc = run_trials(cfg, taus.size(), [&](std::uint64_t t, std::vector<double>& out) {
        Philox4x32 rng(cfg.seed, t);
        const auto r = sample_realization(n, cfg, {false, true, false}, rng);
        if (r.discarded) return;
        const double sinr = cellular_sinr(r, n, rng);
        for (std::size_t j = 0; j < taus.size(); ++j) out[j] = sinr >= taus[j] ? 1.0 : 0.0;
    });
    std::vector<Estimate> res;
    for (std::size_t j = 0; j < taus.size(); ++j) res.push_back(acc.estimate(j, min_samples));
    return res;
}

std::vector<Estimate> estimate_d2d_coverage(const NetworkParams& n, const SimConfig& cfg, int max_order,
                                            const std::vector<double>& taus, std::int64_t min_samples) {
    if (max_order < 1) throw DomainError("estimate_d2d_coverage: max_order must be >= 1");
    const std::size_t nt = taus.size();
    const auto acc = run_trials(cfg, max_order * nt, [&](std::uint64_t t, std::vector<double>& out) {
        Philox4x32 rng(cfg.seed, t);
        const auto r = sample_realization(n, cfg, {true, false, true}, rng);
        if (r.discarded) return;
        std::vector<double> fades(r.d2d_interferers.size());
        double interf = 0.0;
        for (std::size_t j = 0; j < fades.size(); ++j) {
            interf += n.p_d * exp1(rng) * std::pow(r.d2d_interferers[j], -n.alpha);
        }
        for (int i = 1; i <= max_order; ++i) {
            const double h = exp1(rng);
            if (static_cast<std::size_t>(i) > r.cell_helpers.size()) continue;
            const double sinr = n.p_d * h * std::pow(r.cell_helpers[i - 1], -n.alpha) / (n.sigma2 + interf);
            for (std::size_t j = 0; j < nt; ++j) out[(i - 1) * nt + j] = sinr >= taus[j] ? 1.0 : 0.0;
        }
    });
    std::vector<Estimate> res;
    for (std::size_t j = 0; j < acc.width(); ++j) res.push_back(acc.estimate(j, min_samples));
    return res;
}

Estimate estimate_cellular_spectral_efficiency(const NetworkParams& n, const SimConfig& cfg,
                                               std::int64_t min_samples) {
    const auto acc = run_trials(cfg, 1, [&](std::uint64_t t, std::vector<double>& out) {
        Philox4x32 rng(cfg.seed, t);
        const auto r = sample_realization(n, cfg, {false, true, false}, rng);
        if (r.discarded) return;
        out[0] = std::log2(1.0 + cellular_sinr(r, n, rng));
    });
    return acc.estimate(0, min_samples);
}

D2DModeEstimates estimate_d2d_mode(const NetworkParams& n, const SimConfig& cfg, const TrialRequest& req,
                                   std::int64_t min_samples) {
    TrialRequest q = req;
    q.sinr = true;
    const auto acc = run_trials(cfg, 3, [&](std::uint64_t t, std::vector<double>& out) {
        const auto o = run_trial(t, n, cfg, q);
        if (o.discarded) return;
        out[0] = o.mode > 0 ? 1.0 : 0.0;
        if (o.mode > 0) {
            out[1] = o.covered_d ? 1.0 : 0.0;
            out[2] = o.rate;
        }
    });
    return {acc.estimate(1, min_samples), acc.estimate(2, min_samples), acc.estimate(0, min_samples)};
}

std::vector<DistanceHistogram> conditional_distance_histograms(int max_order, const NetworkParams& n,
                                                               const SimConfig& cfg, const std::vector<double>& edges) {
    if (max_order < 1) throw DomainError("conditional_distance_histogram: i must be >= 1");
    if (edges.size() < 2) throw DomainError("conditional_distance_histogram: need at least two bin edges");
    for (std::size_t b = 1; b < edges.size(); ++b) {
        if (!(edges[b] > edges[b - 1])) throw DomainError("conditional_distance_histogram: edges must increase");
    }
    const std::size_t bins = edges.size() - 1;
    const auto orders = static_cast<std::size_t>(max_order);
    struct Counts {
        std::vector<std::int64_t> cell, disk;  // [order * bins + bin]
        std::vector<std::int64_t> kept_cell, few_cell, kept_disk, few_disk;
        std::int64_t trials = 0, outside = 0, degenerate = 0;
    };
    auto bin_of = [&](double d) -> std::ptrdiff_t {
        if (d < edges.front() || d >= edges.back()) return -1;
        return std::upper_bound(edges.begin(), edges.end(), d) - edges.begin() - 1;
    };
    const auto total = parallel_reduce<Counts>(
        cfg,
        [&] {
            Counts c;
            c.cell.assign(orders * bins, 0);
            c.disk.assign(orders * bins, 0);
            c.kept_cell.assign(orders, 0);
            c.few_cell.assign(orders, 0);
            c.kept_disk.assign(orders, 0);
            c.few_disk.assign(orders, 0);
            return c;
        },
        [&](std::uint64_t t, Counts& c) {
            Philox4x32 rng(cfg.seed, t);
            const auto r = sample_realization(n, cfg, {true, false, false}, rng);
            ++c.trials;
            if (r.discarded) {
                ++c.degenerate;
                return;
            }
            if (!r.inside_bmax) ++c.outside;
            for (std::size_t o = 0; o < orders; ++o) {
                if (r.cell_helpers.size() <= o) {
                    ++c.few_cell[o];
                } else {
                    ++c.kept_cell[o];
                    if (auto b = bin_of(r.cell_helpers[o]); b >= 0) ++c.cell[o * bins + b];
                }
                if (!r.inside_bmax) continue;
                if (r.disk_helpers.size() <= o) {
                    ++c.few_disk[o];
                } else {
                    ++c.kept_disk[o];
                    if (auto b = bin_of(r.disk_helpers[o]); b >= 0) ++c.disk[o * bins + b];
                }
            }
        },
        [](Counts& a, const Counts& b) {
            for (std::size_t k = 0; k < a.cell.size(); ++k) {
                a.cell[k] += b.cell[k];
                a.disk[k] += b.disk[k];
            }
            for (std::size_t o = 0; o < a.kept_cell.size(); ++o) {
                a.kept_cell[o] += b.kept_cell[o];
                a.few_cell[o] += b.few_cell[o];
                a.kept_disk[o] += b.kept_disk[o];
                a.few_disk[o] += b.few_disk[o];
            }
            a.trials += b.trials;
            a.outside += b.outside;
            a.degenerate += b.degenerate;
        });

    std::vector<DistanceHistogram> out(orders);
    for (std::size_t o = 0; o < orders; ++o) {
        DistanceHistogram& h = out[o];
        h.order = static_cast<int>(o) + 1;
        h.edges = edges;
        h.trials = total.trials;
        h.retained_true = total.kept_cell[o];
        h.discarded_few_in_cell = total.few_cell[o];
        h.retained_disk = total.kept_disk[o];
        h.discarded_outside_bmax = total.outside;
        h.discarded_few_in_disk = total.few_disk[o];
        h.discarded_degenerate = total.degenerate;
        h.true_cell.assign(bins, 0.0);
        h.disk.assign(bins, 0.0);
        for (std::size_t b = 0; b < bins; ++b) {
            const double w = edges[b + 1] - edges[b];
            const auto cc = static_cast<double>(total.cell[o * bins + b]);
            const auto cd = static_cast<double>(total.disk[o * bins + b]);
            if (h.retained_true > 0) h.true_cell[b] = cc / (w * static_cast<double>(h.retained_true));
            if (h.retained_disk > 0) h.disk[b] = cd / (w * static_cast<double>(h.retained_disk));
        }
    }
    return out;
}

DistanceHistogram conditional_distance_histogram(int i, const NetworkParams& n, const SimConfig& cfg,
                                                 const std::vector<double>& edges) {
    if (i < 1) throw DomainError("conditional_distance_histogram: i must be >= 1");
    return conditional_distance_histograms(i, n, cfg, edges).back();
}

CountPmf helper_count_pmf(const NetworkParams& n, const SimConfig& cfg, int max_j) {
    if (max_j < 0) throw DomainError("helper_count_pmf: max_j must be >= 0");
    return parallel_reduce<CountPmf>(
        cfg, [&] { return CountPmf{std::vector<std::int64_t>(static_cast<std::size_t>(max_j) + 2, 0), 0}; },
        [&](std::uint64_t t, CountPmf& acc) {
            Philox4x32 rng(cfg.seed, t);
            const auto c = sample_typical_cell_count(n, cfg, rng);
            ++acc.counts[static_cast<std::size_t>(std::min<std::int64_t>(c, max_j + 1))];
            ++acc.trials;
        },
        [](CountPmf& a, const CountPmf& b) {
            for (std::size_t j = 0; j < a.counts.size(); ++j) a.counts[j] += b.counts[j];
            a.trials += b.trials;
        });
}

}  // namespace d2d::mc
