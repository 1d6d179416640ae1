#include "modelock/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>

#include "modelock/error.hpp"

namespace modelock {

namespace {

bool escaped_state(const State3& s) {
    return !is_finite(s) || s.cwiseAbs().maxCoeff() > escape_radius;
}

}  // namespace

OrbitSample iterate_orbit(const BoundMap& map, const State3& x0, long n_transient, long n_keep) {
    if (n_transient < 0 || n_keep < 0) throw PreconditionError("iterate_orbit: negative budget");
    OrbitSample out;
    out.map_id = map.id();
    out.params = map.params();
    out.initial = x0;
    out.transient = n_transient;
    State3 s = x0;
    for (long i = 0; i < n_transient; ++i) {
        s = map(s);
        if (escaped_state(s)) {
            out.escaped = true;
            return out;
        }
    }
    out.points.reserve(static_cast<std::size_t>(n_keep));
    for (long i = 0; i < n_keep; ++i) {
        s = map(s);
        if (escaped_state(s)) {
            out.escaped = true;
            return out;
        }
        out.points.push_back(s);
    }
    return out;
}

double max_lyapunov(const BoundMap& map, const State3& x0, long n_steps, long transient) {
    if (n_steps <= 0) throw PreconditionError("max_lyapunov: n_steps must be positive");
    State3 s = x0;
    State3 v = State3(1.0, 0.3, 0.2).normalized();
    double sum = 0.0;
    for (long i = -transient; i < n_steps; ++i) {
        State3 w = map.jacobian(s) * v;
        double norm = w.norm();
        if (!(norm > 1e-300)) {
            // Tangent collapsed onto the kernel: restart it from the image of
            // a generic direction and do not count this step.
            w = map.jacobian(s) * State3(0.3, 1.0, 0.7);
            norm = w.norm();
            if (!(norm > 1e-300)) w = State3(1.0, 0.3, 0.2);
            v = w.normalized();
        } else {
            v = w / norm;
            if (i >= 0) sum += std::log(norm);
        }
        s = map(s);
        if (escaped_state(s)) throw OverflowError(map.id() + ": orbit escaped during Lyapunov run", s);
    }
    return sum / static_cast<double>(n_steps);
}

ScanResult bifurcation_scan(const BoundMap& map, std::string_view param,
                            std::span<const double> grid, const State3& x0, SeedPolicy policy,
                            long n_transient, long n_keep, int threads) {
    if (grid.size() > 1) {
        const bool increasing = grid[1] > grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (increasing ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1]))
                throw PreconditionError("bifurcation_scan: grid must be strictly monotone");
    }
    (void)map.param(param);  // throws for unknown names

    ScanResult out;
    out.param_name = std::string(param);
    std::vector<OrbitSample> samples(grid.size());

    if (policy == SeedPolicy::follow) {
        State3 seed = x0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            samples[i] = iterate_orbit(map.with(param, grid[i]), seed, n_transient, n_keep);
            seed = (!samples[i].escaped && !samples[i].points.empty()) ? samples[i].points.back() : x0;
        }
    } else {
        const std::size_t workers =
            std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(grid.size(), 1));
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < grid.size(); i += workers)
                    samples[i] = iterate_orbit(map.with(param, grid[i]), x0, n_transient, n_keep);
            });
        }
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (samples[i].escaped) out.escaped.push_back(grid[i]);
        for (std::size_t k = 0; k < samples[i].points.size(); ++k)
            out.points.push_back({grid[i], static_cast<long>(k), samples[i].points[k]});
    }
    return out;
}

std::size_t count_distinct(std::vector<double> values, double tol) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    std::size_t clusters = 1;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] - values[i - 1] > tol) ++clusters;
    return clusters;
}

std::string_view to_string(LoopVerdict v) {
    switch (v) {
        case LoopVerdict::periodic_points: return "periodic-points";
        case LoopVerdict::cyclic_loops: return "cyclic-loops";
        case LoopVerdict::merged_structure: return "merged-structure";
        case LoopVerdict::chaotic: return "chaotic";
    }
    return "unknown";
}

namespace {

double curve_score(std::vector<State3> pts, double antipodal_cos, std::size_t max_points) {
    auto lex = [](const State3& a, const State3& b) {
        return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    };
    std::sort(pts.begin(), pts.end(), lex);
    pts.erase(std::unique(pts.begin(), pts.end(), [](const State3& a, const State3& b) { return a == b; }),
              pts.end());
    if (pts.size() > max_points) {
        std::vector<State3> thin;
        const std::size_t stride = (pts.size() + max_points - 1) / max_points;
        for (std::size_t i = 0; i < pts.size(); i += stride) thin.push_back(pts[i]);
        pts = std::move(thin);
    }
    if (pts.size() < 3) return 0.0;
    constexpr double dup = 1e-12;
    std::size_t curve_like = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        std::size_t j1 = i, j2 = i;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            const double d = (pts[j] - pts[i]).squaredNorm();
            if (d <= dup * dup) continue;
            if (d < d1) {
                d2 = d1;
                j2 = j1;
                d1 = d;
                j1 = j;
            } else if (d < d2) {
                d2 = d;
                j2 = j;
            }
        }
        if (j1 == i || j2 == i) continue;
        const State3 a = (pts[j1] - pts[i]).normalized();
        const State3 b = (pts[j2] - pts[i]).normalized();
        if (a.dot(b) < antipodal_cos) ++curve_like;
    }
    return static_cast<double>(curve_like) / static_cast<double>(pts.size());
}

}  // namespace

LoopCensus count_cyclic_loops(const OrbitSample& sample, int n, std::optional<double> lyapunov,
                              const CensusOptions& opts) {
    if (n < 1) throw PreconditionError("count_cyclic_loops: multiplicity must be >= 1");
    if (sample.escaped) throw PreconditionError("count_cyclic_loops: sample escaped");
    if (sample.points.size() < static_cast<std::size_t>(100 * n))
        throw PreconditionError("count_cyclic_loops: sample shorter than 100 n points");

    LoopCensus census;
    census.multiplicity = n;
    census.lyapunov = lyapunov;
    bool all_points = true, all_loops = true;
    for (int k = 0; k < n; ++k) {
        std::vector<State3> cls;
        for (std::size_t i = static_cast<std::size_t>(k); i < sample.points.size(); i += static_cast<std::size_t>(n))
            cls.push_back(sample.points[i]);
        ResidueClass rc;
        rc.count = cls.size();
        State3 lo = cls.front(), hi = cls.front(), sum = State3::Zero();
        for (const auto& p : cls) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
            sum += p;
        }
        rc.centroid = sum / static_cast<double>(cls.size());
        rc.diameter = (hi - lo).maxCoeff();
        rc.curve_score = rc.diameter > opts.point_tol ? curve_score(cls, opts.antipodal_cos, opts.max_score_points) : 0.0;
        if (rc.diameter > opts.point_tol) all_points = false;
        if (rc.diameter <= opts.point_tol || rc.curve_score < opts.curve_threshold) all_loops = false;
        census.classes.push_back(rc);
    }

    if (lyapunov && *lyapunov > opts.chaos_threshold) census.verdict = LoopVerdict::chaotic;
    else if (all_points) census.verdict = LoopVerdict::periodic_points;
    else if (all_loops) census.verdict = LoopVerdict::cyclic_loops;
    else census.verdict = LoopVerdict::merged_structure;
    return census;
}

ToggleReport two_loop_toggle(const LoopCensus& census) {
    ToggleReport rep;
    const auto n = census.classes.size();
    if (n < 2) return rep;
    State3 mean = State3::Zero();
    for (const auto& c : census.classes) mean += c.centroid;
    mean /= static_cast<double>(n);
    Matrix3 cov = Matrix3::Zero();
    for (const auto& c : census.classes) cov += (c.centroid - mean) * (c.centroid - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Matrix3> es(cov);
    const State3 axis = es.eigenvectors().col(2);

    // 1D 2-means on the projections: best split of the sorted values.
    std::vector<std::pair<double, int>> proj;
    for (std::size_t k = 0; k < n; ++k)
        proj.emplace_back((census.classes[k].centroid - mean).dot(axis), static_cast<int>(k));
    std::sort(proj.begin(), proj.end());
    double best = std::numeric_limits<double>::infinity();
    std::size_t split = 1;
    for (std::size_t s = 1; s < n; ++s) {
        auto sse = [&](std::size_t a, std::size_t b) {
            double m = 0.0;
            for (std::size_t i = a; i < b; ++i) m += proj[i].first;
            m /= static_cast<double>(b - a);
            double e = 0.0;
            for (std::size_t i = a; i < b; ++i) e += (proj[i].first - m) * (proj[i].first - m);
            return e;
        };
        const double e = sse(0, s) + sse(s, n);
        if (e < best) {
            best = e;
            split = s;
        }
    }
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) {
        label[static_cast<std::size_t>(proj[i].second)] = i < split ? 0 : 1;
        rep.groups[i < split ? 0 : 1].push_back(proj[i].second);
    }
    for (auto& g : rep.groups) std::sort(g.begin(), g.end());

    rep.toggles = true;
    for (std::size_t k = 0; k < n; ++k)
        if (label[k] == label[(k + 1) % n]) rep.toggles = false;

    const double gap = proj[split].first - proj[split - 1].first;
    const double within = std::max(proj[split - 1].first - proj[0].first,
                                   proj[n - 1].first - proj[split].first);
    rep.separation_ratio = within > 0.0 ? gap / within : std::numeric_limits<double>::infinity();
    return rep;
}

std::optional<State3> find_bounded_start(const BoundMap& map, const State3& lo, const State3& hi,
                                         int trials, unsigned long long seed, long n_check) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        State3 x0;
        for (int c = 0; c < 3; ++c) x0[c] = lo[c] + (hi[c] - lo[c]) * unit(rng);
        if (!iterate_orbit(map, x0, n_check, 0).escaped) return x0;
    }
    return std::nullopt;
}

std::optional<Cycle> attracting_cycle(const BoundMap& map, const State3& x0, long transient,
                                      int max_period) {
    const OrbitSample orbit = iterate_orbit(map, x0, transient, 4L * max_period + 4);
    if (orbit.escaped) return std::nullopt;
    const auto seeds = seed_cycles_from_orbit(orbit.points, max_period, 1e-6);
    if (seeds.empty()) return std::nullopt;
    try {
        return find_cycle_restarting(map, seeds.front().guess, seeds.front().period);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace modelock
