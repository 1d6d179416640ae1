#include "modelock/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/LU>

#include "modelock/error.hpp"

namespace modelock {

namespace {

double inf_norm(const State3& v) { return v.cwiseAbs().maxCoeff(); }

std::string itinerary(const BoundMap& map, std::span<const State3> points) {
    std::string s;
    if (!map.piecewise()) return s;
    s.reserve(points.size());
    for (const auto& p : points) s.push_back(map.symbol(p));
    return s;
}

}  // namespace

ShotResult shoot(const BoundMap& map, const State3& x, int period) {
    ShotResult out;
    out.points.reserve(static_cast<std::size_t>(period));
    out.monodromy = Matrix3::Identity();
    State3 p = x;
    for (int i = 0; i < period; ++i) {
        out.points.push_back(p);
        out.monodromy = map.jacobian(p) * out.monodromy;
        p = map(p);
        if (!is_finite(p)) throw OverflowError(map.id() + ": orbit left the finite range", out.points.back());
    }
    out.image = p;
    return out;
}

Matrix3 cycle_matrix(const BoundMap& map, std::span<const State3> points, std::size_t base) {
    Matrix3 m = Matrix3::Identity();
    const std::size_t n = points.size();
    for (std::size_t k = 0; k < n; ++k) m = map.jacobian(points[(base + k) % n]) * m;
    return m;
}

EigenTriple cycle_multipliers(const BoundMap& map, const Cycle& cycle, std::size_t base) {
    const Matrix3 m = cycle_matrix(map, cycle.points, base);
    if (!m.allFinite())
        throw OverflowError("cycle product matrix is not finite", cycle.points.front());
    return eigenvalues3(m);
}

Cycle find_cycle(const BoundMap& map, const State3& guess, int period, const NewtonOptions& opts) {
    if (period < 1) throw PreconditionError("find_cycle: period must be >= 1");
    if (!(opts.tol > 0.0)) throw PreconditionError("find_cycle: tolerance must be positive");
    if (!is_finite(guess)) throw PreconditionError("find_cycle: guess is not finite");

    State3 x = guess;
    ShotResult shot = shoot(map, x, period);
    std::string symbols = itinerary(map, shot.points);
    double residual = inf_norm(shot.image - x);
    int iter = 0;
    while (residual > opts.tol) {
        if (iter == opts.max_iterations) {
            std::ostringstream msg;
            msg << "Newton did not converge in " << opts.max_iterations
                << " iterations (residual " << residual << ")";
            throw DivergenceError(msg.str(), residual);
        }
        const Matrix3 a = shot.monodromy - Matrix3::Identity();
        const double cond = condition_number(a);
        if (!(cond <= opts.condition_limit)) {
            std::ostringstream msg;
            msg << "Newton matrix DF^n - I is singular (condition " << cond << ")";
            throw NearBifurcationError(msg.str(), cond);
        }
        x += a.partialPivLu().solve(-(shot.image - x));
        ++iter;
        if (!is_finite(x)) throw DivergenceError("Newton iterate is not finite", residual);
        shot = shoot(map, x, period);
        residual = inf_norm(shot.image - x);
        if (map.piecewise()) {
            std::string now = itinerary(map, shot.points);
            if (now != symbols)
                throw SymbolFlipError("itinerary changed from " + symbols + " to " + now, symbols,
                                      now, x);
        }
    }

    // Minimal period: the smallest divisor d with p_{i+d} = p_i.
    int minimal = period;
    for (int d = 1; d < period; ++d) {
        if (period % d != 0) continue;
        bool repeats = true;
        for (int i = 0; i + d < period && repeats; ++i)
            repeats = inf_norm(shot.points[i + d] - shot.points[i]) < opts.separation;
        if (repeats) {
            minimal = d;
            break;
        }
    }

    Cycle c;
    c.map_id = map.id();
    c.params = map.params();
    c.period = minimal;
    c.points.assign(shot.points.begin(), shot.points.begin() + minimal);
    c.symbols = itinerary(map, c.points);
    c.newton_iterations = iter;
    c.residual = 0.0;
    for (int i = 0; i < minimal; ++i)
        c.residual = std::max(c.residual, inf_norm(map(c.points[i]) - c.points[(i + 1) % minimal]));
    c.multipliers = cycle_multipliers(map, c);
    return c;
}

Cycle find_cycle_restarting(const BoundMap& map, const State3& guess, int period,
                            const NewtonOptions& opts, int max_restarts) {
    State3 x = guess;
    for (int attempt = 0;; ++attempt) {
        try {
            return find_cycle(map, x, period, opts);
        } catch (const SymbolFlipError& e) {
            if (attempt >= max_restarts) throw;
            x = e.restart_point();
        }
    }
}

CycleClass classify_cycle(const EigenTriple& e) {
    constexpr double unit_tol = 1e-9;
    CycleClass c;
    c.complex_pair = e.has_complex_pair();
    bool negative_unstable = false;
    for (const auto& v : e.values) {
        const double m = std::abs(v);
        if (std::abs(m - 1.0) <= unit_tol) c.near_bifurcation = true;
        if (m > 1.0 + unit_tol) {
            ++c.unstable_count;
            if (v.imag() == 0.0 && v.real() < 0.0) negative_unstable = true;
        }
    }
    switch (c.unstable_count) {
        case 0: c.tag = c.complex_pair ? CycleTag::stable_focus : CycleTag::stable_node; break;
        case 3: c.tag = CycleTag::repeller; break;
        default:
            if (c.complex_pair) c.tag = CycleTag::saddle_focus;
            else if (negative_unstable) c.tag = CycleTag::flip_saddle;
            else c.tag = CycleTag::saddle;
    }
    return c;
}

std::string_view to_string(CycleTag tag) {
    switch (tag) {
        case CycleTag::stable_node: return "stable-node";
        case CycleTag::stable_focus: return "stable-focus";
        case CycleTag::saddle: return "saddle";
        case CycleTag::flip_saddle: return "flip-saddle";
        case CycleTag::saddle_focus: return "saddle-focus";
        case CycleTag::repeller: return "repeller";
    }
    return "unknown";
}

std::vector<CycleSeed> seed_cycles_from_orbit(std::span<const State3> orbit, int max_period,
                                              double cluster_tol) {
    std::vector<CycleSeed> seeds;
    const auto len = static_cast<int>(orbit.size());
    for (int n = 1; n <= max_period && n < len; ++n) {
        bool recurrent = true;
        for (int k = 0; k + n < len && recurrent; ++k)
            recurrent = inf_norm(orbit[k + n] - orbit[k]) < cluster_tol;
        if (recurrent) {
            CycleSeed s;
            s.period = n;
            s.guess = orbit.front();
            s.points.assign(orbit.begin(), orbit.begin() + n);
            seeds.push_back(std::move(s));
            break;
        }
    }
    return seeds;
}

double min_separation(std::span<const State3> points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, inf_norm(points[i] - points[j]));
    return best;
}

std::size_t nearest_point(std::span<const State3> points, const State3& anchor) {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = (points[i] - anchor).norm();
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

Cycle rotated(const Cycle& c, std::size_t base) {
    Cycle out = c;
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i) out.points[i] = c.points[(base + i) % n];
    if (!c.symbols.empty())
        for (std::size_t i = 0; i < n; ++i) out.symbols[i] = c.symbols[(base + i) % n];
    return out;
}

bool same_orbit(const Cycle& a, const Cycle& b, double tol) {
    if (a.period != b.period) return false;
    for (const auto& p : a.points) {
        const auto j = nearest_point(b.points, p);
        if (inf_norm(b.points[j] - p) > tol) return false;
    }
    return true;
}

std::optional<Cycle> find_saddle_cycle(const BoundMap& map, std::span<const State3> stable_points,
                                       int period, const SaddleSearchOptions& opts) {
    const std::size_t n = stable_points.size();
    if (n == 0) throw PreconditionError("find_saddle_cycle: no stable points given");

    std::vector<Cycle> found;
    auto consider = [&](const State3& seed) {
        Cycle c;
        try {
            c = find_cycle_restarting(map, seed, period, opts.newton);
        } catch (const Error&) {
            return;
        }
        if (c.period != period) return;
        const CycleClass cls = classify_cycle(c.multipliers);
        if (cls.unstable_count != 1 || cls.near_bifurcation) return;
        if (opts.require_positive_unstable) {
            const Complex& u = c.multipliers[0];
            if (u.imag() != 0.0 || u.real() <= 1.0) return;
        }
        for (const auto& p : c.points)
            for (const auto& s : stable_points)
                if (inf_norm(p - s) < 1e-6) return;
        for (const auto& f : found)
            if (same_orbit(f, c, 1e-7)) return;
        found.push_back(std::move(c));
    };

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return (stable_points[a] - stable_points[i]).norm() <
                   (stable_points[b] - stable_points[i]).norm();
        });
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(opts.neighbours), n - 1);
        for (std::size_t r = 1; r <= k; ++r) {
            const State3& a = stable_points[i];
            const State3& b = stable_points[order[r]];
            for (int f = 1; f <= opts.fractions; ++f) {
                const double t = static_cast<double>(f) / (opts.fractions + 1);
                consider(a + t * (b - a));
            }
        }
        if (n == 1) consider(stable_points[0] + State3::Constant(1e-2));
    }
    if (found.empty()) return std::nullopt;

    auto mean_gap = [&](const Cycle& c) {
        double s = 0.0;
        for (const auto& p : c.points)
            s += (stable_points[nearest_point(stable_points, p)] - p).norm();
        return s / static_cast<double>(c.points.size());
    };
    return *std::min_element(found.begin(), found.end(), [&](const Cycle& a, const Cycle& b) {
        return mean_gap(a) < mean_gap(b);
    });
}

}  // namespace modelock
