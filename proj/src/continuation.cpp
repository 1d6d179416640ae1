#include "modelock/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "modelock/error.hpp"

namespace modelock {

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::range_end: return "range-end";
        case Termination::newton_failure: return "newton-failure";
        case Termination::period_collapse: return "period-collapse";
        case Termination::symbol_flip: return "symbol-flip";
    }
    return "unknown";
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::flip: return "flip";
        case EventKind::fold: return "fold";
        case EventKind::neimark_sacker: return "neimark-sacker";
        case EventKind::turn_complex: return "eigenvalues-turn-complex";
    }
    return "unknown";
}

BoundMap ContinuationBranch::map_at(double value) const {
    return BoundMap(find_map(map_id), base_params.with(param, value));
}

namespace {

// Re-bases `c` to follow `ref` point by point; returns the max distance.
double align(Cycle& c, const Cycle& ref) {
    const std::size_t n = c.points.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_base = 0;
    for (std::size_t b = 0; b < n; ++b) {
        double d = 0.0;
        for (std::size_t i = 0; i < n && d < best; ++i)
            d = std::max(d, (c.points[(b + i) % n] - ref.points[i]).cwiseAbs().maxCoeff());
        if (d < best) {
            best = d;
            best_base = b;
        }
    }
    if (best_base != 0) c = rotated(c, best_base);
    return best;
}

enum class StepOutcome { ok, failed, collapsed, flipped };

struct StepResult {
    StepOutcome outcome = StepOutcome::failed;
    Cycle cycle;
};

StepResult try_solve(const BoundMap& map, const State3& guess, const Cycle& ref,
                     double allowed_jump, const NewtonOptions& newton) {
    StepResult r;
    try {
        r.cycle = find_cycle(map, guess, ref.period, newton);
    } catch (const SymbolFlipError&) {
        r.outcome = StepOutcome::flipped;
        return r;
    } catch (const Error&) {
        return r;
    }
    if (r.cycle.period != ref.period) {
        r.outcome = StepOutcome::collapsed;
        return r;
    }
    if (align(r.cycle, ref) > allowed_jump) return r;
    r.outcome = StepOutcome::ok;
    return r;
}

double inf_dist(const State3& a, const State3& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

std::array<int, 3> pair_eigenvalues(const EigenTriple& prev, const EigenTriple& next) {
    std::array<int, 3> identity{0, 1, 2};
    if (prev.has_complex_pair() != next.has_complex_pair()) return identity;

    if (prev.has_complex_pair()) {
        auto slots = [](const EigenTriple& e) {
            std::array<int, 3> s{};  // {positive imag, negative imag, real}
            for (int i = 0; i < 3; ++i) {
                if (e[i].imag() > 0.0) s[0] = i;
                else if (e[i].imag() < 0.0) s[1] = i;
                else s[2] = i;
            }
            return s;
        };
        const auto ps = slots(prev), ns = slots(next);
        std::array<int, 3> perm{};
        for (int k = 0; k < 3; ++k) perm[ps[k]] = ns[k];
        return perm;
    }

    std::array<int, 3> perm = identity, best = identity;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int i = 0; i < 3; ++i) cost += std::abs(prev[i] - next[perm[i]]);
        if (cost < best_cost - 1e-15) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

EigenTriple apply_permutation(const EigenTriple& e, const std::array<int, 3>& perm) {
    EigenTriple out;
    for (int i = 0; i < 3; ++i) out[i] = e[perm[i]];
    return out;
}

ContinuationBranch continue_cycle(const BoundMap& map, const Cycle& start, std::string_view param,
                                  double from, double to, double step0,
                                  const ContinuationOptions& opts) {
    if (!(step0 > 0.0)) throw PreconditionError("continue_cycle: step0 must be positive");
    ContinuationBranch branch;
    branch.map_id = map.id();
    branch.base_params = map.params().with(param, from);
    branch.param = std::string(param);

    const double dir = to >= from ? 1.0 : -1.0;
    const double min_step = step0 / std::ldexp(1.0, opts.max_halvings);

    BranchRecord first;
    first.param = from;
    try {
        first.cycle = find_cycle(branch.map_at(from), start.points.front(), start.period, opts.newton);
    } catch (const Error& e) {
        throw StartInvalidError(std::string("start cycle does not converge: ") + e.what());
    }
    if (first.cycle.period != start.period)
        throw StartInvalidError("start cycle collapses to a lower period");
    align(first.cycle, start);
    first.eigen = first.cycle.multipliers;
    branch.records.push_back(std::move(first));

    double h = step0;
    double slope = 10.0;  // |d p / d param| estimate; generous until two records exist
    while (true) {
        const BranchRecord& last = branch.records.back();
        if (dir * (to - last.param) <= 1e-15 * std::max(1.0, std::abs(to))) {
            branch.termination = Termination::range_end;
            break;
        }
        const double next = dir * (last.param + dir * h - to) > 0.0 ? to : last.param + dir * h;
        const double dv = std::abs(next - last.param);

        State3 guess = last.cycle.points.front();
        if (branch.records.size() >= 2) {
            const BranchRecord& before = branch.records[branch.records.size() - 2];
            const double dprev = last.param - before.param;
            guess += (last.cycle.points.front() - before.cycle.points.front()) * ((next - last.param) / dprev);
        }
        const double allowed = opts.jump_factor * dv * std::max(slope, 1.0);
        StepResult r = try_solve(branch.map_at(next), guess, last.cycle, allowed, opts.newton);

        if (r.outcome != StepOutcome::ok) {
            if (h > min_step * (1.0 + 1e-12)) {
                h *= 0.5;
                continue;
            }
            if (branch.records.size() == 1)
                throw StartInvalidError("continuation cannot leave the start cycle");
            branch.failed_at = next;
            branch.termination = r.outcome == StepOutcome::collapsed ? Termination::period_collapse
                                 : r.outcome == StepOutcome::flipped ? Termination::symbol_flip
                                                                     : Termination::newton_failure;
            break;
        }

        double moved = 0.0;
        for (std::size_t i = 0; i < r.cycle.points.size(); ++i)
            moved = std::max(moved, inf_dist(r.cycle.points[i], last.cycle.points[i]));
        slope = moved / dv;

        BranchRecord rec;
        rec.param = next;
        rec.eigen = apply_permutation(r.cycle.multipliers, pair_eigenvalues(last.eigen, r.cycle.multipliers));
        rec.cycle = std::move(r.cycle);
        branch.records.push_back(std::move(rec));
        branch.steps.push_back(dv);
        h = std::min(step0, 2.0 * h);
    }
    return branch;
}

namespace {

using TestFn = std::function<double(const EigenTriple&)>;

struct Refined {
    double lo = 0.0, hi = 0.0;
    bool degraded = false;
    std::optional<Cycle> cycle;  // solved cycle nearest the crossing
    EigenTriple eigen;
};

// Bisection on a sign change of `g` evaluated on multipliers matched to the
// bracketing record.
Refined bisect(const ContinuationBranch& branch, const BranchRecord& a, const BranchRecord& b,
               const TestFn& g, double loc_tol) {
    Refined out;
    out.lo = a.param;
    out.hi = b.param;
    Cycle lo_cycle = a.cycle;
    EigenTriple lo_eigen = a.eigen;
    const double g_lo = g(a.eigen);
    out.eigen = a.eigen;
    out.cycle = a.cycle;
    double lo = a.param, hi = b.param;
    const double span = std::abs(b.param - a.param);
    while (std::abs(hi - lo) > loc_tol) {
        const double mid = 0.5 * (lo + hi);
        StepResult r = try_solve(branch.map_at(mid), lo_cycle.points.front(), lo_cycle,
                                 std::numeric_limits<double>::infinity(), NewtonOptions{});
        if (r.outcome != StepOutcome::ok ||
            align(r.cycle, lo_cycle) > 0.1 + 10.0 * span) {
            out.degraded = true;
            break;
        }
        const EigenTriple e = apply_permutation(r.cycle.multipliers, pair_eigenvalues(lo_eigen, r.cycle.multipliers));
        const double gm = g(e);
        out.eigen = e;
        out.cycle = r.cycle;
        if ((gm < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            lo_cycle = r.cycle;
            lo_eigen = e;
        } else {
            hi = mid;
        }
    }
    out.lo = std::min(lo, hi);
    out.hi = std::max(lo, hi);
    return out;
}

BifurcationEvent make_event(EventKind kind, const Refined& r, std::string_view tag, int period,
                            int slot) {
    BifurcationEvent ev;
    ev.kind = kind;
    ev.lo = r.lo;
    ev.hi = r.hi;
    ev.param = 0.5 * (r.lo + r.hi);
    ev.cycle_tag = std::string(tag);
    ev.period = period;
    ev.eigen = r.eigen;
    ev.critical = slot >= 0 ? r.eigen[static_cast<std::size_t>(slot)] : Complex{};
    ev.degraded = r.degraded;
    if (r.cycle) ev.point = r.cycle->points.front();
    return ev;
}

}  // namespace

std::vector<BifurcationEvent> detect_bifurcations(const ContinuationBranch& branch, double loc_tol,
                                                  std::string_view cycle_tag) {
    if (branch.records.size() < 2)
        throw PreconditionError("detect_bifurcations: branch needs at least two records");
    if (!(loc_tol > 0.0)) throw PreconditionError("detect_bifurcations: loc_tol must be positive");

    std::vector<BifurcationEvent> events;
    const int period = branch.records.front().cycle.period;

    for (std::size_t r = 0; r + 1 < branch.records.size(); ++r) {
        const BranchRecord& a = branch.records[r];
        const BranchRecord& b = branch.records[r + 1];

        if (a.eigen.has_complex_pair() != b.eigen.has_complex_pair()) {
            const bool start_complex = a.eigen.has_complex_pair();
            TestFn g = [start_complex](const EigenTriple& e) {
                return e.has_complex_pair() == start_complex ? 1.0 : -1.0;
            };
            Refined ref = bisect(branch, a, b, g, loc_tol);
            int slot = -1;
            for (int i = 0; i < 3; ++i)
                if (ref.eigen[i].imag() > 0.0) slot = i;
            if (slot < 0) {
                // Report the closest pair of real multipliers instead.
                double best = std::numeric_limits<double>::infinity();
                for (int i = 0; i < 3; ++i)
                    for (int j = i + 1; j < 3; ++j)
                        if (std::abs(ref.eigen[i] - ref.eigen[j]) < best) {
                            best = std::abs(ref.eigen[i] - ref.eigen[j]);
                            slot = i;
                        }
            }
            events.push_back(make_event(EventKind::turn_complex, ref, cycle_tag, period, slot));
        }

        for (int i = 0; i < 3; ++i) {
            const Complex ea = a.eigen[i], eb = b.eigen[i];
            const bool both_real = ea.imag() == 0.0 && eb.imag() == 0.0;
            const bool both_upper = ea.imag() > 0.0 && eb.imag() > 0.0;
            if (both_real) {
                for (const auto& [kind, target] : {std::pair{EventKind::flip, -1.0}, std::pair{EventKind::fold, 1.0}}) {
                    if ((ea.real() - target) * (eb.real() - target) >= 0.0) continue;
                    TestFn g = [i, target](const EigenTriple& e) {
                        return e[i].imag() == 0.0 ? e[i].real() - target : std::abs(e[i]) - 1.0;
                    };
                    Refined ref = bisect(branch, a, b, g, loc_tol);
                    events.push_back(make_event(kind, ref, cycle_tag, period, i));
                }
            } else if (both_upper && (std::abs(ea) - 1.0) * (std::abs(eb) - 1.0) < 0.0) {
                TestFn g = [i](const EigenTriple& e) { return std::abs(e[i]) - 1.0; };
                Refined ref = bisect(branch, a, b, g, loc_tol);
                BifurcationEvent ev = make_event(EventKind::neimark_sacker, ref, cycle_tag, period, i);
                for (int k = 0; k < 3; ++k)
                    if (ev.eigen[k].imag() == 0.0 && std::abs(std::abs(ev.eigen[k]) - 1.0) <= 1e-3)
                        ev.nondegenerate = false;
                events.push_back(ev);
            }
        }
    }

    // Fold at the end of a branch that could not be continued further.
    if (branch.termination == Termination::newton_failure && branch.failed_at) {
        const BranchRecord& last = branch.records.back();
        int slot = -1;
        for (int i = 0; i < 3; ++i)
            if (last.eigen[i].imag() == 0.0 && std::abs(last.eigen[i].real() - 1.0) < 0.1)
                if (slot < 0 || std::abs(last.eigen[i].real() - 1.0) < std::abs(last.eigen[slot].real() - 1.0))
                    slot = i;
        if (slot >= 0) {
            double lo = last.param, hi = *branch.failed_at;
            Cycle lo_cycle = last.cycle;
            EigenTriple lo_eigen = last.eigen;
            bool degraded = false;
            while (std::abs(hi - lo) > loc_tol) {
                const double mid = 0.5 * (lo + hi);
                StepResult r = try_solve(branch.map_at(mid), lo_cycle.points.front(), lo_cycle,
                                         std::numeric_limits<double>::infinity(), NewtonOptions{});
                if (r.outcome == StepOutcome::ok && align(r.cycle, lo_cycle) < 0.1) {
                    lo = mid;
                    lo_eigen = apply_permutation(r.cycle.multipliers, pair_eigenvalues(lo_eigen, r.cycle.multipliers));
                    lo_cycle = std::move(r.cycle);
                } else {
                    hi = mid;
                }
            }
            Refined ref{std::min(lo, hi), std::max(lo, hi), degraded, lo_cycle, lo_eigen};
            events.push_back(make_event(EventKind::fold, ref, cycle_tag, period, slot));
        }
    }

    std::stable_sort(events.begin(), events.end(), [&](const BifurcationEvent& x, const BifurcationEvent& y) {
        const double dir = branch.records.back().param >= branch.records.front().param ? 1.0 : -1.0;
        return dir * x.param < dir * y.param;
    });
    return events;
}

std::optional<Cycle> start_doubled_branch(const BoundMap& map, const Cycle& cycle, double delta,
                                          const NewtonOptions& opts) {
    const Matrix3 m = cycle_matrix(map, cycle.points);
    const EigenTriple e = eigenvalues3(m);
    int slot = -1;
    for (int i = 0; i < 3; ++i)
        if (e[i].imag() == 0.0 && e[i].real() < 0.0 &&
            (slot < 0 || std::abs(e[i].real() + 1.0) < std::abs(e[slot].real() + 1.0)))
            slot = i;
    if (slot < 0) return std::nullopt;
    const State3 v = real_eigenvector(m, e[slot].real());
    for (double d = delta; d <= 1e-2 * (1.0 + 1e-9); d *= 10.0) {
        for (double sign : {1.0, -1.0}) {
            try {
                Cycle c = find_cycle_restarting(map, cycle.points.front() + sign * d * v, 2 * cycle.period, opts);
                if (c.period == 2 * cycle.period) return c;
            } catch (const Error&) {
            }
        }
    }
    return std::nullopt;
}

}  // namespace modelock
