// Acceptance run: one PASS/FAIL line per criterion, details indented below.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "modelock/continuation.hpp"
#include "modelock/dynamics.hpp"
#include "modelock/io.hpp"
#include "modelock/manifold.hpp"
#include "oracles.hpp"

using namespace modelock;

namespace {

class Report {
public:
    void note(const std::string& s) { lines_.push_back(s); }
    bool expect(bool ok, const std::string& what) {
        note(std::string(ok ? "ok   " : "FAIL ") + what);
        ok_ = ok_ && ok;
        return ok;
    }
    bool ok() const { return ok_; }
    const std::vector<std::string>& lines() const { return lines_; }

private:
    std::vector<std::string> lines_;
    bool ok_ = true;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

BoundMap with(const MapDef& def, const std::string& name, double value) {
    return BoundMap(def, def.defaults().with(name, value));
}

struct Pair {
    Cycle node;
    Cycle saddle;
};

Pair node_and_saddle(const BoundMap& m, const State3& x0, int saddle_period = 0) {
    const auto node = attracting_cycle(m, x0);
    if (!node) throw Error("no attracting cycle from the start point");
    const auto saddle = find_saddle_cycle(m, node->points, saddle_period ? saddle_period : node->period);
    if (!saddle) throw Error("no saddle cycle near the stable cycle");
    return {*node, *saddle};
}

// Largest component deviation under the best assignment of computed real
// multipliers to the expected ones.
double triple_deviation(const EigenTriple& e, std::array<double, 3> want) {
    std::array<int, 3> idx{0, 1, 2};
    double best = 1e300;
    do {
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(e[idx[i]] - Complex(want[i], 0.0)));
        best = std::min(best, worst);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

std::string triple_text(const EigenTriple& e) {
    std::string s;
    for (const auto& v : e.values) s += (s.empty() ? "" : " ") + (v.imag() == 0.0 ? num(v.real()) : num(v.real()) + "+" + num(v.imag()) + "i");
    return s;
}

bool table_check(Report& r, const std::string& label, const BoundMap& m, const State3& x0, int period,
                 std::array<double, 3> node_want, std::array<double, 3> saddle_want) {
    const auto p = node_and_saddle(m, x0);
    r.expect(p.node.period == period && p.saddle.period == period,
             label + " periods " + std::to_string(p.node.period) + " / " + std::to_string(p.saddle.period));
    const double dn = triple_deviation(p.node.multipliers, node_want);
    const double ds = triple_deviation(p.saddle.multipliers, saddle_want);
    r.expect(dn <= 2e-3, label + " stable multipliers " + triple_text(p.node.multipliers) + " (max dev " + num(dn) + ")");
    return r.expect(ds <= 2e-3, label + " saddle multipliers " + triple_text(p.saddle.multipliers) + " (max dev " +
                                    num(ds) + ")");
}

void criterion1(Report& r) {
    table_check(r, "Mira B=-0.58", with(mira_map(), "B", -0.58), {0.544, -0.525, 0.091}, 5,
                {0.3550, -0.7131, 0.2593}, {1.3963, -0.7878, 0.0597});
}

void criterion2(Report& r) {
    table_check(r, "Henon a=1.2", with(henon_map(), "a", 1.2), {0.049, 1.146, 1.083}, 4,
                {0.1795, -0.9813, -0.0006}, {1.6217, -0.6890, -0.0001});
}

struct EventCase {
    std::string label;
    BoundMap map;
    State3 x0;
    std::string param;
    double to;
    double step;
    bool saddle;
    EventKind kind;
    double expected;
    double tol;
};

void criterion3(Report& r) {
    const std::vector<EventCase> cases{
        {"Mira saddle flip", with(mira_map(), "B", -0.58), {0.544, -0.525, 0.091}, "B", -0.54, 0.001, true, EventKind::flip, -0.5627, 2e-3},
        {"Mira node flip", with(mira_map(), "B", -0.58), {0.544, -0.525, 0.091}, "B", -0.54, 0.001, false, EventKind::flip, -0.55, 2e-3},
        {"Henon node flip", with(henon_map(), "a", 1.2), {0.049, 1.146, 1.083}, "a", 1.3, 0.001, false, EventKind::flip, 1.204, 2e-3},
        {"LV turn complex", with(lotka_volterra_map(), "beta", -0.59), {0.512, 0.95, 0.144}, "beta", -1.0, 0.005, false, EventKind::turn_complex, -0.646, 2e-3},
        {"LV Neimark-Sacker", with(lotka_volterra_map(), "beta", -0.59), {0.512, 0.95, 0.144}, "beta", -1.0, 0.005, false, EventKind::neimark_sacker, -0.968, 2e-3},
        {"BCNF Neimark-Sacker", with(border_collision_map(), "delta_R", 1.4), {-0.048, -0.04, 0.063}, "delta_R", 1.5, 0.002, false, EventKind::neimark_sacker, 1.455, 2e-3},
        {"coupled period-10 fold", with(coupled_map(), "a", 27.2), {0.947, 0.842, 0.744}, "a", 27.0, 0.005, false, EventKind::fold, 27.1107, 5e-3},
        {"coupled period-20 fold", with(coupled_map(), "a", 27.521), {0.205, 0.535, 0.904}, "a", 27.4, 0.005, false, EventKind::fold, 27.46, 5e-3},
    };
    for (const auto& c : cases) {
        const auto node = attracting_cycle(c.map, c.x0);
        if (!r.expect(node.has_value(), c.label + ": attracting cycle")) continue;
        Cycle start = *node;
        if (c.saddle) {
            const auto s = find_saddle_cycle(c.map, node->points, node->period);
            if (!r.expect(s.has_value(), c.label + ": saddle cycle")) continue;
            start = *s;
        }
        const auto branch = continue_cycle(c.map, start, c.param, c.map.param(c.param), c.to, c.step);
        const auto events = detect_bifurcations(branch, 1e-5, c.saddle ? "saddle" : "stable");
        const auto it = std::find_if(events.begin(), events.end(), [&](const auto& e) { return e.kind == c.kind; });
        if (!r.expect(it != events.end(), c.label + ": event detected (period " + std::to_string(start.period) + ")"))
            continue;
        r.expect(std::abs(it->param - c.expected) <= c.tol,
                 c.label + " at " + c.param + " = " + num(it->param) + ", expected " + num(c.expected) + " +- " + num(c.tol));
    }
}

ConnectionReport connection(const BoundMap& m, const Pair& p, const ManifoldSettings& opts = {}) {
    const auto curves = grow_all_branches(m, p.saddle, opts, p.node.points, 2);
    return classify_connection(m, p.saddle, p.node, curves);
}

void criterion4(Report& r) {
    const auto t1 = node_and_saddle(with(mira_map(), "B", -0.58), {0.544, -0.525, 0.091});
    const auto pred1 = predict_doubling_type(t1.node.multipliers, t1.saddle.multipliers);
    const auto obs1 = connection(with(mira_map(), "B", -0.54), node_and_saddle(with(mira_map(), "B", -0.54), {-0.579, 0.101, 0.351}));
    r.expect(pred1.type == DoublingType::disjoint_loops,
             "Mira prediction " + std::string(to_string(pred1.type)) + " (lambda3 node " + num(pred1.node_lambda3) +
                 ", saddle " + num(pred1.saddle_lambda3) + ")");
    r.expect(obs1.tag() == "disjoint-loops(2)", "Mira B=-0.54 connection " + obs1.tag());
    r.expect(prediction_matches(pred1, obs1), "Mira prediction = observation");

    const auto t2 = node_and_saddle(with(henon_map(), "a", 1.2), {0.049, 1.146, 1.083});
    const auto pred2 = predict_doubling_type(t2.node.multipliers, t2.saddle.multipliers);
    const auto obs2 = connection(with(henon_map(), "a", 1.3), node_and_saddle(with(henon_map(), "a", 1.3), {-0.498, -0.129, 1.296}));
    r.expect(pred2.type == DoublingType::mobius_length_doubled,
             "Henon prediction " + std::string(to_string(pred2.type)) + " (lambda3 node " + num(pred2.node_lambda3) +
                 ", saddle " + num(pred2.saddle_lambda3) + ")");
    r.expect(obs2.tag() == "length-doubled", "Henon a=1.3 connection " + obs2.tag());
    r.expect(prediction_matches(pred2, obs2), "Henon prediction = observation");
}

std::string verdict(const LoopCensus& c) {
    return std::string(to_string(c.verdict)) + "(" + std::to_string(c.multiplicity) + ")";
}

void criterion5(Report& r) {
    {
        const auto m = with(lotka_volterra_map(), "beta", -1.0);
        const State3 x0(0.028, 0.754, 0.538);
        const auto c = count_cyclic_loops(iterate_orbit(m, x0, 20000, 60000), 6, max_lyapunov(m, x0, 200000, 20000));
        r.expect(verdict(c) == "cyclic-loops(6)", "LV beta=-1: " + verdict(c));
    }
    {
        const auto m = with(border_collision_map(), "delta_R", 1.5);
        const State3 x0(-0.082, 0.02, 0.046);
        const auto c = count_cyclic_loops(iterate_orbit(m, x0, 20000, 70000), 7, max_lyapunov(m, x0, 200000, 20000));
        r.expect(verdict(c) == "cyclic-loops(7)", "BCNF delta_R=1.5: " + verdict(c));
    }
    {
        const auto m = with(coupled_map(), "a", 27.521);
        const State3 x0(0.205, 0.535, 0.904);
        const auto p = node_and_saddle(m, x0);
        ManifoldSettings opts;
        opts.h_max = 1e-4;
        const auto curves = grow_all_branches(m, p.saddle, opts, {}, 2);
        const auto sample = sample_along_manifolds(m, p.saddle, curves, 10, 2e-5);
        const auto c = count_cyclic_loops(sample, 10, max_lyapunov(m, x0, 200000, 20000));
        r.note("coupled a=27.521: saddle period " + std::to_string(p.saddle.period) + ", " +
               std::to_string(sample.points.size()) + " manifold samples");
        r.expect(verdict(c) == "cyclic-loops(10)", "coupled a=27.521: " + verdict(c));
        const auto t = two_loop_toggle(c);
        r.expect(t.toggles, "coupled a=27.521: iterates toggle between two big loops (separation ratio " +
                                num(t.separation_ratio) + ")");
    }
}

void criterion6(Report& r) {
    struct Case {
        std::string label;
        BoundMap map;
        State3 x0;
    };
    const std::vector<Case> cases{
        {"Mira B=-0.58", with(mira_map(), "B", -0.58), {0.544, -0.525, 0.091}},
        {"Henon a=1.2", with(henon_map(), "a", 1.2), {0.049, 1.146, 1.083}},
        {"Henon a=1.25", with(henon_map(), "a", 1.25), {-0.416, -0.049, 1.246}},
        {"LV beta=-0.59", with(lotka_volterra_map(), "beta", -0.59), {0.512, 0.95, 0.144}},
        {"BCNF delta_R=1.4", with(border_collision_map(), "delta_R", 1.4), {-0.048, -0.04, 0.063}},
        {"coupled a=27.2", with(coupled_map(), "a", 27.2), {0.947, 0.842, 0.744}},
    };
    int agreeing = 0;
    for (const auto& c : cases) {
        const auto cyc = attracting_cycle(c.map, c.x0);
        if (!r.expect(cyc.has_value(), c.label + ": attracting cycle")) continue;
        const double ref = oracle::cycle_exponent(c.map, cyc->points[0], cyc->period);
        const auto t0 = std::chrono::steady_clock::now();
        const double got = max_lyapunov(c.map, c.x0, 1000000);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = r.expect(std::abs(got - ref) <= 2e-3 && secs <= 60.0,
                                 c.label + " period " + std::to_string(cyc->period) + ": lambda " + num(got) +
                                     ", from multipliers " + num(ref) + " (" + num(secs) + " s)");
        agreeing += ok;
    }
    r.expect(agreeing >= 5, std::to_string(agreeing) + " stable cycles agree");
    const auto t0 = std::chrono::steady_clock::now();
    const double torus = max_lyapunov(with(henon_map(), "a", 1.0), {0.1, 0.1, 0.1}, 1000000);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.expect(std::abs(torus) <= 5e-3 && secs <= 60.0,
             "Henon a=1.0 torus: lambda " + num(torus) + " (" + num(secs) + " s)");
}

State3 iterate(const BoundMap& m, State3 s, int n) {
    for (int i = 0; i < n; ++i) s = m(s);
    return s;
}

void criterion7(Report& r) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0);
    {
        ParamSet cubic;
        for (const auto& spec : cubic_map().schema) cubic.add(spec.name, 0.5 * u(rng));
        const std::vector<BoundMap> maps{BoundMap(mira_map(), mira_map().defaults()),
                                         BoundMap(henon_map(), henon_map().defaults()),
                                         BoundMap(lotka_volterra_map(), lotka_volterra_map().defaults()),
                                         BoundMap(coupled_map(), coupled_map().defaults()),
                                         BoundMap(cubic_map(), cubic)};
        for (const auto& m : maps) {
            double worst = 0.0;
            for (int k = 0; k < 200; ++k) {
                const bool positive = m.id() == "lv" || m.id() == "coupled";
                const State3 s = positive ? State3(pos(rng), pos(rng), pos(rng)) : State3(u(rng), u(rng), u(rng));
                const Matrix3 fd = oracle::fd_jacobian(m, s);
                worst = std::max(worst, (m.jacobian(s) - fd).norm() / std::max(1.0, fd.norm()));
            }
            r.expect(worst <= 1e-6, m.id() + " Jacobian vs differences, relative " + num(worst));
        }
    }
    {
        double worst = 0.0;
        for (double B : {-0.58, -0.555, -0.54}) {
            const auto m = with(mira_map(), "B", B);
            for (int k = 0; k < 200; ++k)
                worst = std::max(worst, std::abs(m.jacobian({2 * u(rng), 2 * u(rng), 2 * u(rng)}).determinant() - B));
        }
        r.expect(worst <= 1e-12, "Mira det J = B, max error " + num(worst));
    }
    {
        double cyc = 0.0, rot = 0.0;
        struct Case {
            BoundMap map;
            State3 x0;
            int saddle_period;
        };
        for (const auto& [m, x0, sp] : std::vector<Case>{
                 {with(mira_map(), "B", -0.58), {0.544, -0.525, 0.091}, 5},
                 {with(henon_map(), "a", 1.25), {-0.416, -0.049, 1.246}, 4},
                 {with(lotka_volterra_map(), "beta", -0.59), {0.512, 0.95, 0.144}, 6}}) {
            const auto p = node_and_saddle(m, x0, sp);
            for (const Cycle* c : {&p.node, &p.saddle}) {
                const auto n = c->points.size();
                for (std::size_t i = 0; i < n; ++i)
                    cyc = std::max(cyc, (m(c->points[i]) - c->points[(i + 1) % n]).norm() /
                                            std::max(1.0, c->points[(i + 1) % n].norm()));
                const std::vector<Complex> base(c->multipliers.values.begin(), c->multipliers.values.end());
                for (std::size_t b = 1; b < n; ++b) {
                    const auto e = cycle_multipliers(m, *c, b);
                    rot = std::max(rot, oracle::multiset_distance({e.values.begin(), e.values.end()}, base) /
                                            std::max(1.0, c->multipliers.max_modulus()));
                }
            }
        }
        r.expect(cyc <= 1e-8, "cyclic consistency of cycles, relative " + num(cyc));
        r.expect(rot <= 1e-8, "multipliers invariant under basepoint rotation, relative " + num(rot));
    }
    const auto m58 = with(mira_map(), "B", -0.58);
    const auto p58 = node_and_saddle(m58, {0.544, -0.525, 0.091});
    {
        ManifoldSettings opts;
        double worst = 0.0;
        for (int dir : {1, -1}) {
            const auto c = grow_unstable_manifold(m58, p58.saddle, {0, dir}, opts, p58.node.points);
            for (std::size_t i = 0; i < c.polyline.size() / 2; i += 5)
                worst = std::max(worst, oracle::polyline_distance(iterate(m58, c.polyline[i], c.iterate), c.polyline));
        }
        r.expect(worst <= 2.0 * opts.h_max, "manifold invariance under F^n, max distance " + num(worst) +
                                                " (2 h_max = " + num(2.0 * opts.h_max) + ")");
    }
    {
        ManifoldSettings a, b;
        b.delta0 = a.delta0 / 2.0;
        const auto ca = grow_all_branches(m58, p58.saddle, a, p58.node.points, 2);
        const auto cb = grow_all_branches(m58, p58.saddle, b, p58.node.points, 2);
        bool same = ca.size() == cb.size();
        for (std::size_t i = 0; same && i < ca.size(); ++i) same = ca[i].attractor_set == cb[i].attractor_set;
        r.expect(same, "terminal attractor assignments unchanged when delta0 is halved");
    }
    {
        const auto m = with(mira_map(), "B", -0.54);
        const auto p = node_and_saddle(m, {-0.579, 0.101, 0.351});
        const auto curves = grow_all_branches(m, p.saddle, {}, p.node.points, 2);
        const auto rep = classify_connection(m, p.saddle, p.node, curves);
        if (r.expect(rep.components.size() == 2, "Mira B=-0.54 has two loops")) {
            std::array<std::vector<State3>, 2> loops;
            for (const auto& e : rep.edges) {
                const auto& c0 = rep.components[0];
                const int comp = std::find(c0.begin(), c0.end(), e.node) != c0.end() ? 0 : 1;
                for (const auto& c : curves)
                    if (c.branch.point == e.saddle && c.branch.direction == e.direction)
                        for (const auto& q : resample_polyline(c.polyline, 2e-3)) loops[comp].push_back(q);
            }
            auto spread = [&](int from, int to, int n) {
                double worst = 0.0;
                for (std::size_t i = 0; i < loops[from].size(); i += 3)
                    worst = std::max(worst, oracle::polyline_distance(iterate(m, loops[from][i], n), loops[to]));
                return worst;
            };
            const double eps = std::max(spread(0, 0, 2), spread(1, 1, 2));
            const double swap = std::max(spread(0, 1, 1), spread(1, 0, 1));
            const double self = spread(0, 0, 1);
            r.expect(eps <= 1e-2, "each loop maps to itself under F^2 within " + num(eps));
            r.expect(swap <= 2.0 * eps && self > 10.0 * eps,
                     "F exchanges the loops: distance to the other loop " + num(swap) + ", to itself " + num(self));
        }
    }
}

void criterion8(Report& r) {
    const auto mira = with(mira_map(), "B", -0.555);
    const auto pm = node_and_saddle(mira, {0.303, -0.618, 0.605}, 10);
    r.expect(pm.node.period == 5 && pm.saddle.period == 10,
             "Mira B=-0.555: stable period " + std::to_string(pm.node.period) + " with saddle period " +
                 std::to_string(pm.saddle.period) + " (" + std::string(to_string(classify_cycle(pm.saddle.multipliers).tag)) + ")");
    const auto henon = with(henon_map(), "a", 1.25);
    const auto ph = node_and_saddle(henon, {-0.416, -0.049, 1.246}, 4);
    r.expect(ph.node.period == 8 && ph.saddle.period == 4,
             "Henon a=1.25: stable period " + std::to_string(ph.node.period) + " with saddle period " +
                 std::to_string(ph.saddle.period) + " (" + std::string(to_string(classify_cycle(ph.saddle.multipliers).tag)) + ")");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Report&)>>> criteria{
        {"1 Mira period-5 multipliers", criterion1},
        {"2 generalised Henon period-4 multipliers", criterion2},
        {"3 bifurcation localisation", criterion3},
        {"4 doubling-type prediction matches manifold topology", criterion4},
        {"5 cyclic loop censuses", criterion5},
        {"6 Lyapunov exponents", criterion6},
        {"7 property suites", criterion7},
        {"8 coexisting cycles of different period", criterion8},
    };
    int failed = 0;
    for (const auto& [name, body] : criteria) {
        Report r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body(r);
        } catch (const std::exception& e) {
            r.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (r.ok() ? "PASS " : "FAIL ") << name << " (" << num(secs) << " s)\n";
        for (const auto& l : r.lines()) std::cout << "    " << l << '\n';
        std::cout.flush();
        failed += !r.ok();
    }
    std::cout << (failed ? "FAILED " + std::to_string(failed) + " criteria" : std::string("all criteria passed")) << '\n';
    return failed ? 1 : 0;
}
