#include "commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "modelock/continuation.hpp"
#include "modelock/cycles.hpp"
#include "modelock/dynamics.hpp"
#include "modelock/io.hpp"
#include "modelock/manifold.hpp"
#include "modelock/svg.hpp"

#ifndef MODELOCK_VERSION
#define MODELOCK_VERSION "0"
#endif

namespace modelock::cli {

namespace {

constexpr std::array<const char*, 10> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                              "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

const char* axis_name(int a) { return a == 0 ? "x" : a == 1 ? "y" : "z"; }

class Job {
public:
    Job(const Settings& s, std::filesystem::path dir, std::ostream& log) : s_(s), dir_(std::move(dir)), log_(log) {}

    void write(const std::string& name, const std::string& content) {
        write_file_atomic(dir_ / name, content);
        report.outputs.push_back(name);
    }
    void warn(const std::string& msg) {
        log_ << "warning: " << msg << '\n';
        report.warnings.push_back(msg);
    }
    void check(const std::string& name, bool pass, const std::string& detail) {
        log_ << name << ": " << (pass ? "PASS" : "FAIL") << " (" << detail << ")\n";
        report.checks.push_back({name, pass, detail});
    }
    std::ostream& log() { return log_; }

    RunReport report;

private:
    const Settings& s_;
    std::filesystem::path dir_;
    std::ostream& log_;
};

std::string num(double v) { return format_double(v); }

std::pair<int, int> plot_axes(const Settings& s) {
    const auto v = parse_numbers(s.text("plot.axes"), "plot.axes");
    if (v.size() != 2) throw ConfigError("plot.axes: expected two axis indices");
    const int a = static_cast<int>(v[0]), b = static_cast<int>(v[1]);
    if (a < 0 || a > 2 || b < 0 || b > 2 || a != v[0] || b != v[1])
        throw ConfigError("plot.axes: indices must be 0, 1 or 2");
    return {a, b};
}

int threads_of(const Settings& s) {
    const long t = s.integer("threads");
    if (t < 1) throw ConfigError("threads must be >= 1");
    return static_cast<int>(t);
}

long positive(const Settings& s, std::string_view key, bool allow_zero = false) {
    const long v = s.integer(key);
    if (v < 0 || (!allow_zero && v == 0)) throw ConfigError(std::string(key) + " must be positive");
    return v;
}

State3 start_point(const Settings& s, const BoundMap& map) {
    if (s.text("x0") != "random") return s.vec3("x0");
    const auto seed = static_cast<unsigned long long>(s.integer("seed"));
    const auto x0 = find_bounded_start(map, s.vec3("x0.lo"), s.vec3("x0.hi"),
                                       static_cast<int>(positive(s, "x0.trials")), seed);
    if (!x0) throw Error("no bounded orbit found from random starts in the x0 box");
    return *x0;
}

NewtonOptions newton_of(const Settings& s) {
    NewtonOptions o;
    o.tol = s.number("newton.tol");
    o.max_iterations = static_cast<int>(positive(s, "newton.max_iter"));
    return o;
}

Cycle stable_cycle(const Settings& s, const BoundMap& map, const State3& x0) {
    if (s.text("period") == "auto") {
        auto c = attracting_cycle(map, x0, positive(s, "transient", true));
        if (!c) throw Error("no attracting cycle of period <= 64 reached from x0");
        return *c;
    }
    return find_cycle_restarting(map, x0, static_cast<int>(s.integer("period")), newton_of(s));
}

Cycle saddle_cycle(const Settings& s, const BoundMap& map, const Cycle& stable) {
    const long p = s.integer("saddle.period");
    if (p < 0) throw ConfigError("saddle.period must be >= 0");
    SaddleSearchOptions opts;
    opts.newton = newton_of(s);
    const int period = p == 0 ? stable.period : static_cast<int>(p);
    auto c = find_saddle_cycle(map, stable.points, period, opts);
    if (!c) throw Error("no saddle cycle of period " + std::to_string(period) + " found near the stable cycle");
    return *c;
}

ManifoldSettings manifold_settings(const Settings& s) {
    ManifoldSettings m;
    m.delta0 = s.number("manifold.delta0");
    m.h_max = s.number("manifold.h_max");
    m.angle_max = s.number("manifold.angle_max");
    m.length_max = s.number("manifold.length_max");
    m.eps_att = s.number("manifold.eps_att");
    m.max_domains = static_cast<int>(positive(s, "manifold.max_domains"));
    return m;
}

std::vector<ManifoldCurve> grow(const Settings& s, const BoundMap& map, const Cycle& saddle, const Cycle& stable) {
    std::vector<State3> attractors;
    if (s.text("attractors") == "stable") attractors = stable.points;
    return grow_all_branches(map, saddle, manifold_settings(s), attractors, threads_of(s));
}

std::string cycles_csv(std::span<const Cycle> cycles) {
    std::ostringstream os;
    write_cycles_csv(os, cycles);
    return os.str();
}

std::string title_of(const Settings& s, const std::string& fallback) {
    const auto t = s.text("title");
    return t.empty() ? fallback : t;
}

std::string setting_label(const BoundMap& map) { return map.id() + " " + format_params(map.params()); }

// Expected multipliers are real numbers matched against the computed
// triple by the permutation minimising the largest deviation.
double multiplier_deviation(const EigenTriple& got, const std::vector<double>& want) {
    std::array<int, 3> perm{0, 1, 2};
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(got[perm[i]] - Complex(want[i], 0.0)));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::string multipliers_text(const EigenTriple& e) {
    std::ostringstream os;
    for (int i = 0; i < 3; ++i) {
        if (i) os << ' ';
        os << num(e[i].real());
        if (e[i].imag() != 0.0) os << (e[i].imag() > 0 ? "+" : "-") << num(std::abs(e[i].imag())) << 'i';
    }
    return os.str();
}

void cycle_checks(Job& job, const Settings& s, const Cycle& stable, const std::optional<Cycle>& saddle) {
    const auto checks = s.checks();
    auto get = [&](std::string_view key) -> std::optional<std::string> {
        for (const auto& [k, v] : checks)
            if (k == key) return v;
        return std::nullopt;
    };
    const double tol = get("check.tol") ? parse_number(*get("check.tol"), "check.tol") : 2e-3;
    if (auto v = get("check.period")) {
        const long want = parse_integer(*v, "check.period");
        job.check("check.period", stable.period == want,
                  "got " + std::to_string(stable.period) + ", expected " + std::to_string(want));
    }
    if (auto v = get("check.multipliers")) {
        const auto want = parse_numbers(*v, "check.multipliers");
        if (want.size() != 3) throw ConfigError("check.multipliers: expected three numbers");
        const double dev = multiplier_deviation(stable.multipliers, want);
        job.check("check.multipliers", dev <= tol,
                  "got " + multipliers_text(stable.multipliers) + ", max deviation " + num(dev) + ", tol " + num(tol));
    }
    for (const char* key : {"check.saddle.period", "check.saddle.multipliers", "check.saddle.type"})
        if (get(key) && !saddle) throw ConfigError(std::string(key) + " requires a saddle cycle");
    if (saddle) {
        if (auto v = get("check.saddle.period")) {
            const long want = parse_integer(*v, "check.saddle.period");
            job.check("check.saddle.period", saddle->period == want,
                      "got " + std::to_string(saddle->period) + ", expected " + std::to_string(want));
        }
        if (auto v = get("check.saddle.multipliers")) {
            const auto want = parse_numbers(*v, "check.saddle.multipliers");
            if (want.size() != 3) throw ConfigError("check.saddle.multipliers: expected three numbers");
            const double dev = multiplier_deviation(saddle->multipliers, want);
            job.check("check.saddle.multipliers", dev <= tol,
                      "got " + multipliers_text(saddle->multipliers) + ", max deviation " + num(dev) + ", tol " +
                          num(tol));
        }
        if (auto v = get("check.saddle.type")) {
            const std::string got(to_string(classify_cycle(saddle->multipliers).tag));
            job.check("check.saddle.type", got == *v, "got " + got + ", expected " + *v);
        }
        if (auto v = get("check.prediction")) {
            const std::string got(to_string(predict_doubling_type(stable.multipliers, saddle->multipliers).type));
            job.check("check.prediction", got == *v, "got " + got + ", expected " + *v);
        }
    }
    if (auto v = get("check.stable.type")) {
        const std::string got(to_string(classify_cycle(stable.multipliers).tag));
        job.check("check.stable.type", got == *v, "got " + got + ", expected " + *v);
    }
}

void run_orbit(Job& job, const Settings& s) {
    const auto map = s.map();
    const auto sample = iterate_orbit(map, start_point(s, map), positive(s, "transient", true), positive(s, "keep", true));
    if (sample.escaped) job.warn("orbit escaped after " + std::to_string(sample.points.size()) + " kept points");
    std::ostringstream csv;
    csv << "index,x,y,z\n";
    for (std::size_t i = 0; i < sample.points.size(); ++i)
        csv << i << ',' << num(sample.points[i].x()) << ',' << num(sample.points[i].y()) << ','
            << num(sample.points[i].z()) << '\n';
    job.write("orbit.csv", csv.str());
    const auto [a, b] = plot_axes(s);
    SvgPlot plot(title_of(s, "orbit, " + setting_label(map)), axis_name(a), axis_name(b));
    plot.scatter(project(sample.points, a, b));
    job.write("orbit.svg", plot.render());
}

std::vector<double> linear_grid(double from, double to, long count) {
    std::vector<double> g;
    if (count == 1) g.push_back(from);
    for (long i = 0; count > 1 && i < count; ++i)
        g.push_back(i == count - 1 ? to : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1));
    return g;
}

std::size_t nearest_index(const std::vector<double>& grid, double v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - v) < std::abs(grid[best] - v)) best = i;
    return best;
}

void run_lyapunov(Job& job, const Settings& s) {
    const auto map = s.map();
    const State3 x0 = start_point(s, map);
    const long steps = positive(s, "steps"), transient = positive(s, "transient", true);
    const long count = positive(s, "sweep.count", true);
    const auto checks = s.checks();
    if (count == 0) {
        const double lambda = max_lyapunov(map, x0, steps, transient);
        job.log() << "lambda_max: " << num(lambda) << '\n';
        job.write("lyapunov.csv", "lambda\n" + num(lambda) + "\n");
        for (const auto& [k, v] : checks) {
            if (k != "check.lambda") throw ConfigError(k + " needs a sweep (sweep.count > 0)");
            const auto band = parse_numbers(v, k);
            if (band.size() != 2) throw ConfigError(k + ": expected 'lo hi'");
            job.check(k, lambda >= band[0] && lambda <= band[1],
                      "lambda " + num(lambda) + " in [" + num(band[0]) + ", " + num(band[1]) + "]");
        }
        return;
    }
    const auto param = s.text("sweep.param");
    (void)map.param(param);
    const auto grid = linear_grid(s.number("sweep.from"), s.number("sweep.to"), count);
    std::vector<double> lambda(grid.size(), std::numeric_limits<double>::quiet_NaN());
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads_of(s)), grid.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < grid.size(); i += workers) {
                try {
                    lambda[i] = max_lyapunov(map.with(param, grid[i]), x0, steps, transient);
                } catch (const OverflowError&) {
                }
            }
        });
    for (auto& t : pool) t.join();
    std::ostringstream csv;
    csv << param << ",lambda\n";
    std::vector<Point2> curve;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::isnan(lambda[i])) job.warn("orbit escaped at " + param + " = " + num(grid[i]));
        csv << num(grid[i]) << ',' << (std::isnan(lambda[i]) ? std::string("nan") : num(lambda[i])) << '\n';
        if (!std::isnan(lambda[i])) curve.push_back({grid[i], lambda[i]});
    }
    job.write("lyapunov.csv", csv.str());
    SvgPlot plot(title_of(s, "maximal Lyapunov exponent, " + map.id()), param, "lambda_max");
    plot.polyline(curve, "#1f4e9c");
    plot.polyline(std::vector<Point2>{{grid.front(), 0.0}, {grid.back(), 0.0}}, "#999999", 0.5);
    job.write("lyapunov.svg", plot.render());
    for (const auto& [k, v] : checks) {
        if (k == "check.lambda") throw ConfigError("check.lambda: use check.lambda.<name> = at lo hi in a sweep");
        const auto spec = parse_numbers(v, k);
        if (spec.size() != 3) throw ConfigError(k + ": expected 'at lo hi'");
        const auto i = nearest_index(grid, spec[0]);
        job.check(k, lambda[i] >= spec[1] && lambda[i] <= spec[2],
                  "lambda(" + num(grid[i]) + ") = " + num(lambda[i]) + " in [" + num(spec[1]) + ", " + num(spec[2]) + "]");
    }
}

void run_scan(Job& job, const Settings& s) {
    const auto map = s.map();
    const auto param = s.text("scan.param");
    (void)map.param(param);
    const long count = positive(s, "scan.count", true);
    const auto grid = linear_grid(s.number("scan.from"), s.number("scan.to"), count);
    const auto [a, b] = plot_axes(s);
    (void)b;
    const auto checks = s.checks();
    double tol = 1e-6;
    for (const auto& [k, v] : checks)
        if (k == "check.distinct_tol") tol = parse_number(v, k);
    if (grid.empty()) {
        job.warn("empty scan grid; writing a header-only dataset");
        ScanResult empty;
        empty.param_name = param;
        std::ostringstream csv;
        write_scan_csv(csv, empty);
        job.write("scan.csv", csv.str());
        for (const auto& [k, v] : checks)
            if (k != "check.distinct_tol") job.check(k, false, "empty grid");
        return;
    }
    const auto policy = s.text("scan.policy") == "follow" ? SeedPolicy::follow : SeedPolicy::fixed;
    const auto scan = bifurcation_scan(map, param, grid, start_point(s, map), policy, positive(s, "transient", true),
                                       positive(s, "keep", true), threads_of(s));
    for (double e : scan.escaped) job.warn("orbit escaped at " + param + " = " + num(e));
    std::ostringstream csv;
    write_scan_csv(csv, scan);
    job.write("scan.csv", csv.str());
    std::vector<Point2> pts;
    pts.reserve(scan.points.size());
    for (const auto& p : scan.points) pts.push_back({p.param, p.state[a]});
    SvgPlot plot(title_of(s, "bifurcation diagram, " + map.id()), param, axis_name(a));
    plot.scatter(pts, "#1f4e9c", 0.5);
    job.write("scan.svg", plot.render());
    for (const auto& [k, v] : checks) {
        if (k == "check.distinct_tol") continue;
        const auto spec = parse_numbers(v, k);
        if (spec.size() != 2) throw ConfigError(k + ": expected 'at count'");
        const double at = grid[nearest_index(grid, spec[0])];
        std::vector<double> values;
        for (const auto& p : scan.points)
            if (p.param == at) values.push_back(p.state[a]);
        const auto got = count_distinct(values, tol);
        job.check(k, static_cast<double>(got) == spec[1],
                  std::to_string(got) + " distinct " + axis_name(a) + " values at " + param + " = " + num(at) +
                      ", expected " + num(spec[1]));
    }
}

void cycle_plot(Job& job, const Settings& s, const std::string& name, const BoundMap& map, const Cycle& stable,
                const Cycle* saddle, std::span<const ManifoldCurve> curves = {}) {
    const auto [a, b] = plot_axes(s);
    SvgPlot plot(title_of(s, setting_label(map)), axis_name(a), axis_name(b));
    for (const auto& c : curves) plot.polyline(project(c.polyline, a, b), "#c03030", 0.8);
    plot.markers(project(stable.points, a, b), "#1f4e9c", 5.0);
    if (saddle) plot.markers(project(saddle->points, a, b), "#000000", 5.0);
    job.write(name, plot.render());
}

std::string prediction_text(const Cycle& stable, const Cycle& saddle) {
    const auto p = predict_doubling_type(stable.multipliers, saddle.multipliers);
    return "prediction: " + std::string(to_string(p.type)) + "\nnode_lambda3: " + num(p.node_lambda3) +
           "\nsaddle_lambda3: " + num(p.saddle_lambda3) + "\n";
}

void run_find_cycle(Job& job, const Settings& s, bool classify) {
    const auto map = s.map();
    const Cycle stable = stable_cycle(s, map, start_point(s, map));
    std::optional<Cycle> saddle;
    if (classify || s.flag("saddle")) saddle = saddle_cycle(s, map, stable);
    std::vector<Cycle> all{stable};
    if (saddle) all.push_back(*saddle);
    job.write("cycles.csv", cycles_csv(all));
    std::string summary = summarize(stable);
    if (saddle) summary += "\n" + summarize(*saddle);
    if (classify) summary += "\n" + prediction_text(stable, *saddle);
    job.log() << summary;
    job.write(classify ? "classification.txt" : "summary.txt", summary);
    cycle_plot(job, s, "cycles.svg", map, stable, saddle ? &*saddle : nullptr);
    cycle_checks(job, s, stable, saddle);
}

std::optional<EventKind> event_kind(std::string_view name) {
    if (name == "flip") return EventKind::flip;
    if (name == "fold") return EventKind::fold;
    if (name == "neimark-sacker") return EventKind::neimark_sacker;
    if (name == "turn-complex" || name == "eigenvalues-turn-complex") return EventKind::turn_complex;
    return std::nullopt;
}

void run_continue(Job& job, const Settings& s) {
    const auto map = s.map();
    const auto param = s.text("cont.param");
    const double from = map.param(param);
    const double to = s.number("cont.to"), step = s.number("cont.step"), loc_tol = s.number("cont.loc_tol");
    if (!(step > 0.0)) throw ConfigError("cont.step must be positive");
    if (!(loc_tol > 0.0)) throw ConfigError("cont.loc_tol must be positive");
    const auto which = s.text("cycle");

    struct Wanted {
        std::string key, tag;
        EventKind kind;
        double value;
    };
    std::vector<Wanted> wanted;
    double tol = 2e-3;
    for (const auto& [k, v] : s.checks()) {
        if (k == "check.tol") {
            tol = parse_number(v, k);
            continue;
        }
        const auto rest = k.substr(6);
        const auto dot = rest.find('.');
        const auto tag = rest.substr(0, dot), kind = rest.substr(dot + 1);
        const auto ek = event_kind(kind);
        if (!ek) throw ConfigError(k + ": unknown event kind '" + kind + "'");
        if (which != "both" && which != tag) throw ConfigError(k + ": cycle '" + tag + "' is not continued");
        wanted.push_back({k, tag, *ek, parse_number(v, k)});
    }

    ContinuationOptions opts;
    opts.newton = newton_of(s);
    opts.max_halvings = static_cast<int>(positive(s, "cont.max_halvings", true));
    const Cycle stable = stable_cycle(s, map, start_point(s, map));
    std::vector<std::pair<std::string, Cycle>> starts;
    if (which != "saddle") starts.emplace_back("stable", stable);
    if (which != "stable") starts.emplace_back("saddle", saddle_cycle(s, map, stable));

    std::vector<BifurcationEvent> events;
    SvgPlot plot(title_of(s, "multiplier moduli, " + map.id()), param, "|lambda|");
    int colour = 0;
    for (const auto& [tag, start] : starts) {
        const auto branch = continue_cycle(map, start, param, from, to, step, opts);
        job.log() << tag << " branch: " << branch.records.size() << " records, termination "
                  << to_string(branch.termination) << '\n';
        if (branch.termination != Termination::range_end)
            job.warn(tag + " branch stopped at " + param + " = " + num(branch.records.back().param) + " (" +
                     std::string(to_string(branch.termination)) + ")");
        std::ostringstream csv;
        write_branch_csv(csv, branch);
        job.write("branch_" + tag + ".csv", csv.str());
        const auto found = detect_bifurcations(branch, loc_tol, tag);
        for (const auto& e : found)
            job.log() << tag << ' ' << to_string(e.kind) << " at " << param << " = " << num(e.param) << '\n';
        events.insert(events.end(), found.begin(), found.end());
        for (int i = 0; i < 3; ++i) {
            std::vector<Point2> curve;
            for (const auto& r : branch.records) curve.push_back({r.param, std::abs(r.eigen[i])});
            plot.polyline(curve, palette[static_cast<std::size_t>(colour++) % palette.size()]);
        }
    }
    std::ostringstream ev;
    write_events_csv(ev, events);
    job.write("events.csv", ev.str());
    const double lo = std::min(from, to), hi = std::max(from, to);
    plot.polyline(std::vector<Point2>{{lo, 1.0}, {hi, 1.0}}, "#999999", 0.5);
    job.write("branch.svg", plot.render());

    for (const auto& w : wanted) {
        auto it = std::find_if(events.begin(), events.end(),
                               [&](const BifurcationEvent& e) { return e.cycle_tag == w.tag && e.kind == w.kind; });
        if (it == events.end()) {
            job.check(w.key, false, "no " + std::string(to_string(w.kind)) + " event on the " + w.tag + " branch");
            continue;
        }
        job.check(w.key, std::abs(it->param - w.value) <= tol,
                  "found " + num(it->param) + ", expected " + num(w.value) + ", tol " + num(tol));
    }
}

void run_manifold(Job& job, const Settings& s) {
    const auto map = s.map();
    const Cycle stable = stable_cycle(s, map, start_point(s, map));
    const Cycle saddle = saddle_cycle(s, map, stable);
    const auto curves = grow(s, map, saddle, stable);
    std::ostringstream csv;
    write_manifold_csv(csv, curves);
    job.write("manifold.csv", csv.str());
    job.write("cycles.csv", cycles_csv(std::vector<Cycle>{stable, saddle}));
    cycle_plot(job, s, "manifold.svg", map, stable, &saddle, curves);
    for (const auto& c : curves)
        if (c.status != TerminalStatus::converged)
            job.warn("branch " + std::to_string(c.branch.point) + (c.branch.direction > 0 ? "+" : "-") + " " +
                     std::string(to_string(c.status)));

    const auto checks = s.checks();
    const auto report = classify_connection(map, saddle, stable, curves);
    std::string text = "stable_period: " + std::to_string(stable.period) + "\nsaddle_period: " +
                       std::to_string(saddle.period) + "\n" + summarize(report);
    job.log() << "topology: " << report.tag() << '\n';
    job.write("connection.txt", text);
    for (const auto& [k, v] : checks) {
        if (k == "check.topology") job.check(k, report.tag() == v, "got " + report.tag() + ", expected " + v);
        if (k == "check.period") {
            const long want = parse_integer(v, k);
            job.check(k, stable.period == want, "got " + std::to_string(stable.period));
        }
        if (k == "check.saddle.period") {
            const long want = parse_integer(v, k);
            job.check(k, saddle.period == want, "got " + std::to_string(saddle.period));
        }
    }
}

std::string verdict_text(const LoopCensus& c) {
    std::string v(to_string(c.verdict));
    if (c.verdict == LoopVerdict::cyclic_loops || c.verdict == LoopVerdict::periodic_points)
        v += "(" + std::to_string(c.multiplicity) + ")";
    return v;
}

void run_census(Job& job, const Settings& s) {
    const auto map = s.map();
    const long n = positive(s, "census.n");
    const State3 x0 = start_point(s, map);
    const long transient = positive(s, "transient", true);
    OrbitSample sample;
    std::optional<double> lambda;
    if (const long steps = positive(s, "lyapunov.steps", true); steps > 0)
        lambda = max_lyapunov(map, x0, steps, transient);
    if (s.text("census.sample") == "orbit") {
        sample = iterate_orbit(map, x0, transient, positive(s, "keep"));
        if (sample.escaped) throw Error("census orbit escaped");
    } else {
        const Cycle stable = stable_cycle(s, map, x0);
        const Cycle saddle = saddle_cycle(s, map, stable);
        const auto curves = grow(s, map, saddle, stable);
        sample = sample_along_manifolds(map, saddle, curves, static_cast<int>(n), s.number("census.spacing"));
    }
    CensusOptions opts;
    opts.point_tol = s.number("census.point_tol");
    opts.curve_threshold = s.number("census.curve_threshold");
    const auto census = count_cyclic_loops(sample, static_cast<int>(n), lambda, opts);
    const auto toggle = two_loop_toggle(census);
    std::ostringstream text;
    text << summarize(census) << "toggles: " << (toggle.toggles ? "yes" : "no") << '\n'
         << "separation_ratio: " << num(toggle.separation_ratio) << '\n';
    for (int g = 0; g < 2; ++g) {
        text << "group " << g << ':';
        for (int k : toggle.groups[static_cast<std::size_t>(g)]) text << ' ' << k;
        text << '\n';
    }
    job.log() << text.str();
    job.write("census.txt", text.str());

    std::ostringstream csv;
    csv << "index,class,x,y,z\n";
    for (std::size_t i = 0; i < sample.points.size(); ++i)
        csv << i << ',' << i % static_cast<std::size_t>(n) << ',' << num(sample.points[i].x()) << ','
            << num(sample.points[i].y()) << ',' << num(sample.points[i].z()) << '\n';
    job.write("census.csv", csv.str());
    const auto [a, b] = plot_axes(s);
    SvgPlot plot(title_of(s, "loop census, " + setting_label(map)), axis_name(a), axis_name(b));
    for (long k = 0; k < n; ++k) {
        std::vector<State3> cls;
        for (std::size_t i = static_cast<std::size_t>(k); i < sample.points.size(); i += static_cast<std::size_t>(n))
            cls.push_back(sample.points[i]);
        plot.scatter(project(cls, a, b), palette[static_cast<std::size_t>(k) % palette.size()], 0.6);
    }
    job.write("census.svg", plot.render());

    for (const auto& [k, v] : s.checks()) {
        if (k == "check.verdict")
            job.check(k, verdict_text(census) == v, "got " + verdict_text(census) + ", expected " + v);
        if (k == "check.toggle") {
            if (v != "yes" && v != "no") throw ConfigError("check.toggle: expected yes or no");
            job.check(k, toggle.toggles == (v == "yes"),
                      std::string("toggles ") + (toggle.toggles ? "yes" : "no") + ", separation ratio " +
                          num(toggle.separation_ratio));
        }
    }
}

}  // namespace

bool RunReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

RunReport run(const Settings& settings, const std::filesystem::path& out_dir, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(out_dir);
    Job job(settings, out_dir, log);
    const auto& cmd = settings.command();
    if (cmd == "orbit") run_orbit(job, settings);
    else if (cmd == "lyapunov") run_lyapunov(job, settings);
    else if (cmd == "scan") run_scan(job, settings);
    else if (cmd == "find-cycle") run_find_cycle(job, settings, false);
    else if (cmd == "classify") run_find_cycle(job, settings, true);
    else if (cmd == "continue") run_continue(job, settings);
    else if (cmd == "manifold") run_manifold(job, settings);
    else if (cmd == "census") run_census(job, settings);
    else throw ConfigError("unknown command '" + cmd + "'");
    job.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file_atomic(out_dir / "manifest.txt", manifest_text(settings, job.report));
    return job.report;
}

std::string manifest_text(const Settings& settings, const RunReport& report) {
    std::ostringstream os;
    os << "# modelock run manifest\n"
       << "# version: " << MODELOCK_VERSION << '\n'
       << "# compiler: " << __VERSION__ << '\n'
       << "# timing.total_s: " << format_double(report.seconds) << '\n';
    for (const auto& f : report.outputs) os << "# output: " << f << '\n';
    for (const auto& w : report.warnings) os << "# warning: " << w << '\n';
    for (const auto& c : report.checks)
        os << "# check: " << c.name << ' ' << (c.pass ? "PASS" : "FAIL") << " (" << c.detail << ")\n";
    os << settings.resolved_text();
    return os.str();
}

}  // namespace modelock::cli
