#include "cli.hpp"

namespace modelock::cli {

const std::vector<Preset>& presets() {
    static const std::vector<Preset> catalog{
        {"table1", "Mira B=-0.58: stable and saddle period-5 multipliers, doubling-type prediction",
         {{"", R"(command = classify
map = mira
param.B = -0.58
x0 = 0.544 -0.525 0.091
check.period = 5
check.saddle.period = 5
check.multipliers = 0.3550 -0.7131 0.2593
check.saddle.multipliers = 1.3963 -0.7878 0.0597
check.tol = 2e-3
check.prediction = disjoint-loops
)"}}},
        {"table2", "generalised Henon a=1.2: stable and saddle period-4 multipliers, doubling-type prediction",
         {{"", R"(command = classify
map = henon
param.a = 1.2
x0 = 0.049 1.146 1.083
check.period = 4
check.saddle.period = 4
check.multipliers = 0.1795 -0.9813 -0.0006
check.saddle.multipliers = 1.6217 -0.6890 -0.0001
check.tol = 2e-3
check.prediction = mobius-length-doubled
)"}}},
        {"fig4a", "Mira bifurcation diagram in B: period 5 at B=-0.58, period 10 at B=-0.54",
         {{"", R"(command = scan
map = mira
x0 = 0.544 -0.525 0.091
scan.param = B
scan.from = -0.6
scan.to = -0.4
scan.count = 201
scan.policy = follow
transient = 20000
keep = 200
check.distinct.period5 = -0.58 5
check.distinct.period10 = -0.54 10
)"}}},
        {"fig5", "Mira multipliers of the stable and saddle period-5 cycles along B; flip points",
         {{"", R"(command = continue
map = mira
param.B = -0.58
x0 = 0.544 -0.525 0.091
cycle = both
cont.param = B
cont.to = -0.54
cont.step = 0.001
check.stable.flip = -0.55
check.saddle.flip = -0.5627
)"}}},
        {"fig6a", "Mira B=-0.58: unstable manifolds of the period-5 saddle close a single loop",
         {{"", R"(command = manifold
map = mira
param.B = -0.58
x0 = 0.544 -0.525 0.091
check.topology = single-loop
)"}}},
        {"fig6b", "Mira B=-0.555: saddle already doubled (period 10), stable cycle still period 5",
         {{"", R"(command = find-cycle
map = mira
param.B = -0.555
x0 = 0.303 -0.618 0.605
saddle = yes
saddle.period = 10
check.period = 5
check.saddle.period = 10
)"}}},
        {"fig6c", "Mira B=-0.54: period-10 manifolds form two disjoint loops",
         {{"", R"(command = manifold
map = mira
param.B = -0.54
x0 = -0.579 0.101 0.351
check.topology = disjoint-loops(2)
)"}}},
        {"fig8a", "generalised Henon bifurcation diagram in a",
         {{"", R"(command = scan
map = henon
x0 = 0.1 0.1 0.1
scan.param = a
scan.from = 0.7
scan.to = 1.5
scan.count = 401
scan.policy = follow
transient = 20000
keep = 300
check.distinct.fixed_point = 0.75 1
)"}}},
        {"fig8b", "generalised Henon maximal Lyapunov exponent in a: zero band and locked window",
         {{"", R"(command = lyapunov
map = henon
x0 = 0.1 0.1 0.1
sweep.param = a
sweep.from = 0.7
sweep.to = 1.5
sweep.count = 81
steps = 1000000
check.lambda.quasiperiodic = 1.0 -5e-3 5e-3
check.lambda.locked = 1.2 -inf -1e-3
)"}}},
        {"fig9", "generalised Henon a=1.2: period-4 saddle-node connection, single loop",
         {{"", R"(command = manifold
map = henon
param.a = 1.2
x0 = 0.049 1.146 1.083
plot.axes = 0 1
check.topology = single-loop
)"}}},
        {"fig10", "generalised Henon: stable and saddle period-4 cycles continued in a; node flip",
         {{"", R"(command = continue
map = henon
param.a = 1.2
x0 = 0.049 1.146 1.083
cycle = both
cont.param = a
cont.to = 1.3
cont.step = 0.001
check.stable.flip = 1.204
)"}}},
        {"fig12a", "generalised Henon a=1.25: stable period 8 coexisting with the period-4 saddle",
         {{"", R"(command = find-cycle
map = henon
param.a = 1.25
x0 = -0.416 -0.049 1.246
saddle = yes
saddle.period = 4
check.period = 8
check.saddle.period = 4
)"}}},
        {"fig12b", "generalised Henon a=1.3: period-8 manifolds wind twice (length-doubled loop)",
         {{"", R"(command = manifold
map = henon
param.a = 1.3
x0 = -0.498 -0.129 1.296
check.topology = length-doubled
)"}}},
        {"fig15a", "Lotka-Volterra beta=-0.59: period-6 saddle-node connection",
         {{"", R"(command = manifold
map = lv
param.beta = -0.59
x0 = 0.512 0.95 0.144
check.topology = single-loop
)"}}},
        {"fig15b", "Lotka-Volterra beta=-0.91: manifolds spiral into the period-6 foci",
         {{"", R"(command = manifold
map = lv
param.beta = -0.91
x0 = 1.259 0.524 0.218
check.topology = saddle-focus-spiral
)"}}},
        {"fig15c", "Lotka-Volterra beta=-1: six cyclic closed invariant curves",
         {{"", R"(command = census
map = lv
param.beta = -1
x0 = 0.028 0.754 0.538
census.n = 6
check.verdict = cyclic-loops(6)
)"}}},
        {"fig16", "Lotka-Volterra: period-6 multipliers turn complex, then Neimark-Sacker",
         {{"", R"(command = continue
map = lv
param.beta = -0.59
x0 = 0.512 0.95 0.144
period = 6
cont.param = beta
cont.to = -1
cont.step = 0.005
check.stable.turn-complex = -0.646
check.stable.neimark-sacker = -0.968
)"}}},
        {"fig17", "border-collision normal form delta_R=1.5: seven cyclic closed invariant curves",
         {{"", R"(command = census
map = bcnf
param.delta_R = 1.5
x0 = -0.082 0.02 0.046
census.n = 7
keep = 70000
check.verdict = cyclic-loops(7)
)"}}},
        {"fig18", "border-collision normal form: period-7 Neimark-Sacker in delta_R",
         {{"", R"(command = continue
map = bcnf
param.delta_R = 1.4
x0 = -0.048 -0.04 0.063
cont.param = delta_R
cont.to = 1.5
cont.step = 0.002
check.stable.neimark-sacker = 1.455
)"}}},
        {"fig20", "coupled map: bifurcation diagram in a and fold birth of the period-10 cycle",
         {{"scan", R"(command = scan
map = coupled
x0 = 0.947 0.842 0.744
scan.param = a
scan.from = 27.0
scan.to = 27.6
scan.count = 301
scan.policy = follow
transient = 20000
keep = 300
)"},
          {"fold", R"(command = continue
map = coupled
param.a = 27.2
x0 = 0.947 0.842 0.744
cont.param = a
cont.to = 27.0
cont.step = 0.005
check.stable.fold = 27.1107
check.tol = 5e-3
)"}}},
        {"fig21", "coupled map a=27.521: ten cyclic loops from the manifolds, iterates toggle between two big loops",
         {{"", R"(command = census
map = coupled
param.a = 27.521
x0 = 0.205 0.535 0.904
census.n = 10
census.sample = manifold
census.spacing = 2e-5
attractors = none
manifold.h_max = 1e-4
check.verdict = cyclic-loops(10)
check.toggle = yes
)"}}},
        {"fig22", "coupled map: fold of the period-20 cycles near a=27.46",
         {{"", R"(command = continue
map = coupled
param.a = 27.521
x0 = 0.205 0.535 0.904
cont.param = a
cont.to = 27.4
cont.step = 0.005
check.stable.fold = 27.46
check.tol = 5e-3
)"}}},
    };
    return catalog;
}

const Preset* find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

}  // namespace modelock::cli
