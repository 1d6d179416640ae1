#include "modelock/manifold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "modelock/error.hpp"

namespace modelock {

std::string_view to_string(TerminalStatus s) {
    switch (s) {
        case TerminalStatus::converged: return "converged";
        case TerminalStatus::budget_exhausted: return "budget-exhausted";
        case TerminalStatus::escaped: return "escaped";
    }
    return "unknown";
}

std::string_view to_string(Topology t) {
    switch (t) {
        case Topology::single_loop: return "single-loop";
        case Topology::disjoint_loops: return "disjoint-loops";
        case Topology::length_doubled: return "length-doubled";
        case Topology::saddle_focus_spiral: return "saddle-focus-spiral";
        case Topology::indeterminate: return "indeterminate";
    }
    return "unknown";
}

std::string_view to_string(DoublingType t) {
    switch (t) {
        case DoublingType::disjoint_loops: return "disjoint-loops";
        case DoublingType::mobius_length_doubled: return "mobius-length-doubled";
        case DoublingType::indeterminate: return "indeterminate";
    }
    return "unknown";
}

std::string ConnectionReport::tag() const {
    std::string s(to_string(topology));
    if (topology == Topology::disjoint_loops) s += "(" + std::to_string(loops) + ")";
    return s;
}

namespace {

struct DomainPoint {
    double s;
    State3 q;
};

double turning_angle(const State3& a, const State3& b, const State3& c) {
    const State3 u = b - a, w = c - b;
    const double nu = u.norm(), nw = w.norm();
    if (nu == 0.0 || nw == 0.0) return 0.0;
    return std::acos(std::clamp(u.dot(w) / (nu * nw), -1.0, 1.0));
}

class BranchGrower {
public:
    BranchGrower(const BoundMap& map, const State3& q0, const State3& q1, int iterate)
        : map_(map), q0_(q0), q1_(q1), iterate_(iterate) {}

    State3 apply_g(State3 x) const {
        for (int j = 0; j < iterate_; ++j) x = map_(x);
        return x;
    }

    // G^k(L(s)) on the first fundamental domain [q0, G(q0)].
    State3 image(double s, int k) const {
        State3 x = q0_ + s * (q1_ - q0_);
        for (int j = 0; j < k; ++j) x = apply_g(x);
        return x;
    }

    void refine(std::vector<DomainPoint>& d, int k, const ManifoldSettings& st) const {
        constexpr double min_gap = 1e-15;
        constexpr double min_seg = 1e-10;
        for (int pass = 0; pass < 60 && d.size() < st.max_domain_points; ++pass) {
            std::vector<char> split(d.size(), 0);  // split[j]: segment (j, j+1)
            bool any = false;
            for (std::size_t j = 0; j + 1 < d.size(); ++j) {
                if ((d[j + 1].q - d[j].q).norm() > st.h_max && d[j + 1].s - d[j].s > min_gap) {
                    split[j] = 1;
                    any = true;
                }
            }
            for (std::size_t j = 1; j + 1 < d.size(); ++j) {
                if (turning_angle(d[j - 1].q, d[j].q, d[j + 1].q) <= st.angle_max) continue;
                if ((d[j].q - d[j - 1].q).norm() > min_seg && d[j].s - d[j - 1].s > min_gap) {
                    split[j - 1] = 1;
                    any = true;
                }
                if ((d[j + 1].q - d[j].q).norm() > min_seg && d[j + 1].s - d[j].s > min_gap) {
                    split[j] = 1;
                    any = true;
                }
            }
            if (!any) return;
            std::vector<DomainPoint> out;
            out.reserve(d.size() * 2);
            for (std::size_t j = 0; j < d.size(); ++j) {
                out.push_back(d[j]);
                if (j + 1 < d.size() && split[j]) {
                    const double s = 0.5 * (d[j].s + d[j + 1].s);
                    out.push_back({s, image(s, k)});
                }
            }
            d = std::move(out);
        }
    }

private:
    const BoundMap& map_;
    State3 q0_, q1_;
    int iterate_;
};

void decimate(std::vector<DomainPoint>& d, const ManifoldSettings& st) {
    if (d.size() < 3) return;
    std::vector<DomainPoint> out;
    out.reserve(d.size());
    out.push_back(d.front());
    for (std::size_t j = 1; j + 1 < d.size(); ++j) {
        const State3& prev = out.back().q;
        const bool close = (d[j + 1].q - prev).norm() < 0.25 * st.h_max;
        const bool straight = turning_angle(prev, d[j].q, d[j + 1].q) < 0.25 * st.angle_max;
        if (close && straight) continue;
        out.push_back(d[j]);
    }
    out.push_back(d.back());
    d = std::move(out);
}

double polyline_length(std::span<const State3> pts) {
    double len = 0.0;
    for (std::size_t j = 1; j < pts.size(); ++j) len += (pts[j] - pts[j - 1]).norm();
    return len;
}

}  // namespace

ManifoldCurve grow_unstable_manifold(const BoundMap& map, const Cycle& saddle, BranchId branch,
                                     const ManifoldSettings& st,
                                     std::span<const State3> attractors) {
    const int n = saddle.period;
    if (branch.point < 0 || branch.point >= n)
        throw PreconditionError("grow_unstable_manifold: branch point out of range");
    if (branch.direction != 1 && branch.direction != -1)
        throw PreconditionError("grow_unstable_manifold: direction must be +1 or -1");

    const State3& p = saddle.points[static_cast<std::size_t>(branch.point)];
    const Matrix3 m = cycle_matrix(map, saddle.points, static_cast<std::size_t>(branch.point));
    const EigenTriple e = eigenvalues3(m);
    int unstable = 0;
    for (const auto& v : e.values)
        if (std::abs(v) > 1.0) ++unstable;
    if (unstable != 1 || e[0].imag() != 0.0)
        throw UnsupportedBranchError("saddle must have exactly one real unstable multiplier");

    State3 v = real_eigenvector(m, e[0].real());
    Eigen::Index big;
    v.cwiseAbs().maxCoeff(&big);
    if (v[big] < 0.0) v = -v;
    v *= static_cast<double>(branch.direction);

    ManifoldCurve curve;
    curve.branch = branch;
    curve.saddle_period = n;
    curve.iterate = n;

    const State3 q0 = p + st.delta0 * v;
    State3 q1 = q0;
    for (int j = 0; j < n; ++j) q1 = map(q1);
    if ((q1 - p).dot(v) < 0.0) {
        // Image on the opposite side (negative multiplier): grow with F^{2n}.
        curve.iterate = 2 * n;
        curve.doubled_iterate = true;
        for (int j = 0; j < n; ++j) q1 = map(q1);
    }
    const BranchGrower grower(map, q0, q1, curve.iterate);

    std::vector<DomainPoint> domain;
    constexpr int initial_points = 16;
    for (int j = 0; j <= initial_points; ++j) {
        const double s = static_cast<double>(j) / initial_points;
        domain.push_back({s, grower.image(s, 0)});
    }

    // Attractor points touched by the domain, or empty if some point is
    // farther than eps_att from all of them.
    auto attractors_of = [&](const std::vector<DomainPoint>& d) {
        std::vector<int> touched;
        for (const auto& dp : d) {
            int hit = -1;
            for (std::size_t a = 0; a < attractors.size() && hit < 0; ++a)
                if ((dp.q - attractors[a]).norm() <= st.eps_att) hit = static_cast<int>(a);
            if (hit < 0) return std::vector<int>{};
            if (std::find(touched.begin(), touched.end(), hit) == touched.end()) touched.push_back(hit);
        }
        std::sort(touched.begin(), touched.end());
        return touched;
    };

    for (int k = 0;; ++k) {
        if (k > 0) {
            for (auto& dp : domain) dp.q = grower.apply_g(dp.q);
            decimate(domain, st);
        }
        grower.refine(domain, k, st);

        bool escaped = false;
        for (const auto& dp : domain)
            if (!is_finite(dp.q) || dp.q.cwiseAbs().maxCoeff() > escape_radius) escaped = true;

        std::size_t first = curve.polyline.empty() ? 0 : 1;
        for (std::size_t j = first; j < domain.size(); ++j) {
            if (!is_finite(domain[j].q)) break;
            if (!curve.polyline.empty())
                curve.arclength += (domain[j].q - curve.polyline.back()).norm();
            curve.polyline.push_back(domain[j].q);
        }
        if (escaped) {
            curve.status = TerminalStatus::escaped;
            break;
        }
        std::vector<State3> qs;
        for (const auto& dp : domain) qs.push_back(dp.q);
        const double domain_length = polyline_length(qs);
        if (!attractors.empty()) {
            auto touched = attractors_of(domain);
            if (!touched.empty()) {
                curve.status = TerminalStatus::converged;
                curve.attractor_index = static_cast<int>(nearest_point(attractors, curve.polyline.back()));
                curve.attractor_set = std::move(touched);
                break;
            }
            // Collapsed onto an attractor that is not in the list.
            if (domain_length < 1e-3 * st.eps_att) {
                curve.status = TerminalStatus::converged;
                break;
            }
        } else if (domain_length < st.eps_att) {
            curve.status = TerminalStatus::converged;
            break;
        }
        if (curve.arclength > st.length_max || k + 1 >= st.max_domains) {
            curve.status = TerminalStatus::budget_exhausted;
            break;
        }
    }
    return curve;
}

std::vector<ManifoldCurve> grow_all_branches(const BoundMap& map, const Cycle& saddle,
                                             const ManifoldSettings& settings,
                                             std::span<const State3> attractors, int threads) {
    const std::size_t count = 2 * static_cast<std::size_t>(saddle.period);
    std::vector<ManifoldCurve> curves(count);
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t b = w; b < count; b += workers) {
                try {
                    curves[b] = grow_unstable_manifold(
                        map, saddle, BranchId{static_cast<int>(b / 2), b % 2 == 0 ? 1 : -1}, settings,
                        attractors);
                } catch (...) {
                    errors[b] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return curves;
}

double distance_to_polyline(const State3& q, std::span<const State3> polyline) {
    double best = std::numeric_limits<double>::infinity();
    if (polyline.size() == 1) return (q - polyline[0]).norm();
    for (std::size_t j = 0; j + 1 < polyline.size(); ++j) {
        const State3 a = polyline[j], d = polyline[j + 1] - a;
        const double len2 = d.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (q - (a + t * d)).norm());
    }
    return best;
}

namespace {

struct Point2D {
    double x, y;
};

// Orthonormal basis of the best-fit plane of `pts` about `centre`.
std::pair<State3, State3> plane_basis(std::span<const State3> pts, const State3& centre) {
    Matrix3 cov = Matrix3::Zero();
    for (const auto& p : pts) cov += (p - centre) * (p - centre).transpose();
    Eigen::SelfAdjointEigenSolver<Matrix3> es(cov);
    return {es.eigenvectors().col(2), es.eigenvectors().col(1)};
}

double wrap_angle(double a) {
    while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

// Total unwrapped angle of the points around `centre` in the plane (u, w).
double swept_angle(std::span<const State3> pts, const State3& centre, const State3& u, const State3& w,
                   double* monotone_fraction = nullptr) {
    double total = 0.0;
    double prev = 0.0;
    bool have = false;
    std::size_t pos = 0, neg = 0;
    for (const auto& p : pts) {
        const State3 d = p - centre;
        const double x = d.dot(u), y = d.dot(w);
        if (x == 0.0 && y == 0.0) continue;
        const double a = std::atan2(y, x);
        if (have) {
            const double inc = wrap_angle(a - prev);
            total += inc;
            if (inc > 1e-12) ++pos;
            else if (inc < -1e-12) ++neg;
        }
        prev = a;
        have = true;
    }
    if (monotone_fraction) {
        const std::size_t moving = pos + neg;
        *monotone_fraction = moving == 0 ? 0.0 : static_cast<double>(std::max(pos, neg)) / static_cast<double>(moving);
    }
    return total;
}

}  // namespace

double spiral_turns(std::span<const State3> polyline, const State3& centre) {
    if (polyline.size() < 10) return 0.0;
    const double r_tail = 0.1 * (polyline.front() - centre).norm();
    std::size_t start = polyline.size();
    while (start > 0 && (polyline[start - 1] - centre).norm() <= r_tail) --start;
    const auto tail = polyline.subspan(start);
    if (tail.size() < 10) return 0.0;
    const auto [u, w] = plane_basis(tail, centre);
    double monotone = 0.0;
    const double total = swept_angle(tail, centre, u, w, &monotone);
    if (monotone < 0.9) return 0.0;
    return std::abs(total) / (2.0 * std::numbers::pi);
}

ConnectionReport classify_connection(const BoundMap& map, const Cycle& saddle, const Cycle& stable,
                                     std::span<const ManifoldCurve> curves) {
    (void)map;
    const int ns = saddle.period, nn = stable.period;
    ConnectionReport rep;
    rep.saddle_count = ns;
    rep.node_count = nn;

    constexpr double match_tol = 1e-4;
    std::vector<std::string> offending;
    std::vector<std::vector<State3>> polylines;
    for (const auto& c : curves) {
        std::vector<int> nodes;
        if (c.status == TerminalStatus::converged && !c.polyline.empty()) {
            for (int j : c.attractor_set)
                if (j >= 0 && j < nn) nodes.push_back(j);
            if (nodes.empty()) {
                const auto j = nearest_point(stable.points, c.polyline.back());
                if ((stable.points[j] - c.polyline.back()).norm() <= match_tol) nodes.push_back(static_cast<int>(j));
            }
        }
        if (nodes.empty()) {
            std::ostringstream id;
            id << c.branch.point << (c.branch.direction > 0 ? "+" : "-") << " (" << to_string(c.status) << ")";
            offending.push_back(id.str());
            continue;
        }
        for (int node : nodes) {
            ConnectionEdge edge;
            edge.saddle = c.branch.point;
            edge.direction = c.branch.direction;
            edge.node = node;
            edge.arclength = c.arclength;
            edge.spiral_turns = spiral_turns(c.polyline, stable.points[static_cast<std::size_t>(node)]);
            rep.edges.push_back(edge);
        }
        polylines.push_back(c.polyline);
    }
    if (!offending.empty()) {
        std::string msg = "classify_connection: unconverged branches:";
        for (const auto& o : offending) msg += " " + o;
        throw PreconditionError(msg);
    }
    if (rep.edges.empty()) throw PreconditionError("classify_connection: no manifold branches");

    // Graph on saddles [0, ns) and nodes [ns, ns + nn).
    std::vector<int> parent(static_cast<std::size_t>(ns + nn));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<int> degree(static_cast<std::size_t>(ns + nn), 0);
    for (const auto& e : rep.edges) {
        parent[find(e.saddle)] = find(ns + e.node);
        ++degree[e.saddle];
        ++degree[ns + e.node];
    }
    rep.node_degree.assign(degree.begin() + ns, degree.end());

    std::vector<int> roots;
    for (int v = 0; v < ns + nn; ++v)
        if (degree[v] > 0 && std::find(roots.begin(), roots.end(), find(v)) == roots.end())
            roots.push_back(find(v));
    for (int r : roots) {
        std::vector<int> nodes;
        for (int j = 0; j < nn; ++j)
            if (degree[ns + j] > 0 && find(ns + j) == r) nodes.push_back(j);
        rep.components.push_back(nodes);
    }
    rep.loops = static_cast<int>(roots.size());

    const bool simple = std::all_of(degree.begin(), degree.end(), [](int d) { return d == 2; });
    const bool covered = std::all_of(degree.begin(), degree.end(), [](int d) { return d > 0; });

    State3 centre = State3::Zero();
    for (const auto& p : stable.points) centre += p;
    centre /= static_cast<double>(nn);
    double radius = 0.0;
    for (const auto& p : stable.points) radius += (p - centre).norm();
    radius /= static_cast<double>(nn);
    const auto [u, w] = plane_basis(nn >= 3 ? std::span<const State3>(stable.points) : std::span<const State3>(polylines.front()), centre);
    rep.winding = strand_count(polylines, centre, u, w, 0.05 * radius);

    rep.all_spiral = stable.multipliers.has_complex_pair() &&
                     std::all_of(rep.edges.begin(), rep.edges.end(),
                                 [](const ConnectionEdge& e) { return e.spiral_turns >= 1.5; });

    if (rep.all_spiral) rep.topology = Topology::saddle_focus_spiral;
    else if (!covered || ns != nn) rep.topology = Topology::indeterminate;
    else if (rep.loops >= 2) rep.topology = Topology::disjoint_loops;
    else if (rep.winding == 1 && simple) rep.topology = Topology::single_loop;
    else if (rep.winding == 2) rep.topology = Topology::length_doubled;
    else rep.topology = Topology::indeterminate;
    return rep;
}

int strand_count(std::span<const std::vector<State3>> polylines, const State3& centre, const State3& u,
                 const State3& w, double merge_tol) {
    constexpr int rays = 36;
    std::vector<std::vector<Point2D>> flat;
    for (const auto& poly : polylines) {
        std::vector<Point2D> f;
        f.reserve(poly.size());
        for (const auto& p : poly) f.push_back({(p - centre).dot(u), (p - centre).dot(w)});
        flat.push_back(std::move(f));
    }
    std::vector<int> counts;
    for (int r = 0; r < rays; ++r) {
        const double theta = 2.0 * std::numbers::pi * (r + 0.37) / rays;
        const double dx = std::cos(theta), dy = std::sin(theta);
        std::vector<double> hits;
        for (const auto& f : flat) {
            for (std::size_t j = 0; j + 1 < f.size(); ++j) {
                const auto& a = f[j];
                const auto& b = f[j + 1];
                // Side of the ray's line for each endpoint.
                const double sa = dx * a.y - dy * a.x, sb = dx * b.y - dy * b.x;
                if ((sa > 0.0) == (sb > 0.0)) continue;
                const double t = sa / (sa - sb);
                const double hx = a.x + t * (b.x - a.x), hy = a.y + t * (b.y - a.y);
                const double along = hx * dx + hy * dy;
                if (along > 0.0) hits.push_back(along);
            }
        }
        std::sort(hits.begin(), hits.end());
        int strands = 0;
        for (std::size_t k = 0; k < hits.size(); ++k)
            if (k == 0 || hits[k] - hits[k - 1] > merge_tol) ++strands;
        counts.push_back(strands);
    }
    std::nth_element(counts.begin(), counts.begin() + rays / 2, counts.end());
    return counts[rays / 2];
}

DoublingPrediction predict_doubling_type(const EigenTriple& node, const EigenTriple& saddle) {
    DoublingPrediction pred;
    const auto rn = role_order(node), rs = role_order(saddle);
    if (!rn || !rs) return pred;
    pred.node_lambda3 = rn->lambda3;
    pred.saddle_lambda3 = rs->lambda3;
    if (rn->lambda3 > 0.0 && rs->lambda3 > 0.0) pred.type = DoublingType::disjoint_loops;
    else if (rn->lambda3 < 0.0 && rs->lambda3 < 0.0) pred.type = DoublingType::mobius_length_doubled;
    return pred;
}

bool prediction_matches(const DoublingPrediction& p, const ConnectionReport& r) {
    switch (p.type) {
        case DoublingType::disjoint_loops:
            return r.topology == Topology::disjoint_loops && r.loops == 2;
        case DoublingType::mobius_length_doubled:
            return r.topology == Topology::length_doubled;
        case DoublingType::indeterminate:
            return false;
    }
    return false;
}

OrbitSample sample_along_manifolds(const BoundMap& map, const Cycle& saddle,
                                   std::span<const ManifoldCurve> curves, int multiplicity,
                                   double spacing) {
    if (multiplicity < 1 || saddle.period % multiplicity != 0)
        throw PreconditionError("sample_along_manifolds: multiplicity must divide the saddle period");
    if (!(spacing > 0.0)) throw PreconditionError("sample_along_manifolds: spacing must be positive");
    const auto m = static_cast<std::size_t>(multiplicity);
    // Branches run together near the nodes and fold back on themselves;
    // points within half a spacing of a point already in the class are dropped.
    std::vector<std::vector<State3>> classes(m);
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> grids(m);
    const double merge2 = 0.25 * spacing * spacing;
    auto cell_of = [spacing](const State3& q) {
        std::array<std::int64_t, 3> c;
        for (int i = 0; i < 3; ++i) c[i] = static_cast<std::int64_t>(std::floor(q[i] / spacing));
        return c;
    };
    auto key_of = [](const std::array<std::int64_t, 3>& c) {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto v : c) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
        return h;
    };
    for (const auto& c : curves) {
        const auto k = static_cast<std::size_t>(c.branch.point % multiplicity);
        auto& cls = classes[k];
        auto& grid = grids[k];
        for (const auto& q : resample_polyline(c.polyline, spacing)) {
            const auto cq = cell_of(q);
            bool near = false;
            for (int dx = -1; dx <= 1 && !near; ++dx)
                for (int dy = -1; dy <= 1 && !near; ++dy)
                    for (int dz = -1; dz <= 1 && !near; ++dz) {
                        auto it = grid.find(key_of({cq[0] + dx, cq[1] + dy, cq[2] + dz}));
                        if (it == grid.end()) continue;
                        for (auto j : it->second)
                            if ((cls[j] - q).squaredNorm() < merge2) {
                                near = true;
                                break;
                            }
                    }
            if (near) continue;
            grid[key_of(cq)].push_back(cls.size());
            cls.push_back(q);
        }
    }
    std::size_t longest = 0;
    for (const auto& cls : classes) {
        if (cls.empty()) throw PreconditionError("sample_along_manifolds: a curve has no branches");
        longest = std::max(longest, cls.size());
    }
    OrbitSample out;
    out.map_id = map.id();
    out.params = map.params();
    out.initial = saddle.points.front();
    out.points.reserve(longest * m);
    for (std::size_t j = 0; j < longest; ++j)
        for (const auto& cls : classes) out.points.push_back(cls[j % cls.size()]);
    return out;
}

std::vector<State3> resample_polyline(std::span<const State3> polyline, double spacing) {
    std::vector<State3> out;
    if (polyline.empty()) return out;
    out.push_back(polyline.front());
    double carry = 0.0;  // arclength since the last emitted point
    for (std::size_t j = 1; j < polyline.size(); ++j) {
        const State3 a = polyline[j - 1], d = polyline[j] - a;
        const double len = d.norm();
        double t = spacing - carry;
        while (t <= len) {
            out.push_back(a + (t / len) * d);
            t += spacing;
        }
        carry = len - (t - spacing);
    }
    return out;
}

}  // namespace modelock
