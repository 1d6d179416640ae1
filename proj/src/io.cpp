#include "modelock/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "modelock/error.hpp"

namespace modelock {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_params(const ParamSet& params) {
    std::string out;
    for (const auto& [name, value] : params.entries()) {
        if (!out.empty()) out += ';';
        out += name + "=" + format_double(value);
    }
    return out;
}

namespace {

void put_eigen(std::ostream& os, const EigenTriple& e) {
    for (const auto& v : e.values) os << ',' << format_double(v.real()) << ',' << format_double(v.imag());
}

}  // namespace

void write_cycles_csv(std::ostream& os, std::span<const Cycle> cycles) {
    os << "map,params,period,symbols,residual,re1,im1,re2,im2,re3,im3,points\n";
    for (const auto& c : cycles) {
        os << c.map_id << ',' << format_params(c.params) << ',' << c.period << ',' << c.symbols << ','
           << format_double(c.residual);
        put_eigen(os, c.multipliers);
        os << ',';
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            if (i) os << '|';
            os << format_double(c.points[i].x()) << ' ' << format_double(c.points[i].y()) << ' '
               << format_double(c.points[i].z());
        }
        os << '\n';
    }
}

void write_branch_csv(std::ostream& os, const ContinuationBranch& branch) {
    std::size_t width = 0;
    for (const auto& r : branch.records) width = std::max(width, r.cycle.points.size());
    os << branch.param << ",period,residual,re1,im1,re2,im2,re3,im3";
    for (std::size_t i = 0; i < width; ++i) os << ",x" << i << ",y" << i << ",z" << i;
    os << '\n';
    for (const auto& r : branch.records) {
        os << format_double(r.param) << ',' << r.cycle.period << ',' << format_double(r.cycle.residual);
        put_eigen(os, r.eigen);
        for (const auto& p : r.cycle.points)
            os << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z());
        for (std::size_t i = r.cycle.points.size(); i < width; ++i) os << ",,,";
        os << '\n';
    }
}

void write_events_csv(std::ostream& os, std::span<const BifurcationEvent> events) {
    os << "kind,param,lo,hi,cycle_tag,period,critical_re,critical_im,nondegenerate,degraded\n";
    for (const auto& e : events) {
        os << to_string(e.kind) << ',' << format_double(e.param) << ',' << format_double(e.lo) << ','
           << format_double(e.hi) << ',' << e.cycle_tag << ',' << e.period << ','
           << format_double(e.critical.real()) << ',' << format_double(e.critical.imag()) << ','
           << (e.nondegenerate ? 1 : 0) << ',' << (e.degraded ? 1 : 0) << '\n';
    }
}

void write_manifold_csv(std::ostream& os, std::span<const ManifoldCurve> curves) {
    os << "branch,point,direction,index,x,y,z\n";
    for (const auto& c : curves) {
        const std::string id = std::to_string(c.branch.point) + (c.branch.direction > 0 ? "+" : "-");
        for (std::size_t i = 0; i < c.polyline.size(); ++i) {
            const auto& p = c.polyline[i];
            os << id << ',' << c.branch.point << ',' << c.branch.direction << ',' << i << ','
               << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
        }
    }
}

void write_scan_csv(std::ostream& os, const ScanResult& scan) {
    os << scan.param_name << ",index,x,y,z\n";
    for (const auto& p : scan.points)
        os << format_double(p.param) << ',' << p.index << ',' << format_double(p.state.x()) << ','
           << format_double(p.state.y()) << ',' << format_double(p.state.z()) << '\n';
}

namespace {

std::string complex_text(const Complex& c) {
    std::ostringstream os;
    os << format_double(c.real());
    if (c.imag() != 0.0) os << (c.imag() > 0 ? "+" : "-") << format_double(std::abs(c.imag())) << "i";
    return os.str();
}

}  // namespace

std::string summarize(const Cycle& cycle) {
    std::ostringstream os;
    const auto cls = classify_cycle(cycle.multipliers);
    os << "map: " << cycle.map_id << '\n'
       << "params: " << format_params(cycle.params) << '\n'
       << "period: " << cycle.period << '\n'
       << "type: " << to_string(cls.tag) << '\n';
    if (!cycle.symbols.empty()) os << "symbols: " << cycle.symbols << '\n';
    os << "residual: " << format_double(cycle.residual) << '\n' << "multipliers:";
    for (const auto& v : cycle.multipliers.values) os << ' ' << complex_text(v);
    os << '\n';
    if (const auto roles = role_order(cycle.multipliers))
        os << "roles: " << format_double(roles->lambda1) << ' ' << format_double(roles->lambda2) << ' '
           << format_double(roles->lambda3) << '\n';
    for (std::size_t i = 0; i < cycle.points.size(); ++i)
        os << "point " << i << ": " << format_double(cycle.points[i].x()) << ' '
           << format_double(cycle.points[i].y()) << ' ' << format_double(cycle.points[i].z()) << '\n';
    return os.str();
}

std::string summarize(const ConnectionReport& r) {
    std::ostringstream os;
    os << "topology: " << r.tag() << '\n'
       << "components: " << r.loops << '\n'
       << "winding: " << r.winding << '\n'
       << "saddles: " << r.saddle_count << '\n'
       << "nodes: " << r.node_count << '\n';
    for (std::size_t c = 0; c < r.components.size(); ++c) {
        os << "component " << c << ":";
        for (int j : r.components[c]) os << ' ' << j;
        os << '\n';
    }
    for (const auto& e : r.edges)
        os << "edge: " << e.saddle << (e.direction > 0 ? "+" : "-") << " -> " << e.node
           << " length " << format_double(e.arclength) << " turns " << format_double(e.spiral_turns) << '\n';
    return os.str();
}

std::string summarize(const LoopCensus& c) {
    std::ostringstream os;
    os << "verdict: " << to_string(c.verdict);
    if (c.verdict == LoopVerdict::cyclic_loops || c.verdict == LoopVerdict::periodic_points)
        os << '(' << c.multiplicity << ')';
    os << '\n' << "multiplicity: " << c.multiplicity << '\n';
    if (c.lyapunov) os << "lyapunov: " << format_double(*c.lyapunov) << '\n';
    for (std::size_t k = 0; k < c.classes.size(); ++k) {
        const auto& rc = c.classes[k];
        os << "class " << k << ": count " << rc.count << " diameter " << format_double(rc.diameter)
           << " curve_score " << format_double(rc.curve_score) << '\n';
    }
    return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const auto tmp = path.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("rename to " + path.string() + " failed: " + ec.message());
    }
}

}  // namespace modelock
