#include "modelock/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace modelock {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::scatter(std::span<const Point2> pts, std::string colour, double radius) {
    layers_.push_back({Layer::Kind::scatter, {pts.begin(), pts.end()}, std::move(colour), radius});
}

void SvgPlot::polyline(std::span<const Point2> pts, std::string colour, double width) {
    layers_.push_back({Layer::Kind::polyline, {pts.begin(), pts.end()}, std::move(colour), width});
}

void SvgPlot::markers(std::span<const Point2> pts, std::string colour, double size) {
    layers_.push_back({Layer::Kind::markers, {pts.begin(), pts.end()}, std::move(colour), size});
}

std::string SvgPlot::render() const {
    constexpr double width = 800, height = 600, margin = 60;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& l : layers_)
        for (const auto& p : l.pts) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;
    auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
       << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">"
       << escape(title_) << "</text>\n"
       << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
       << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(x_label_) << "</text>\n"
       << "<text x=\"18\" y=\"" << height / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
       << height / 2 << ")\">" << escape(y_label_) << "</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = x0 + (x1 - x0) * t / 4, fy = y0 + (y1 - y0) * t / 4;
        os << "<text x=\"" << sx(fx) << "\" y=\"" << height - margin + 16
           << "\" text-anchor=\"middle\" font-size=\"10\">" << fx << "</text>\n"
           << "<text x=\"" << margin - 4 << "\" y=\"" << sy(fy) + 3
           << "\" text-anchor=\"end\" font-size=\"10\">" << fy << "</text>\n";
    }
    for (const auto& l : layers_) {
        switch (l.kind) {
            case Layer::Kind::scatter:
                os << "<g fill=\"" << l.colour << "\">\n";
                for (const auto& p : l.pts)
                    if (std::isfinite(p.x) && std::isfinite(p.y))
                        os << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"" << l.size << "\"/>\n";
                os << "</g>\n";
                break;
            case Layer::Kind::polyline:
                os << "<polyline fill=\"none\" stroke=\"" << l.colour << "\" stroke-width=\"" << l.size
                   << "\" points=\"";
                for (const auto& p : l.pts)
                    if (std::isfinite(p.x) && std::isfinite(p.y)) os << sx(p.x) << ',' << sy(p.y) << ' ';
                os << "\"/>\n";
                break;
            case Layer::Kind::markers:
                os << "<g fill=\"none\" stroke=\"" << l.colour << "\" stroke-width=\"1.5\">\n";
                for (const auto& p : l.pts)
                    os << "<rect x=\"" << sx(p.x) - l.size / 2 << "\" y=\"" << sy(p.y) - l.size / 2
                       << "\" width=\"" << l.size << "\" height=\"" << l.size << "\"/>\n";
                os << "</g>\n";
                break;
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<Point2> project(std::span<const State3> pts, int a, int b) {
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back({p[a], p[b]});
    return out;
}

}  // namespace modelock
