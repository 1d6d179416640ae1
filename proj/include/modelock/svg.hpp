#pragma once

// Minimal SVG output: scatter points and polylines projected on two axes.

#include <span>
#include <string>
#include <vector>

#include "modelock/maps.hpp"

namespace modelock {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void scatter(std::span<const Point2> pts, std::string colour = "#1f4e9c", double radius = 0.8);
    void polyline(std::span<const Point2> pts, std::string colour = "#b03030", double width = 1.0);
    void markers(std::span<const Point2> pts, std::string colour = "#000000", double size = 4.0);

    /// Fixed 800x600 canvas; data bounds padded by 5%.
    std::string render() const;

private:
    struct Layer {
        enum class Kind { scatter, polyline, markers } kind;
        std::vector<Point2> pts;
        std::string colour;
        double size;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Layer> layers_;
};

/// Coordinates `a` and `b` (0 = x, 1 = y, 2 = z) of each state.
std::vector<Point2> project(std::span<const State3> pts, int a, int b);

}  // namespace modelock
