#pragma once

#include <cstdint>

namespace fixsim {

// Visual-field coordinates in degrees of eccentricity. Right-eye
// convention: +x temporal, +y superior, optic disc on the +x side.
struct VisualFieldPoint {
    double x_deg = 0.0;
    double y_deg = 0.0;

    bool operator==(const VisualFieldPoint&) const = default;
};

// Retinal coordinates in micrometers, same orientation as the visual field
// (no scene-to-retina inversion is applied anywhere in this codebase).
struct RetinalPoint {
    double x_um = 0.0;
    double y_um = 0.0;

    bool operator==(const RetinalPoint&) const = default;
};

// Linear retinal magnification, micrometers of retina per degree of visual
// field (small-angle approximation for the human eye).
inline constexpr double kDefaultUmPerDeg = 280.0;

inline RetinalPoint deg_to_um(const VisualFieldPoint& p, double um_per_deg = kDefaultUmPerDeg) {
    return {um_per_deg * p.x_deg, um_per_deg * p.y_deg};
}

inline VisualFieldPoint um_to_deg(const RetinalPoint& p, double um_per_deg = kDefaultUmPerDeg) {
    return {p.x_um / um_per_deg, p.y_um / um_per_deg};
}

// Axis-aligned retinal rectangle, micrometers.
struct RenderWindow {
    double x_min_um = 0.0;
    double x_max_um = 0.0;
    double y_min_um = 0.0;
    double y_max_um = 0.0;

    double width_um() const { return x_max_um - x_min_um; }
    double height_um() const { return y_max_um - y_min_um; }

    bool operator==(const RenderWindow&) const = default;
};

// Center of render pixel (row, col) for a rows x cols raster spanning the
// window. Row 0 is the top (superior) edge.
inline RetinalPoint pixel_center(const RenderWindow& w, int rows, int cols, int row, int col) {
    const double px_w = w.width_um() / cols;
    const double px_h = w.height_um() / rows;
    return {w.x_min_um + (col + 0.5) * px_w, w.y_max_um - (row + 0.5) * px_h};
}

}  // namespace fixsim
