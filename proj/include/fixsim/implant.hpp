#pragma once

#include <vector>

#include "fixsim/geometry.hpp"

namespace fixsim {

struct Image;

// Regular electrode lattice on the retina. Positions are row-major with
// row 0 at the top (superior) edge.
struct ElectrodeGrid {
    int rows = 0;
    int cols = 0;
    double spacing_um = 0.0;
    RetinalPoint center;
    std::vector<RetinalPoint> positions;

    int size() const { return rows * cols; }
};

// Per-electrode activation amplitudes in [0, 1], row-major aligned with
// ElectrodeGrid::positions.
struct Stimulus {
    std::vector<double> amplitudes;
};

ElectrodeGrid build_grid(int rows, int cols, double spacing_um, RetinalPoint center);

// Identity mapping from pixel intensity to electrode amplitude. The raster
// must have exactly grid.rows x grid.cols pixels.
Stimulus stimulus_from_image(const Image& img, const ElectrodeGrid& grid);

// Bounding box of the electrode centers.
RenderWindow implant_bounding_box(const ElectrodeGrid& grid);

// Render window used for percept rasters: implant bounding box grown by
// margin_um on every side.
RenderWindow percept_window(const ElectrodeGrid& grid, double margin_um);

}  // namespace fixsim
