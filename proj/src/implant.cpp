#include "fixsim/implant.hpp"

#include <stdexcept>
#include <string>

#include "fixsim/image.hpp"

namespace fixsim {

ElectrodeGrid build_grid(int rows, int cols, double spacing_um, RetinalPoint center) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("electrode grid needs at least 1 row and 1 column");
    }
    if (!(spacing_um > 0.0)) {
        throw std::invalid_argument("electrode spacing must be positive");
    }
    ElectrodeGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.spacing_um = spacing_um;
    grid.center = center;
    grid.positions.reserve(static_cast<size_t>(rows) * cols);
    // Row 0 is the top (superior) row.
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double dx = (c - (cols - 1) / 2.0) * spacing_um;
            const double dy = ((rows - 1) / 2.0 - r) * spacing_um;
            grid.positions.push_back({center.x_um + dx, center.y_um + dy});
        }
    }
    return grid;
}

Stimulus stimulus_from_image(const Image& img, const ElectrodeGrid& grid) {
    if (img.rows != grid.rows || img.cols != grid.cols) {
        throw std::invalid_argument("stimulus raster is " + std::to_string(img.rows) + "x" +
                                    std::to_string(img.cols) + " but the grid is " +
                                    std::to_string(grid.rows) + "x" + std::to_string(grid.cols));
    }
    Stimulus stim;
    stim.amplitudes.assign(img.px.begin(), img.px.end());
    return stim;
}

RenderWindow implant_bounding_box(const ElectrodeGrid& grid) {
    RenderWindow box{grid.positions[0].x_um, grid.positions[0].x_um, grid.positions[0].y_um,
                     grid.positions[0].y_um};
    for (const RetinalPoint& p : grid.positions) {
        box.x_min_um = std::min(box.x_min_um, p.x_um);
        box.x_max_um = std::max(box.x_max_um, p.x_um);
        box.y_min_um = std::min(box.y_min_um, p.y_um);
        box.y_max_um = std::max(box.y_max_um, p.y_um);
    }
    return box;
}

RenderWindow percept_window(const ElectrodeGrid& grid, double margin_um) {
    RenderWindow box = implant_bounding_box(grid);
    box.x_min_um -= margin_um;
    box.x_max_um += margin_um;
    box.y_min_um -= margin_um;
    box.y_max_um += margin_um;
    return box;
}

}  // namespace fixsim
