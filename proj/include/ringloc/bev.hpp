#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringloc/geometry.hpp"

namespace ringloc {

/// Square, sensor-centered BEV grid layout with vertical slab channels.
struct GridSpec {
    int side_cells = 160;
    double cell_size_m = 0.875;
    double z_min_m = 0.3;
    double z_max_m = 10.0;
    int n_z_channels = 20;

    void validate() const {
        if (side_cells < 8) throw std::invalid_argument("GridSpec: side_cells must be >= 8");
        if (cell_size_m <= 0.0) throw std::invalid_argument("GridSpec: cell_size_m must be > 0");
        if (z_min_m >= z_max_m) throw std::invalid_argument("GridSpec: z_min_m must be < z_max_m");
        if (n_z_channels < 1) throw std::invalid_argument("GridSpec: n_z_channels must be >= 1");
    }

    bool operator==(const GridSpec&) const = default;
};

/// Channel-planar grid: channel c is a side x side plane, row index i along x,
/// column index j along y. Cell (i, j) covers [(i - side/2)*cell, (i - side/2 + 1)*cell) in x.
struct BevGrid {
    GridSpec spec;
    int channels = 1;
    std::vector<float> data;  // size side*side*channels, plane-major

    BevGrid() = default;
    BevGrid(const GridSpec& s, int ch)
        : spec(s), channels(ch), data(static_cast<std::size_t>(s.side_cells) * s.side_cells * ch, 0.f) {}

    int side() const { return spec.side_cells; }

    float& at(int i, int j, int c = 0) {
        return data[(static_cast<std::size_t>(c) * side() + i) * side() + j];
    }
    float at(int i, int j, int c = 0) const {
        return data[(static_cast<std::size_t>(c) * side() + i) * side() + j];
    }
    const float* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * side() * side(); }
    float* plane(int c) { return data.data() + static_cast<std::size_t>(c) * side() * side(); }

    double total_mass() const;
};

/// Keeps only points strictly above ground_z_m; survivor order preserved.
PointCloud remove_ground(const PointCloud& cloud, double ground_z_m);

/// Occupancy voxelization: cell (i, j, k) = 1 iff at least one point falls in
/// that voxel. Points outside the XY extent or [z_min, z_max) are dropped.
BevGrid voxelize_to_bev(const PointCloud& cloud, const GridSpec& spec);

/// Resamples each channel at the position rotated by -angle about the grid
/// center (bilinear, zero fill). Moves grid content by +angle.
BevGrid rotate_grid(const BevGrid& grid, double angle);

/// Integer-cell shift with zero fill: out(i, j) = in(i - dx, j - dy).
BevGrid translate_grid(const BevGrid& grid, int dx_cells, int dy_cells);

/// Bilinear sample of one channel plane at continuous cell coordinates, where
/// the value of cell (i, j) lives at (i + 0.5, j + 0.5). Zero outside.
float sample_bilinear(const float* plane, int side, double u, double v);

// --- point cloud file I/O (.bin = packed little-endian float32 xyz, .xyz = ASCII) ---
PointCloud load_cloud(const std::string& path);
void save_cloud(const PointCloud& cloud, const std::string& path);

}  // namespace ringloc
