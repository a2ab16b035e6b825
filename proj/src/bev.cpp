#include "ringloc/bev.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ringloc {

double BevGrid::total_mass() const {
    double m = 0.0;
    for (float v : data) m += v;
    return m;
}

PointCloud remove_ground(const PointCloud& cloud, double ground_z_m) {
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const Point3& p : cloud.points)
        if (p.z > ground_z_m) out.points.push_back(p);
    return out;
}

BevGrid voxelize_to_bev(const PointCloud& cloud, const GridSpec& spec) {
    spec.validate();
    BevGrid grid(spec, spec.n_z_channels);
    const int n = spec.side_cells;
    const int half = n / 2;
    const double slab = (spec.z_max_m - spec.z_min_m) / spec.n_z_channels;
    for (const Point3& p : cloud.points) {
        const int i = static_cast<int>(std::floor(p.x / spec.cell_size_m)) + half;
        const int j = static_cast<int>(std::floor(p.y / spec.cell_size_m)) + half;
        if (i < 0 || i >= n || j < 0 || j >= n) continue;
        if (p.z < spec.z_min_m || p.z >= spec.z_max_m) continue;
        const int k = static_cast<int>(std::floor((p.z - spec.z_min_m) / slab));
        if (k < 0 || k >= spec.n_z_channels) continue;
        grid.at(i, j, k) = 1.f;
    }
    return grid;
}

float sample_bilinear(const float* plane, int side, double u, double v) {
    const double fu = u - 0.5, fv = v - 0.5;
    const int i0 = static_cast<int>(std::floor(fu));
    const int j0 = static_cast<int>(std::floor(fv));
    const double au = fu - i0, av = fv - j0;
    float acc = 0.f;
    for (int di = 0; di <= 1; ++di) {
        const int i = i0 + di;
        if (i < 0 || i >= side) continue;
        const double wu = di ? au : 1.0 - au;
        for (int dj = 0; dj <= 1; ++dj) {
            const int j = j0 + dj;
            if (j < 0 || j >= side) continue;
            const double wv = dj ? av : 1.0 - av;
            acc += static_cast<float>(wu * wv) * plane[static_cast<std::size_t>(i) * side + j];
        }
    }
    return acc;
}

BevGrid rotate_grid(const BevGrid& grid, double angle) {
    const int n = grid.side();
    BevGrid out(grid.spec, grid.channels);
    const double c = std::cos(-angle), s = std::sin(-angle);
    const double ctr = n / 2.0;
    for (int ch = 0; ch < grid.channels; ++ch) {
        const float* src = grid.plane(ch);
        float* dst = out.plane(ch);
        for (int i = 0; i < n; ++i) {
            const double pu = i + 0.5 - ctr;
            for (int j = 0; j < n; ++j) {
                const double pv = j + 0.5 - ctr;
                const double su = c * pu - s * pv + ctr;
                const double sv = s * pu + c * pv + ctr;
                dst[static_cast<std::size_t>(i) * n + j] = sample_bilinear(src, n, su, sv);
            }
        }
    }
    return out;
}

BevGrid translate_grid(const BevGrid& grid, int dx_cells, int dy_cells) {
    const int n = grid.side();
    if (std::abs(dx_cells) >= n || std::abs(dy_cells) >= n)
        throw std::invalid_argument("translate_grid: shift exceeds grid size");
    BevGrid out(grid.spec, grid.channels);
    for (int ch = 0; ch < grid.channels; ++ch) {
        for (int i = 0; i < n; ++i) {
            const int si = i - dx_cells;
            if (si < 0 || si >= n) continue;
            for (int j = 0; j < n; ++j) {
                const int sj = j - dy_cells;
                if (sj < 0 || sj >= n) continue;
                out.at(i, j, ch) = grid.at(si, sj, ch);
            }
        }
    }
    return out;
}

static bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

PointCloud load_cloud(const std::string& path) {
    PointCloud cloud;
    if (ends_with(path, ".xyz")) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            Point3 p;
            if (ss >> p.x >> p.y >> p.z) cloud.points.push_back(p);
        }
        return cloud;
    }
    if (ends_with(path, ".bin")) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path);
        in.seekg(0, std::ios::end);
        const std::streamoff bytes = in.tellg();
        in.seekg(0);
        if (bytes % 12 != 0) throw std::runtime_error("malformed .bin cloud: " + path);
        cloud.points.resize(static_cast<std::size_t>(bytes / 12));
        if (bytes > 0)
            in.read(reinterpret_cast<char*>(cloud.points.data()), bytes);
        if (!in) throw std::runtime_error("short read on " + path);
        return cloud;
    }
    throw std::runtime_error("unknown cloud extension (expect .bin or .xyz): " + path);
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
    if (ends_with(path, ".xyz")) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        for (const Point3& p : cloud.points) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
            out << buf;
        }
        return;
    }
    if (ends_with(path, ".bin")) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        static_assert(sizeof(Point3) == 12);
        out.write(reinterpret_cast<const char*>(cloud.points.data()),
                  static_cast<std::streamsize>(cloud.points.size() * sizeof(Point3)));
        return;
    }
    throw std::runtime_error("unknown cloud extension (expect .bin or .xyz): " + path);
}

}  // namespace ringloc
