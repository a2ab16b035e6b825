#include "ringloc/map_store.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

namespace ringloc {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
std::uint64_t fnv1a_val(T v, std::uint64_t h) {
    return fnv1a(&v, sizeof(v), h);
}

constexpr char kMagic[8] = {'R', 'L', 'O', 'C', 'M', 'A', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

void write_raw(std::ostream& out, const void* data, std::size_t len) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
}

template <typename T>
void write_val(std::ostream& out, T v) {
    write_raw(out, &v, sizeof(v));
}

void read_raw(std::istream& in, void* data, std::size_t len) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (!in) throw MapTruncatedError("map file truncated");
}

template <typename T>
T read_val(std::istream& in) {
    T v;
    read_raw(in, &v, sizeof(v));
    return v;
}

}  // namespace

std::uint64_t PipelineConfig::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a_val<std::uint32_t>(static_cast<std::uint32_t>(grid.side_cells), h);
    h = fnv1a_val(grid.cell_size_m, h);
    h = fnv1a_val(grid.z_min_m, h);
    h = fnv1a_val(grid.z_max_m, h);
    h = fnv1a_val<std::uint32_t>(static_cast<std::uint32_t>(grid.n_z_channels), h);
    h = fnv1a_val(ground_z_m, h);
    h = fnv1a_val<std::uint32_t>(static_cast<std::uint32_t>(theta_bins()), h);
    h = fnv1a_val<std::uint32_t>(static_cast<std::uint32_t>(omega_bins()), h);
    h = fnv1a_val(bank_seed, h);
    return h;
}

Keyframe make_keyframe(int id, const Pose2& pose, const PointCloud& cloud,
                       const PipelineConfig& cfg, const FilterBank& bank) {
    Keyframe kf;
    kf.id = id;
    kf.pose = pose;
    kf.bev = voxelize_to_bev(remove_ground(cloud, cfg.ground_z_m), cfg.grid);

    // The channel mix commutes with both pathways, so collapse once up front.
    BevGrid collapsed = collapse_channels(kf.bev, bank);

    FilterBank single;
    single.weights = {1.f};
    single.kernel1d = bank.kernel1d;
    single.kernel2d = bank.kernel2d;
    single.k2 = bank.k2;

    Sinogram sino = aggregate_channels(radon_transform(collapsed, cfg.theta_bins()), single);
    kf.spectrum = magnitude_spectrum(sino, cfg.omega_bins());
    l2_normalize(kf.spectrum);

    kf.neural = neural_bev(collapsed, single);
    l2_normalize(kf.neural);
    return kf;
}

KeyframeDatabase build_map(const std::vector<std::pair<PointCloud, Pose2>>& observations,
                           double interval_m, const PipelineConfig& cfg, int n_threads) {
    if (observations.empty()) throw std::invalid_argument("build_map: empty observations");
    if (interval_m <= 0.0) throw std::invalid_argument("build_map: interval_m must be > 0");

    std::vector<std::size_t> kept;
    double last_x = 0.0, last_y = 0.0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const Pose2& p = observations[i].second;
        if (kept.empty() || std::hypot(p.x - last_x, p.y - last_y) >= interval_m) {
            kept.push_back(i);
            last_x = p.x;
            last_y = p.y;
        }
    }

    KeyframeDatabase db;
    db.config = cfg;
    db.fingerprint = cfg.fingerprint();
    db.keyframes.resize(kept.size());

    const FilterBank bank = FilterBank::seeded(cfg.grid.n_z_channels, cfg.bank_seed);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < kept.size();) {
            const auto& [cloud, pose] = observations[kept[k]];
            db.keyframes[k] = make_keyframe(static_cast<int>(kept[k]), pose, cloud, cfg, bank);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return db;
}

void save_map(const KeyframeDatabase& db, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_raw(out, kMagic, sizeof(kMagic));
    write_val(out, kVersion);
    write_val(out, db.fingerprint);

    const PipelineConfig& c = db.config;
    write_val<std::uint32_t>(out, static_cast<std::uint32_t>(c.grid.side_cells));
    write_val(out, c.grid.cell_size_m);
    write_val(out, c.grid.z_min_m);
    write_val(out, c.grid.z_max_m);
    write_val<std::uint32_t>(out, static_cast<std::uint32_t>(c.grid.n_z_channels));
    write_val(out, c.ground_z_m);
    write_val<std::uint32_t>(out, static_cast<std::uint32_t>(c.theta_bins()));
    write_val<std::uint32_t>(out, static_cast<std::uint32_t>(c.omega_bins()));
    write_val(out, c.bank_seed);

    write_val<std::uint32_t>(out, static_cast<std::uint32_t>(db.keyframes.size()));
    for (const Keyframe& kf : db.keyframes) {
        write_val<std::uint32_t>(out, static_cast<std::uint32_t>(kf.id));
        write_val(out, kf.pose.theta);
        write_val(out, kf.pose.x);
        write_val(out, kf.pose.y);
        write_val<std::uint32_t>(out, static_cast<std::uint32_t>(kf.bev.channels));
        write_raw(out, kf.bev.data.data(), kf.bev.data.size() * sizeof(float));
        write_val<std::uint32_t>(out, static_cast<std::uint32_t>(kf.spectrum.n_theta));
        write_val<std::uint32_t>(out, static_cast<std::uint32_t>(kf.spectrum.n_omega));
        write_raw(out, kf.spectrum.data.data(), kf.spectrum.data.size() * sizeof(float));
        write_raw(out, kf.neural.data.data(), kf.neural.data.size() * sizeof(float));
    }
    if (!out) throw std::runtime_error("write failure on " + path);
}

KeyframeDatabase load_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw MapFormatError("not a map file: bad magic");
    const auto version = read_val<std::uint32_t>(in);
    if (version != kVersion)
        throw MapVersionError("unsupported map version " + std::to_string(version));

    KeyframeDatabase db;
    db.fingerprint = read_val<std::uint64_t>(in);
    PipelineConfig& c = db.config;
    c.grid.side_cells = static_cast<int>(read_val<std::uint32_t>(in));
    c.grid.cell_size_m = read_val<double>(in);
    c.grid.z_min_m = read_val<double>(in);
    c.grid.z_max_m = read_val<double>(in);
    c.grid.n_z_channels = static_cast<int>(read_val<std::uint32_t>(in));
    c.ground_z_m = read_val<double>(in);
    c.n_theta = static_cast<int>(read_val<std::uint32_t>(in));
    c.n_omega = static_cast<int>(read_val<std::uint32_t>(in));
    c.bank_seed = read_val<std::uint64_t>(in);
    if (db.fingerprint != c.fingerprint())
        throw MapFingerprintError("stored fingerprint does not match stored config");

    const int n = c.grid.side_cells;
    const auto count = read_val<std::uint32_t>(in);
    db.keyframes.resize(count);
    for (std::uint32_t k = 0; k < count; ++k) {
        Keyframe& kf = db.keyframes[k];
        kf.id = static_cast<int>(read_val<std::uint32_t>(in));
        const double theta = read_val<double>(in);
        const double x = read_val<double>(in);
        const double y = read_val<double>(in);
        kf.pose = Pose2(theta, x, y);
        const auto bev_ch = read_val<std::uint32_t>(in);
        kf.bev.spec = c.grid;
        kf.bev.channels = static_cast<int>(bev_ch);
        kf.bev.data.resize(static_cast<std::size_t>(n) * n * bev_ch);
        read_raw(in, kf.bev.data.data(), kf.bev.data.size() * sizeof(float));
        const auto nt = read_val<std::uint32_t>(in);
        const auto nw = read_val<std::uint32_t>(in);
        kf.spectrum = Spectrum(static_cast<int>(nt), static_cast<int>(nw));
        read_raw(in, kf.spectrum.data.data(), kf.spectrum.data.size() * sizeof(float));
        kf.neural = BevGrid(c.grid, 1);
        read_raw(in, kf.neural.data.data(), kf.neural.data.size() * sizeof(float));
    }
    return db;
}

std::pair<int, double> nearest_keyframe(const KeyframeDatabase& db, const Pose2& pose) {
    if (db.empty()) throw std::invalid_argument("nearest_keyframe: empty database");
    int best_id = db.keyframes.front().id;
    double best_d = std::hypot(pose.x - db.keyframes.front().pose.x,
                               pose.y - db.keyframes.front().pose.y);
    for (const Keyframe& kf : db.keyframes) {
        const double d = std::hypot(pose.x - kf.pose.x, pose.y - kf.pose.y);
        if (d < best_d || (d == best_d && kf.id < best_id)) {
            best_d = d;
            best_id = kf.id;
        }
    }
    return {best_id, best_d};
}

std::vector<std::pair<int, Pose2>> load_poses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<int, Pose2>> poses;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        int id;
        double theta, x, y;
        if (ss >> id >> theta >> x >> y) poses.emplace_back(id, Pose2(theta, x, y));
    }
    return poses;
}

void save_poses(const std::vector<std::pair<int, Pose2>>& poses, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# id theta x y\n";
    for (const auto& [id, p] : poses) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g\n", id, p.theta, p.x, p.y);
        out << buf;
    }
}

}  // namespace ringloc
