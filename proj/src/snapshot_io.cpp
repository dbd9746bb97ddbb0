#include "snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte swapping not implemented");

namespace vpl {

using nlohmann::json;

void write_snapshot(const std::string& path, const RunConfig& cfg, const PhaseGrid& g,
                    const DistState& f) {
    json meta;
    meta["format"] = "vpl-snapshot";
    meta["version"] = 1;
    json boxes = json::array();
    for (const auto& b : cfg.boxes)
        boxes.push_back({b.lo[0], b.lo[1], b.lo[2], b.hi[0], b.hi[1], b.hi[2]});
    meta["boxes"] = boxes;
    meta["h_x"] = cfg.h_x;
    meta["active_dims"] = cfg.active_dims;
    meta["n_v"] = cfg.n_v;
    meta["v_max"] = cfg.v_max;
    meta["gamma"] = cfg.gamma;
    meta["l"] = cfg.effective_l();
    meta["nu"] = cfg.nu;
    meta["time"] = f.time;
    meta["n_cells"] = g.n_cells();
    meta["species"] = 2;
    std::string header = meta.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("snapshot: cannot open '" + path + "' for writing");
    std::uint64_t len = header.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(f.data.data()),
              static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (!out) throw IoError("snapshot: write failed for '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("snapshot: cannot open '" + path + "'");
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    if (!in || len > (1u << 20)) throw IoError("snapshot: corrupt header length");
    std::string header(len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(len));
    if (!in) throw IoError("snapshot: truncated metadata");

    json meta = json::parse(header);
    Snapshot snap;
    snap.metadata_json = header;
    RunConfig& cfg = snap.cfg;
    cfg.boxes.clear();
    for (const auto& b : meta.at("boxes")) {
        Box bx;
        for (int d = 0; d < 3; ++d) {
            bx.lo[d] = b.at(d).get<double>();
            bx.hi[d] = b.at(d + 3).get<double>();
        }
        cfg.boxes.push_back(bx);
    }
    cfg.h_x = meta.at("h_x").get<double>();
    cfg.active_dims = meta.at("active_dims").get<int>();
    cfg.n_v = meta.at("n_v").get<int>();
    cfg.v_max = meta.at("v_max").get<double>();
    cfg.gamma = meta.at("gamma").get<double>();
    cfg.l_weight = meta.at("l").get<double>();
    cfg.nu = meta.at("nu").get<double>();

    PhaseGrid g = build_phase_grid(cfg);
    snap.f = DistState(g, meta.at("time").get<double>());
    in.read(reinterpret_cast<char*>(snap.f.data.data()),
            static_cast<std::streamsize>(snap.f.data.size() * sizeof(double)));
    if (!in) throw IoError("snapshot: truncated payload");
    return snap;
}

SeriesWriter::SeriesWriter(const std::string& path) : path_(path) {
    std::ofstream out(path_);
    if (!out) throw IoError("series: cannot open '" + path_ + "' for writing");
    out << "t,mass_plus,mass_minus,total_energy,e_nu,d_nu,e_plain,min_F\n";
}

void SeriesWriter::append(const EnergyReport& r) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("series: cannot append to '" + path_ + "'");
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.mass_plus,
                  r.mass_minus, r.total_energy, r.e_nu, r.d_nu, r.e_plain, r.min_F);
    out << buf;
}

std::vector<std::pair<double, double>> read_series(const std::string& path,
                                                   const std::string& column) {
    std::ifstream in(path);
    if (!in) throw IoError("series: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("series: empty file '" + path + "'");
    // locate the column
    int col = -1, idx = 0;
    std::string name;
    std::istringstream hs(line);
    while (std::getline(hs, name, ',')) {
        if (name == column) col = idx;
        ++idx;
    }
    if (col < 0) throw IoError("series: column '" + column + "' not found in '" + path + "'");
    std::vector<std::pair<double, double>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        double t = 0.0, v = 0.0;
        for (int i = 0; std::getline(ls, cell, ','); ++i) {
            if (i == 0) t = std::stod(cell);
            if (i == col) v = std::stod(cell);
        }
        out.emplace_back(t, v);
    }
    return out;
}

}  // namespace vpl
