/*
 * Bit-exact binary snapshots and CSV time series.
 *
 * Snapshot layout: 8-byte little-endian header length, UTF-8 JSON metadata
 * (dims, gamma, l, nu, time, grid spec), then raw little-endian float64 in
 * index order [species][x1][x2][x3][v1][v2][v3], slowest to fastest.
 */
#pragma once

#include <string>

#include "config.hpp"
#include "diagnostics.hpp"

namespace vpl {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

void write_snapshot(const std::string& path, const RunConfig& cfg, const PhaseGrid& g,
                    const DistState& f);

struct Snapshot {
    RunConfig cfg;   // grid-defining subset restored from metadata
    DistState f;
    std::string metadata_json;
};
Snapshot read_snapshot(const std::string& path);

// CSV header: t,mass_plus,mass_minus,total_energy,e_nu,d_nu,e_plain,min_F
class SeriesWriter {
  public:
    explicit SeriesWriter(const std::string& path);
    void append(const EnergyReport& r);

  private:
    std::string path_;
};

// reads (t, column) pairs from an emitted CSV; column by header name
std::vector<std::pair<double, double>> read_series(const std::string& path,
                                                   const std::string& column);

}  // namespace vpl
