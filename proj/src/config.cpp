#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vpl {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

struct Parser {
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
    }
    double num(const std::string& key, const std::string& v) const {
        try {
            std::size_t pos = 0;
            double x = std::stod(v, &pos);
            if (pos != v.size()) fail(key + ": trailing characters in '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail(key + ": expected a number, got '" + v + "'");
        }
    }
    long integer(const std::string& key, const std::string& v) const {
        double x = num(key, v);
        if (x != std::floor(x)) fail(key + ": expected an integer, got '" + v + "'");
        return static_cast<long>(x);
    }
    bool boolean(const std::string& key, const std::string& v) const {
        if (v == "on" || v == "true" || v == "1") return true;
        if (v == "off" || v == "false" || v == "0") return false;
        fail(key + ": expected on/off, got '" + v + "'");
    }
};

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.boxes.clear();
    Parser p;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++p.line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.empty()) p.fail(key + ": empty value");

        if (key == "box") {
            std::istringstream vs(val);
            Box b;
            if (!(vs >> b.lo[0] >> b.lo[1] >> b.lo[2] >> b.hi[0] >> b.hi[1] >> b.hi[2]))
                p.fail("box: expected six numbers 'lo1 lo2 lo3 hi1 hi2 hi3'");
            cfg.boxes.push_back(b);
        } else if (key == "h_x") {
            cfg.h_x = p.num(key, val);
        } else if (key == "active_dims") {
            cfg.active_dims = static_cast<int>(p.integer(key, val));
        } else if (key == "n_v") {
            cfg.n_v = static_cast<int>(p.integer(key, val));
            if (cfg.n_v % 2 != 0) p.fail("n_v must be even, got " + val);
        } else if (key == "v_max") {
            cfg.v_max = p.num(key, val);
        } else if (key == "gamma") {
            cfg.gamma = p.num(key, val);
            if (cfg.gamma < -3.0 || cfg.gamma > 1.0) p.fail("gamma must lie in [-3, 1]");
        } else if (key == "l") {
            cfg.l_weight = p.num(key, val);
        } else if (key == "nu") {
            cfg.nu = p.num(key, val);
            if (cfg.nu < 0.0) p.fail("nu must be >= 0");
        } else if (key == "eps") {
            cfg.eps = p.num(key, val);
            if (cfg.eps <= 0.0) p.fail("eps must be positive");
        } else if (key == "R") {
            cfg.R = p.num(key, val);
        } else if (key == "dt") {
            cfg.dt = p.num(key, val);
            if (cfg.dt <= 0.0) p.fail("dt must be positive");
        } else if (key == "t_end") {
            cfg.t_end = p.num(key, val);
            if (cfg.t_end < 0.0) p.fail("t_end must be >= 0");
        } else if (key == "picard_tol") {
            cfg.picard_tol = p.num(key, val);
            if (!(cfg.picard_tol > 0.0) || cfg.picard_tol > 1e-2)
                p.fail("picard_tol must lie in (0, 1e-2]");
        } else if (key == "picard_max") {
            cfg.picard_max = static_cast<int>(p.integer(key, val));
            if (cfg.picard_max < 1) p.fail("picard_max must be >= 1");
        } else if (key == "scheme") {
            if (val == "imex_ak") cfg.scheme = Scheme::imex_ak;
            else if (val == "fully_explicit") cfg.scheme = Scheme::fully_explicit;
            else p.fail("scheme: expected imex_ak or fully_explicit");
        } else if (key == "streaming") {
            cfg.streaming = p.boolean(key, val);
        } else if (key == "linear") {
            cfg.linear = p.boolean(key, val);
        } else if (key == "diag_order") {
            cfg.diag_order = static_cast<int>(p.integer(key, val));
            if (cfg.diag_order < 0 || cfg.diag_order > 3)
                p.fail("diag_order must lie in 0..3");
        } else if (key == "cadence") {
            cfg.cadence = static_cast<int>(p.integer(key, val));
            if (cfg.cadence < 1) p.fail("cadence must be >= 1");
        } else if (key == "fit_t0") {
            cfg.fit_t0 = p.num(key, val);
        } else if (key == "fit_t1") {
            cfg.fit_t1 = p.num(key, val);
        } else if (key == "fit_mode") {
            if (val == "fixed") cfg.fit_mode = FitMode::fixed_p;
            else if (val == "free") cfg.fit_mode = FitMode::free_p;
            else p.fail("fit_mode: expected fixed or free");
        } else if (key == "x_delta") {
            cfg.x_delta = p.num(key, val);
        } else if (key == "x_p") {
            cfg.x_p = p.num(key, val);
            if (cfg.x_p <= 0.0 || cfg.x_p > 1.0) p.fail("x_p must lie in (0, 1]");
        } else if (key == "out_dir") {
            cfg.out_dir = val;
        } else if (key == "snapshot_times") {
            std::istringstream vs(val);
            double t;
            cfg.snapshot_times.clear();
            while (vs >> t) cfg.snapshot_times.push_back(t);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(p.integer(key, val));
        } else {
            p.fail("unknown key '" + key + "'");
        }
    }
    if (cfg.boxes.empty()) cfg.boxes.push_back(Box{});

    // cross-key constraints
    if (cfg.n_v < 4 || cfg.n_v % 2 != 0)
        throw ConfigError("config: n_v must be even and >= 4");
    if (cfg.v_max < 5.0) throw ConfigError("config: v_max must be >= 5");
    double dt = cfg.effective_dt();
    double cfl = 0.9 * cfg.h_x / cfg.v_max;
    if (dt > cfl + 1e-15)
        throw ConfigError("config: CFL violated, dt = " + std::to_string(dt) +
                          " exceeds 0.9 h_x / v_max = " + std::to_string(cfl));
    if (!(cfg.eps < cfg.effective_R()))
        throw ConfigError("config: require eps < R");
    if (cfg.effective_R() > cfg.v_max * 1.7320508075688772)
        throw ConfigError("config: require R <= sqrt(3) v_max");
    // validates overlap / lattice alignment as well
    build_domain(cfg.boxes, cfg.h_x, cfg.active_dims);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream o;
    o.precision(17);
    for (const auto& b : cfg.boxes)
        o << "box = " << b.lo[0] << " " << b.lo[1] << " " << b.lo[2] << " " << b.hi[0] << " "
          << b.hi[1] << " " << b.hi[2] << "\n";
    o << "h_x = " << cfg.h_x << "\n";
    o << "active_dims = " << cfg.active_dims << "\n";
    o << "n_v = " << cfg.n_v << "\n";
    o << "v_max = " << cfg.v_max << "\n";
    o << "gamma = " << cfg.gamma << "\n";
    if (cfg.l_weight >= 0.0) o << "l = " << cfg.l_weight << "\n";
    o << "nu = " << cfg.nu << "\n";
    o << "eps = " << cfg.eps << "\n";
    if (cfg.R >= 0.0) o << "R = " << cfg.R << "\n";
    if (cfg.dt > 0.0) o << "dt = " << cfg.dt << "\n";
    o << "t_end = " << cfg.t_end << "\n";
    o << "picard_tol = " << cfg.picard_tol << "\n";
    o << "picard_max = " << cfg.picard_max << "\n";
    o << "scheme = " << (cfg.scheme == Scheme::imex_ak ? "imex_ak" : "fully_explicit") << "\n";
    o << "streaming = " << (cfg.streaming ? "on" : "off") << "\n";
    o << "linear = " << (cfg.linear ? "on" : "off") << "\n";
    o << "diag_order = " << cfg.diag_order << "\n";
    o << "cadence = " << cfg.cadence << "\n";
    o << "fit_t0 = " << cfg.fit_t0 << "\n";
    o << "fit_t1 = " << cfg.fit_t1 << "\n";
    o << "fit_mode = " << (cfg.fit_mode == FitMode::fixed_p ? "fixed" : "free") << "\n";
    o << "x_delta = " << cfg.x_delta << "\n";
    o << "x_p = " << cfg.x_p << "\n";
    o << "out_dir = " << cfg.out_dir << "\n";
    if (!cfg.snapshot_times.empty()) {
        o << "snapshot_times =";
        for (double t : cfg.snapshot_times) o << " " << t;
        o << "\n";
    }
    o << "seed = " << cfg.seed << "\n";
    return o.str();
}

PhaseGrid build_phase_grid(const RunConfig& cfg) {
    PhaseGrid g;
    g.domain = build_domain(cfg.boxes, cfg.h_x, cfg.active_dims);
    g.vgrid = build_velocity_grid(cfg.n_v, cfg.v_max);
    return g;
}

}  // namespace vpl
