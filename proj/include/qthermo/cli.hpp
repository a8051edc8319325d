#pragma once

// Command-line front end: thermalize, channel-verify, phase-diagram,
// nonmarkov. Exit codes: 0 success, 1 usage or I/O error, 2 failed
// verification.
//
// CSV files use '.' decimals, 17 significant digits and LF line endings.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qthermo/channel.hpp"
#include "qthermo/four_qubit.hpp"
#include "qthermo/master_equation.hpp"
#include "qthermo/nonmarkov.hpp"
#include "qthermo/qubit.hpp"
#include "qthermo/thermal_hamiltonian.hpp"

namespace qthermo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerification = 2;

/// Invalid flag value; the message names the flag.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// %.17g with inf/nan spelled out, independent of locale.
inline std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_number(const std::string &text, const std::string &flag) {
    std::string s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.pop_back();
    }
    if (s == "inf" || s == "+inf" || s == "infinity") {
        return INFINITY;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception &) {
        throw UsageError(flag + ": cannot parse '" + text + "' as a number");
    }
}

/// Accepts plain numbers and multiples of pi: "0.248pi", "0.5π", "pi".
inline double parse_angle(const std::string &text, const std::string &flag) {
    for (const std::string suffix : {"pi", "π"}) {
        if (text.size() >= suffix.size() && text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
            const std::string head = text.substr(0, text.size() - suffix.size());
            const double factor = head.empty() ? 1.0 : head == "-" ? -1.0 : parse_number(head, flag);
            return factor * std::numbers::pi;
        }
    }
    return parse_number(text, flag);
}

inline std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        parts.push_back(cur);
    }
    if (!s.empty() && s.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

inline BlochVector parse_bloch(const std::string &text, const std::string &flag) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) {
        throw UsageError(flag + ": expected three comma-separated components");
    }
    const BlochVector r{parse_number(parts[0], flag), parse_number(parts[1], flag), parse_number(parts[2], flag)};
    if (!r.is_physical()) {
        throw UsageError(flag + ": Bloch vector must have length <= 1");
    }
    return r;
}

/// ket00 | bell | pure:psi,theta,phi | thermal:gA,gB
inline InitStateSpec parse_init(const std::string &text) {
    const std::string flag = "--init";
    if (text == "ket00") {
        return InitStateSpec::ket00();
    }
    if (text == "bell") {
        return InitStateSpec::bell();
    }
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const auto args = colon == std::string::npos ? std::vector<std::string>{} : split(text.substr(colon + 1), ',');
    InitStateSpec spec;
    if (kind == "pure" && args.size() == 3) {
        spec = InitStateSpec::pure_state(parse_angle(args[0], flag), parse_angle(args[1], flag),
                                         parse_angle(args[2], flag));
    } else if (kind == "thermal" && args.size() == 2) {
        spec = InitStateSpec::thermal(parse_number(args[0], flag), parse_number(args[1], flag));
    } else {
        throw UsageError("--init: expected ket00, bell, pure:psi,theta,phi or thermal:gA,gB; got '" + text + "'");
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument &e) {
        throw UsageError("--init: " + std::string(e.what()));
    }
    return spec;
}

/// const:<omega0> | table:<csv path with t,omega rows>
inline DephasingSpec parse_omega(const std::string &text, double g_z) {
    DephasingSpec spec;
    spec.g_z = g_z;
    if (text.rfind("const:", 0) == 0) {
        spec.omega = ConstantOmega{parse_number(text.substr(6), "--omega")};
    } else if (text.rfind("table:", 0) == 0) {
        std::ifstream in(text.substr(6));
        if (!in) {
            throw UsageError("--omega: cannot read table file '" + text.substr(6) + "'");
        }
        OmegaTable table;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) {
                continue;
            }
            const auto parts = split(line, ',');
            if (parts.size() != 2) {
                throw UsageError("--omega: table rows must be 't,omega'");
            }
            table.t.push_back(parse_number(parts[0], "--omega"));
            table.omega.push_back(parse_number(parts[1], "--omega"));
        }
        spec.omega = std::move(table);
    } else {
        throw UsageError("--omega: expected const:<value> or table:<path>");
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument &e) {
        throw UsageError("--omega: " + std::string(e.what()));
    }
    return spec;
}

/// Writes to `path`, or to `fallback` when path is "-".
class OutputSink {
  public:
    OutputSink(const std::string &path, std::ostream &fallback, std::ios::openmode mode = std::ios::out) {
        if (path == "-") {
            stream_ = &fallback;
            return;
        }
        file_.open(path, mode | std::ios::binary | std::ios::trunc);
        if (!file_) {
            throw std::runtime_error("cannot open output file '" + path + "'");
        }
        stream_ = &file_;
    }
    std::ostream &stream() { return *stream_; }
    void finish() {
        stream_->flush();
        if (!*stream_) {
            throw std::runtime_error("write to output failed");
        }
    }

  private:
    std::ofstream file_;
    std::ostream *stream_ = nullptr;
};

struct ThermalizeOptions {
    double gamma = 1.0;
    std::string g = "0.5";
    std::optional<std::string> temperature;
    double t_max = 30.0;
    int samples = 100;
    std::string r0 = "0,0,1";
    std::string out = "-";
};

inline int cmd_thermalize(const ThermalizeOptions &o, std::ostream &out) {
    double g = 0.0;
    if (o.temperature) {
        const double temp = parse_number(*o.temperature, "--temperature");
        if (!(temp >= 0.0)) {
            throw UsageError("--temperature must be >= 0 (inf allowed)");
        }
        g = g_from_temperature(temp);
    } else {
        g = parse_number(o.g, "--g");
        if (!(g >= 0.0 && g <= 1.0)) {
            throw UsageError("--g must lie in [0, 1], got " + o.g);
        }
    }
    if (!(o.gamma > 0.0) || !std::isfinite(o.gamma)) {
        throw UsageError("--gamma must be positive");
    }
    if (!(o.t_max >= 0.0) || !std::isfinite(o.t_max)) {
        throw UsageError("--t-max must be finite and >= 0");
    }
    if (o.samples < 1) {
        throw UsageError("--samples must be >= 1");
    }
    const BlochVector r0 = parse_bloch(o.r0, "--r0");
    const ThermalParam th{g, o.gamma};
    const ComplexMatrix target = thermal_state(g);

    OutputSink sink(o.out, out);
    auto &csv = sink.stream();
    csv << "t,r1,r2,r3,g_eff,T_eff,trace_dist_to_thermal\n";
    const int rows = o.t_max == 0.0 ? 1 : o.samples;
    for (int k = 0; k < rows; ++k) {
        const double t = rows == 1 ? o.t_max : (k == rows - 1 ? o.t_max : o.t_max * k / (rows - 1));
        const BlochVector r = analytic_bloch(r0, th, t);
        const ComplexMatrix rho = bloch_to_density(r);
        const double g_eff = effective_g(rho).g_eff;
        csv << format_double(t) << ',' << format_double(r.r1) << ',' << format_double(r.r2) << ','
            << format_double(r.r3) << ',' << format_double(g_eff) << ','
            << format_double(temperature_from_g(std::clamp(g_eff, -1.0, 1.0))) << ','
            << format_double(trace_norm(rho - target)) << '\n';
    }
    sink.finish();
    return kExitOk;
}

struct ChannelVerifyOptions {
    double gamma = 1.0;
    double g = 0.5;
    double t = 1.0;
    bool json = false;
    /// Test hook: added to alpha of the simulated channel (negative control).
    double inject_error = 0.0;
};

inline int cmd_channel_verify(const ChannelVerifyOptions &o, std::ostream &out) {
    if (!(o.gamma > 0.0)) {
        throw UsageError("--gamma must be positive");
    }
    if (!(o.g >= 0.0 && o.g <= 1.0)) {
        throw UsageError("--g must lie in [0, 1]");
    }
    if (!(o.t >= 0.0) || !std::isfinite(o.t)) {
        throw UsageError("--t must be finite and >= 0");
    }
    const ThermalParam th{o.g, o.gamma};
    const auto master = choi_of(affine_from_master(th, o.t));
    ChannelParams p = solve_thermal_params(o.gamma, o.g, o.t).front();
    p.alpha += o.inject_error;
    const auto simulated = channel_from_unitary(parametrized_unitary(p), ancilla_density(AncillaState::of(p)));
    const double distance = choi_distance(master, choi_of(simulated.kraus));
    constexpr double tol = 1e-10;
    const bool ok = distance < tol;
    if (o.json) {
        nlohmann::json j;
        j["gamma"] = o.gamma;
        j["g"] = o.g;
        j["t"] = o.t;
        j["choi_distance"] = distance;
        j["tolerance"] = tol;
        j["equal"] = ok;
        out << j.dump() << '\n';
    } else {
        out << "choi_distance " << format_double(distance) << '\n';
        out << (ok ? "channels equal" : "channels differ") << '\n';
    }
    return ok ? kExitOk : kExitVerification;
}

struct PhaseDiagramOptions {
    std::string init = "ket00";
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    double gamma3 = 1.0;
    int grid = 16;
    double g_min = 0.05;
    double g_max = 0.95;
    double t_final = 1000.0;
    std::string out = "-";
    std::optional<std::string> ppm;
    std::string propagator = "integrated";
    int steps = 100000;
    std::string assignment = "populations";
    unsigned threads = 0;
};

inline std::array<unsigned char, 3> class_color(PhaseClass c) {
    switch (c) {
    case PhaseClass::both_cool:
        return {0, 0, 255};
    case PhaseClass::a_cool_b_heat:
        return {0, 255, 0};
    case PhaseClass::a_heat_b_cool:
        return {255, 255, 0};
    case PhaseClass::both_heat:
        return {255, 0, 0};
    case PhaseClass::anomalous:
        return {128, 128, 128};
    }
    return {128, 128, 128};
}

inline void write_phase_csv(std::ostream &csv, const std::vector<PhaseCell> &cells) {
    csv << "g1,g2,T_bath_A,T_bath_B,gA_init,gB_init,gA_final,gB_final,coherA,coherB,class\n";
    for (const auto &c : cells) {
        csv << format_double(c.g1) << ',' << format_double(c.g2) << ',' << format_double(c.T_bath_A) << ','
            << format_double(c.T_bath_B) << ',' << format_double(c.gA_init) << ',' << format_double(c.gB_init) << ','
            << format_double(c.gA_final) << ',' << format_double(c.gB_final) << ',' << format_double(c.coherA) << ','
            << format_double(c.coherB) << ',' << to_string(c.cls) << '\n';
    }
}

/// Binary P6 image, one pixel per cell; row 0 holds the largest g1, columns
/// run over ascending g2.
inline void write_phase_ppm(std::ostream &ppm, const std::vector<PhaseCell> &cells, int grid) {
    ppm << "P6\n" << grid << ' ' << grid << "\n255\n";
    for (int row = 0; row < grid; ++row) {
        const int i1 = grid - 1 - row;
        for (int i2 = 0; i2 < grid; ++i2) {
            const auto rgb = class_color(cells[static_cast<std::size_t>(i1 * grid + i2)].cls);
            ppm.write(reinterpret_cast<const char *>(rgb.data()), 3);
        }
    }
}

inline SweepConfig sweep_config_from(const PhaseDiagramOptions &o) {
    SweepConfig cfg;
    cfg.init = parse_init(o.init);
    cfg.gamma1 = o.gamma1;
    cfg.gamma2 = o.gamma2;
    cfg.gamma3 = o.gamma3;
    for (const auto &[name, v] : {std::pair{"--gamma1", o.gamma1}, {"--gamma2", o.gamma2}, {"--gamma3", o.gamma3}}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw UsageError(std::string(name) + " must be finite and >= 0");
        }
    }
    if (o.grid < 2) {
        throw UsageError("--grid must be >= 2");
    }
    cfg.grid_n = o.grid;
    if (!(o.g_min > 0.0 && o.g_min <= o.g_max && o.g_max <= 1.0)) {
        throw UsageError("--g-min/--g-max must satisfy 0 < g-min <= g-max <= 1");
    }
    cfg.g1_range = cfg.g2_range = {o.g_min, o.g_max};
    if (!(o.t_final > 0.0) || !std::isfinite(o.t_final)) {
        throw UsageError("--t-final must be finite and > 0");
    }
    cfg.t_final = o.t_final;
    if (o.propagator == "integrated") {
        cfg.propagator = Propagator::integrated;
    } else if (o.propagator == "time_ordered") {
        cfg.propagator = Propagator::time_ordered;
    } else {
        throw UsageError("--propagator must be integrated or time_ordered");
    }
    if (o.steps < 1) {
        throw UsageError("--steps must be >= 1");
    }
    cfg.time_ordered_steps = o.steps;
    if (o.assignment == "populations") {
        cfg.assignment = ThermalAssignment::populations;
    } else if (o.assignment == "spectrum") {
        cfg.assignment = ThermalAssignment::spectrum;
    } else {
        throw UsageError("--assignment must be populations or spectrum");
    }
    cfg.threads = o.threads;
    if (cfg.threads == 0) {
        if (const char *env = std::getenv("QTHERMO_THREADS")) {
            cfg.threads = static_cast<unsigned>(std::max(0, std::atoi(env)));
        }
    }
    return cfg;
}

inline int cmd_phase_diagram(const PhaseDiagramOptions &o, std::ostream &out) {
    const SweepConfig cfg = sweep_config_from(o);
    const auto cells = run_sweep(cfg);
    OutputSink sink(o.out, out);
    write_phase_csv(sink.stream(), cells);
    sink.finish();
    if (o.ppm) {
        OutputSink image(*o.ppm, out);
        write_phase_ppm(image.stream(), cells, cfg.grid_n);
        image.finish();
    }
    return kExitOk;
}

struct NonmarkovOptions {
    double gz = 0.5;
    std::string omega = "const:1";
    double t_max = 3.2;
    int grid = 1001;
    std::string r0 = "1,0,0";
    std::string s0 = "-1,0,0";
    std::string out = "-";
};

inline int cmd_nonmarkov(const NonmarkovOptions &o, std::ostream &out, std::ostream &err) {
    if (!(std::abs(o.gz) <= 1.0)) {
        throw UsageError("--gz must satisfy |gz| <= 1");
    }
    if (!(o.t_max > 0.0) || !std::isfinite(o.t_max)) {
        throw UsageError("--t-max must be finite and > 0");
    }
    if (o.grid < 2) {
        throw UsageError("--grid must be >= 2");
    }
    const DephasingSpec spec = parse_omega(o.omega, o.gz);
    const BlochVector r0 = parse_bloch(o.r0, "--r0");
    const BlochVector s0 = parse_bloch(o.s0, "--s0");

    std::vector<double> grid(static_cast<std::size_t>(o.grid));
    for (int k = 0; k < o.grid; ++k) {
        grid[static_cast<std::size_t>(k)] = k == o.grid - 1 ? o.t_max : o.t_max * k / (o.grid - 1);
    }
    const auto samples = scan_trace_distance(r0, s0, spec, grid);
    const auto intervals = increase_intervals(samples);

    OutputSink sink(o.out, out);
    auto &csv = sink.stream();
    csv << "t,trace_distance,increasing\n";
    for (const auto &s : samples) {
        csv << format_double(s.t) << ',' << format_double(s.distance) << ',' << (s.increasing ? 1 : 0) << '\n';
    }
    sink.finish();

    // Summary goes next to the CSV unless the CSV already occupies stdout.
    std::ostream &summary = o.out == "-" ? err : out;
    summary << "increase_intervals:";
    if (intervals.empty()) {
        summary << " none";
    }
    for (const auto &iv : intervals) {
        summary << " [" << format_double(iv.t_start) << ',' << format_double(iv.t_end) << ']';
    }
    summary << '\n';
    return kExitOk;
}

/// Parses argv and dispatches. `args` excludes the program name.
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Qubit thermalization toolkit: master equation, ancilla simulation, "
                 "four-qubit phase diagrams and non-Markovianity scans"};
    app.name("qthermo");
    app.require_subcommand(1);

    ThermalizeOptions th;
    auto *thermalize = app.add_subcommand("thermalize", "Bloch trajectory under the master equation (CSV)");
    thermalize->add_option("--gamma", th.gamma, "total emission rate")->capture_default_str();
    thermalize->add_option("--g", th.g, "bath thermal parameter in [0, 1]")->capture_default_str();
    thermalize->add_option("--temperature", th.temperature, "bath temperature (inf allowed); overrides --g");
    thermalize->add_option("--t-max", th.t_max, "final time")->capture_default_str();
    thermalize->add_option("--samples", th.samples, "number of uniformly spaced rows")->capture_default_str();
    thermalize->add_option("--r0", th.r0, "initial Bloch vector r1,r2,r3")->capture_default_str();
    thermalize->add_option("--out", th.out, "output CSV path ('-' for stdout)")->capture_default_str();

    ChannelVerifyOptions cv;
    auto *verify = app.add_subcommand("channel-verify", "Compare master-equation and ancilla-simulated channels");
    verify->add_option("--gamma", cv.gamma)->capture_default_str();
    verify->add_option("--g", cv.g)->capture_default_str();
    verify->add_option("--t", cv.t)->capture_default_str();
    verify->add_flag("--json", cv.json, "print the result as JSON");
    verify->add_option("--inject-error", cv.inject_error)->group("");

    PhaseDiagramOptions pd;
    auto *phase = app.add_subcommand("phase-diagram", "Four-qubit heating/cooling sweep over bath g values");
    phase->add_option("--init", pd.init, "ket00 | bell | pure:psi,theta,phi | thermal:gA,gB")->capture_default_str();
    phase->add_option("--gamma1", pd.gamma1)->capture_default_str();
    phase->add_option("--gamma2", pd.gamma2)->capture_default_str();
    phase->add_option("--gamma3", pd.gamma3)->capture_default_str();
    phase->add_option("--grid", pd.grid, "points per axis")->capture_default_str();
    phase->add_option("--g-min", pd.g_min)->capture_default_str();
    phase->add_option("--g-max", pd.g_max)->capture_default_str();
    phase->add_option("--t-final", pd.t_final)->capture_default_str();
    phase->add_option("--out", pd.out)->capture_default_str();
    phase->add_option("--ppm", pd.ppm, "also write a binary PPM class map");
    phase->add_option("--propagator", pd.propagator, "integrated | time_ordered")->capture_default_str();
    phase->add_option("--steps", pd.steps, "steps for the time_ordered propagator")->capture_default_str();
    phase->add_option("--assignment", pd.assignment, "populations | spectrum")->capture_default_str();
    phase->add_option("--threads", pd.threads, "worker threads (0: QTHERMO_THREADS or all cores)");

    NonmarkovOptions nm;
    auto *nonmarkov = app.add_subcommand("nonmarkov", "Trace-distance scan for the sz(x)sz dephasing model");
    nonmarkov->add_option("--gz", nm.gz, "bath qubit Bloch z-component")->capture_default_str();
    nonmarkov->add_option("--omega", nm.omega, "const:<w0> | table:<csv>")->capture_default_str();
    nonmarkov->add_option("--t-max", nm.t_max)->capture_default_str();
    nonmarkov->add_option("--grid", nm.grid, "number of time points")->capture_default_str();
    nonmarkov->add_option("--r0", nm.r0)->capture_default_str();
    nonmarkov->add_option("--s0", nm.s0)->capture_default_str();
    nonmarkov->add_option("--out", nm.out)->capture_default_str();

    std::vector<std::string> storage{"qthermo"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &s : storage) {
        argv.push_back(s.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (thermalize->parsed()) {
            return cmd_thermalize(th, out);
        }
        if (verify->parsed()) {
            return cmd_channel_verify(cv, out);
        }
        if (phase->parsed()) {
            return cmd_phase_diagram(pd, out);
        }
        if (nonmarkov->parsed()) {
            return cmd_nonmarkov(nm, out, err);
        }
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace qthermo::cli
