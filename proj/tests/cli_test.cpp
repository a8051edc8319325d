#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qthermo/cli.hpp"

namespace qthermo::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string &text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    return lines;
}

std::vector<double> fields(const std::string &line) {
    std::vector<double> v;
    for (const auto &part : split(line, ',')) {
        v.push_back(std::stod(part));
    }
    return v;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / ("qthermo_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(INFINITY), "inf");
    EXPECT_EQ(format_double(-2.0), "-2");
}

TEST(Parse, AnglesAndNumbers) {
    EXPECT_DOUBLE_EQ(parse_angle("0.248pi", "x"), 0.248 * std::numbers::pi);
    EXPECT_DOUBLE_EQ(parse_angle("0.5π", "x"), 0.5 * std::numbers::pi);
    EXPECT_DOUBLE_EQ(parse_angle("pi", "x"), std::numbers::pi);
    EXPECT_DOUBLE_EQ(parse_angle("1.25", "x"), 1.25);
    EXPECT_TRUE(std::isinf(parse_number("inf", "x")));
    EXPECT_THROW(parse_number("1.5x", "--flag"), UsageError);
}

TEST(Parse, InitSpecs) {
    EXPECT_EQ(parse_init("ket00").kind, InitStateSpec::Kind::ket00);
    EXPECT_EQ(parse_init("bell").kind, InitStateSpec::Kind::bell_phi_plus);
    const auto p = parse_init("pure:0.248pi,0.5pi,0.5pi");
    EXPECT_EQ(p.kind, InitStateSpec::Kind::pure);
    EXPECT_DOUBLE_EQ(p.psi, 0.248 * std::numbers::pi);
    const auto t = parse_init("thermal:0.1,0.2");
    EXPECT_EQ(t.gB, 0.2);
    EXPECT_THROW(parse_init("pure:1,2"), UsageError);
    EXPECT_THROW(parse_init("thermal:2,0.1"), UsageError);
    EXPECT_THROW(parse_init("ghz"), UsageError);
}

TEST(Thermalize, LastRowReachesThermalState) {
    const auto r = run_cli({"thermalize", "--gamma", "1", "--g", "0.5", "--t-max", "30", "--samples", "4"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "t,r1,r2,r3,g_eff,T_eff,trace_dist_to_thermal");
    const auto last = fields(lines.back());
    EXPECT_EQ(last[0], 30.0);
    EXPECT_NEAR(last[3], -0.5, 1e-12);
    EXPECT_NEAR(last[4], 0.5, 1e-12);
    EXPECT_NEAR(last[5], temperature_from_g(0.5), 1e-9);
    EXPECT_LT(last[6], 1e-6);
    EXPECT_EQ(fields(lines[2])[0], 10.0);
}

TEST(Thermalize, ZeroTimeSingleRow) {
    const auto r = run_cli({"thermalize", "--t-max", "0", "--r0", "0.1,0.2,0.3"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 2u);
    const auto row = fields(lines[1]);
    EXPECT_EQ(row[0], 0.0);
    EXPECT_EQ(row[1], 0.1);
    EXPECT_EQ(row[2], 0.2);
    EXPECT_EQ(row[3], 0.3);
}

TEST(Thermalize, TemperatureFlag) {
    const auto r = run_cli({"thermalize", "--temperature", "inf", "--samples", "2", "--t-max", "40"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NEAR(fields(lines_of(r.out).back())[3], 0.0, 1e-15);
}

TEST(Thermalize, BadGNamesFlag) {
    const auto r = run_cli({"thermalize", "--g", "1.5"});
    EXPECT_NE(r.code, kExitOk);
    EXPECT_NE(r.err.find("--g"), std::string::npos);
    EXPECT_NE(run_cli({"thermalize", "--g", "abc"}).err.find("--g"), std::string::npos);
    EXPECT_EQ(run_cli({"thermalize", "--samples", "0"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"thermalize", "--r0", "1,1,0"}).code, kExitUsage);
}

TEST(Thermalize, UnwritablePath) {
    const auto r = run_cli({"thermalize", "--out", "/nonexistent-dir/x.csv"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(ChannelVerify, DefaultsPass) {
    const auto r = run_cli({"channel-verify"});
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    EXPECT_NE(r.out.find("channels equal"), std::string::npos);
}

TEST(ChannelVerify, TimeZeroIsExact) {
    const auto r = run_cli({"channel-verify", "--t", "0", "--json"});
    ASSERT_EQ(r.code, kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LT(j["choi_distance"].get<double>(), 1e-14);
    EXPECT_TRUE(j["equal"].get<bool>());
}

TEST(ChannelVerify, InjectedErrorFails) {
    const auto r = run_cli({"channel-verify", "--inject-error", "1e-3"});
    EXPECT_EQ(r.code, kExitVerification);
    EXPECT_NE(r.out.find("choi_distance"), std::string::npos);
    EXPECT_NE(r.out.find("channels differ"), std::string::npos);
}

TEST(ChannelVerify, HiddenFlagNotInHelp) {
    const auto r = run_cli({"channel-verify", "--help"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.find("inject"), std::string::npos);
}

TEST(PhaseDiagram, DegenerateGridRows) {
    const auto r = run_cli({"phase-diagram", "--grid", "2", "--g-min", "0.5", "--g-max", "0.5"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "g1,g2,T_bath_A,T_bath_B,gA_init,gB_init,gA_final,gB_final,coherA,coherB,class");
    for (std::size_t k = 2; k < 5; ++k) {
        EXPECT_EQ(lines[k], lines[1]);
    }
}

TEST(PhaseDiagram, BellEqualsPureParametrization) {
    const auto a = run_cli({"phase-diagram", "--init", "bell", "--grid", "4"});
    const auto b = run_cli({"phase-diagram", "--init", "pure:0.25pi,0.5pi,0.5pi", "--grid", "4"});
    ASSERT_EQ(a.code, kExitOk);
    ASSERT_EQ(b.code, kExitOk);
    const auto la = lines_of(a.out), lb = lines_of(b.out);
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t k = 1; k < la.size(); ++k) {
        const auto fa = fields(la[k].substr(0, la[k].rfind(','))), fb = fields(lb[k].substr(0, lb[k].rfind(',')));
        for (std::size_t i = 0; i < fa.size(); ++i) {
            EXPECT_NEAR(fa[i], fb[i], 1e-12);
        }
        EXPECT_EQ(la[k].substr(la[k].rfind(',')), lb[k].substr(lb[k].rfind(',')));
    }
}

TEST(PhaseDiagram, ClassTokensAndDeterminism) {
    const auto dir = scratch_dir();
    const std::vector<std::string> base{"phase-diagram", "--init", "thermal:0.1,0.1", "--grid", "5", "--gamma3", "0"};
    auto args1 = base, args2 = base;
    args1.insert(args1.end(), {"--out", (dir / "a.csv").string(), "--threads", "1"});
    args2.insert(args2.end(), {"--out", (dir / "b.csv").string(), "--threads", "4"});
    ASSERT_EQ(run_cli(args1).code, kExitOk);
    ASSERT_EQ(run_cli(args2).code, kExitOk);
    const auto a = slurp(dir / "a.csv"), b = slurp(dir / "b.csv");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.find('\r'), std::string::npos);
    const std::vector<std::string> tokens{"both_cool", "a_cool_b_heat", "a_heat_b_cool", "both_heat", "anomalous"};
    const auto lines = lines_of(a);
    ASSERT_EQ(lines.size(), 26u);
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto cls = lines[k].substr(lines[k].rfind(',') + 1);
        EXPECT_NE(std::find(tokens.begin(), tokens.end(), cls), tokens.end()) << cls;
    }
    fs::remove_all(dir);
}

TEST(PhaseDiagram, PpmLayout) {
    const auto dir = scratch_dir();
    const auto ppm = dir / "map.ppm";
    const auto r = run_cli({"phase-diagram", "--init", "thermal:0.4,0.4", "--gamma3", "0", "--grid", "3", "--g-min",
                            "0.1", "--g-max", "0.7", "--ppm", ppm.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::string img = slurp(ppm);
    const std::string header = "P6\n3 3\n255\n";
    ASSERT_EQ(img.size(), header.size() + 27);
    EXPECT_EQ(img.substr(0, header.size()), header);
    auto pixel = [&](int row, int col) {
        const auto at = header.size() + 3 * static_cast<std::size_t>(row * 3 + col);
        return std::array<unsigned char, 3>{static_cast<unsigned char>(img[at]),
                                            static_cast<unsigned char>(img[at + 1]),
                                            static_cast<unsigned char>(img[at + 2])};
    };
    // Decoupled pairs: A cools iff g1 > 0.4, B cools iff g2 > 0.4; axis is {0.1, 0.4, 0.7}.
    EXPECT_EQ(pixel(0, 2), class_color(PhaseClass::both_cool));
    EXPECT_EQ(pixel(0, 0), class_color(PhaseClass::a_cool_b_heat));
    EXPECT_EQ(pixel(2, 2), class_color(PhaseClass::a_heat_b_cool));
    EXPECT_EQ(pixel(2, 0), class_color(PhaseClass::both_heat));
    EXPECT_EQ(pixel(1, 1), class_color(PhaseClass::anomalous));
    fs::remove_all(dir);
}

TEST(PhaseDiagram, ThermalInitHasCoolingCell) {
    const auto r = run_cli({"phase-diagram", "--init", "thermal:0.1,0.1", "--grid", "16"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(r.out.find("a_cool_b_heat") != std::string::npos ||
                r.out.find("a_heat_b_cool") != std::string::npos || r.out.find("both_cool") != std::string::npos);
}

TEST(PhaseDiagram, Validation) {
    EXPECT_EQ(run_cli({"phase-diagram", "--grid", "1"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"phase-diagram", "--init", "nope"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"phase-diagram", "--g-min", "0"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"phase-diagram", "--propagator", "magic"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"phase-diagram", "--gamma1", "-1"}).code, kExitUsage);
}

TEST(Nonmarkov, GzOneNeverIncreases) {
    const auto r = run_cli({"nonmarkov", "--gz", "1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 1002u);
    EXPECT_EQ(lines[0], "t,trace_distance,increasing");
    for (std::size_t k = 1; k < lines.size(); ++k) {
        EXPECT_EQ(lines[k].back(), '0');
    }
    EXPECT_NE(r.err.find("increase_intervals: none"), std::string::npos);
}

TEST(Nonmarkov, FirstIntervalNearQuarterPi) {
    const auto dir = scratch_dir();
    const auto r = run_cli({"nonmarkov", "--gz", "0.5", "--omega", "const:1", "--t-max", "3.2", "--out",
                            (dir / "nm.csv").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto at = r.out.find('[');
    ASSERT_NE(at, std::string::npos) << r.out;
    const auto comma = r.out.find(',', at), close = r.out.find(']', at);
    const double start = std::stod(r.out.substr(at + 1, comma - at - 1));
    const double end = std::stod(r.out.substr(comma + 1, close - comma - 1));
    const double step = 3.2 / 1000;
    EXPECT_NEAR(start, std::numbers::pi / 4, step);
    EXPECT_NEAR(end, std::numbers::pi / 2, step);
    EXPECT_EQ(lines_of(slurp(dir / "nm.csv")).size(), 1002u);
    fs::remove_all(dir);
}

TEST(Nonmarkov, ZeroGzFollowsCosine) {
    const auto r = run_cli({"nonmarkov", "--gz", "0", "--grid", "50"});
    ASSERT_EQ(r.code, kExitOk);
    const auto lines = lines_of(r.out);
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto row = fields(lines[k]);
        EXPECT_NEAR(row[1], 2.0 * std::abs(std::cos(2.0 * row[0])), 1e-14);
    }
}

TEST(Nonmarkov, TableOmega) {
    const auto dir = scratch_dir();
    {
        std::ofstream table(dir / "omega.csv");
        table << "t,omega\n0,1\n2,1\n4,1\n";
    }
    const auto a = run_cli({"nonmarkov", "--omega", "table:" + (dir / "omega.csv").string(), "--t-max", "3"});
    const auto b = run_cli({"nonmarkov", "--omega", "const:1", "--t-max", "3"});
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(run_cli({"nonmarkov", "--omega", "table:" + (dir / "omega.csv").string(), "--t-max", "5"}).code,
              kExitUsage);
    fs::remove_all(dir);
}

TEST(Nonmarkov, Validation) {
    EXPECT_EQ(run_cli({"nonmarkov", "--gz", "1.5"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"nonmarkov", "--omega", "sin:1"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"nonmarkov", "--grid", "1"}).code, kExitUsage);
}

TEST(Usage, ParseErrors) {
    EXPECT_EQ(run_cli({}).code, kExitUsage);
    EXPECT_EQ(run_cli({"bogus"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"thermalize", "--nope", "1"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

#ifdef QTHERMO_CLI_PATH
int run_binary(const std::string &args) {
    const std::string cmd = std::string("\"") + QTHERMO_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(run_binary("channel-verify"), 0);
    EXPECT_EQ(run_binary("channel-verify --inject-error 0.01"), 2);
    EXPECT_EQ(run_binary("thermalize --g 1.5"), 1);
    EXPECT_EQ(run_binary("nonmarkov --gz 1"), 0);
    EXPECT_EQ(run_binary(""), 1);
}
#endif

} // namespace
} // namespace qthermo::cli
