// Drives the mkdv-lab binary end to end.

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run lab(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(MKDV_LAB_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mkdv_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::size_t entries() const { return static_cast<std::size_t>(std::distance(fs::directory_iterator(path), {})); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Numeric rows of a CSV (comment and header lines skipped).
std::vector<std::vector<std::string>> rows(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

}  // namespace

TEST_CASE("help on every subcommand") {
    CHECK(lab("--help").code == 0);
    for (const char* sub : {"eval", "verify", "norms", "inflate", "expsum"}) {
        const Run r = lab(std::string(sub) + " --help");
        CHECK(r.code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
    CHECK(lab("bogus").code == 2);
    CHECK(lab("").code == 2);
}

TEST_CASE("eval: one soliton") {
    TempDir d;
    const Run r = lab("eval --sy 1 --t 2.0 --x-range -20:20:0.1 -o " + d.file("u.csv"));
    REQUIRE(r.code == 0);
    const auto rs = rows(slurp(d.file("u.csv")));
    CHECK(rs.size() == 401);
    double worst = 0;
    for (const auto& row : rs) {
        CHECK(std::stod(row[0]) == 2.0);
        const double x = std::stod(row[1]);
        worst = std::max(worst, std::abs(std::stod(row[2]) + 1.0 / std::cosh(x - 2.0)));
    }
    CHECK(worst < 1e-12);
    CHECK(d.entries() == 1);
}

TEST_CASE("eval: three-soliton initial data") {
    const Run r = lab("eval --sy 3 --t 0 -o -");
    REQUIRE(r.code == 0);
    double worst = 0;
    for (const auto& row : rows(r.out)) {
        const double x = std::stod(row[1]);
        worst = std::max(worst, std::abs(std::stod(row[2]) + 3.0 / std::cosh(x)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("eval: missing or unusable output leaves no files") {
    TempDir d;
    CHECK(lab("eval --sy 2 --t 1").code == 2);
    CHECK(lab("eval --sy 2 --t 1 -o " + d.file("missing/u.csv")).code == 2);
    CHECK(lab("eval --sy 2 --t 1 -o " + d.path.string()).code == 2);
    CHECK(lab("eval --sy 2 --t 1 --x-range 3:1:0.1 -o " + d.file("u.csv")).code == 2);
    CHECK(d.entries() == 0);
}

TEST_CASE("config files") {
    TempDir d;
    {
        std::ofstream(d.file("bad.json")) << R"({"schema_version": 2, "sy": 1})";
        std::ofstream(d.file("typo.json")) << R"({"schema_version": 1, "sy": 1, "tee": [1]})";
        std::ofstream(d.file("broken.json")) << "{";
        std::ofstream(d.file("ok.json")) << R"({"schema_version": 1, "command": "eval", "sy": 1, "t": [0.5], "x_range": "0:1:0.5"})";
    }
    CHECK(lab("eval --config " + d.file("bad.json") + " -o -").code == 2);
    CHECK(lab("eval --config " + d.file("typo.json") + " -o -").code == 2);
    CHECK(lab("eval --config " + d.file("broken.json") + " -o -").code == 2);
    CHECK(lab("eval --config " + d.file("nothere.json") + " -o -").code == 2);
    CHECK(lab("verify --config " + d.file("ok.json") + " -o -").code == 2);
    const Run ok = lab("eval --config " + d.file("ok.json") + " -o -");
    REQUIRE(ok.code == 0);
    const auto rs = rows(ok.out);
    REQUIRE(rs.size() == 3);
    CHECK(std::stod(rs[1][2]) == doctest::Approx(-1.0 / std::cosh(0.0)).epsilon(1e-12));
    // command-line flags win over the config
    const Run over = lab("eval --config " + d.file("ok.json") + " --t 0 -o -");
    REQUIRE(over.code == 0);
    CHECK(std::stod(rows(over.out)[0][0]) == 0.0);
}

TEST_CASE("verify: pass, determinism and the corruption hook") {
    TempDir d;
    REQUIRE(lab("verify -o " + d.file("a.json")).code == 0);
    REQUIRE(lab("verify -o " + d.file("b.json"), "MKDV_THREADS=1").code == 0);
    CHECK(slurp(d.file("a.json")) == slurp(d.file("b.json")));
    CHECK(slurp(d.file("a.json")).find("\"passed\": true") != std::string::npos);

    std::ofstream(d.file("hook.json")) << R"({"schema_version": 1, "test_hooks": {"corrupt_shift": 0.5}})";
    const Run bad = lab("verify --config " + d.file("hook.json") + " -o " + d.file("c.json"));
    CHECK(bad.code == 1);
    const std::string report = slurp(d.file("c.json"));
    const auto at = report.find("\"shift_consistency\"");
    REQUIRE(at != std::string::npos);
    CHECK(report.find("\"passed\": false", at) != std::string::npos);
}

TEST_CASE("norms") {
    const Run r = lab("norms --sy 2 --t 0 --p 2 --s 0 -o -");
    REQUIRE(r.code == 0);
    const auto rs = rows(r.out);
    REQUIRE(rs.size() == 1);
    CHECK(std::stod(rs[0].back()) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-10));

    const Run scaled = lab("norms --sy 4 --lambda 16 --t 0 --p 2 --s 0 -o -");
    REQUIRE(scaled.code == 0);
    CHECK(std::stod(rows(scaled.out)[0].back()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

    const Run fft = lab("norms --sy 2 --t 0.3,0.6 --p 2 --s 0 -o -");
    REQUIRE(fft.code == 0);
    for (const auto& row : rows(fft.out)) CHECK(std::stod(row.back()) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-6).scale(0));

    const Run mod = lab("norms --sy 1 --t 0 --p 2 --s 0 --kind modulation -o -");
    REQUIRE(mod.code == 0);
    CHECK(std::stod(rows(mod.out)[0].back()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));

    CHECK(lab("norms --sy 2 --t 0 --p 0.5 -o -").code == 2);
    CHECK(lab("norms --sy 2 --t 0 --kind nope -o -").code == 2);
}

TEST_CASE("inflate writes results, series and summary") {
    TempDir d;
    const Run r = lab("inflate --preset p6 --output-dir " + d.path.string());
    REQUIRE(r.code == 0);
    for (const char* f : {"inflation_p6_s0.csv", "inflation_p6_s0.json", "inflation_p6_s0_series.csv",
                          "inflation_summary.json"})
        CHECK(fs::exists(d.path / f));
    const std::string json = slurp(d.file("inflation_p6_s0.json"));
    CHECK(json.find("\"scaled_final\"") != std::string::npos);
    CHECK(json.find("\"reversed\"") != std::string::npos);
    CHECK(rows(slurp(d.file("inflation_p6_s0.csv"))).size() == 7);

    TempDir e;
    REQUIRE(lab("inflate --preset p6 --output-dir " + e.path.string()).code == 0);
    CHECK(slurp(d.file("inflation_p6_s0.csv")) == slurp(e.file("inflation_p6_s0.csv")));

    CHECK(lab("inflate --preset p6").code == 2);
    CHECK(lab("inflate --preset nope --output-dir " + d.path.string()).code == 2);
    CHECK(lab("inflate --preset p6 --output-dir " + d.file("missing")).code == 2);

    std::ofstream(d.file("sched.json")) << R"({"schema_version": 1, "p": 1, "s": 0, "N_list": [1, 2], "lambda_sign": -1})";
    TempDir f;
    CHECK(lab("inflate --schedule " + d.file("sched.json") + " --output-dir " + f.path.string()).code == 3);
}

TEST_CASE("expsum") {
    const Run r = lab("expsum --N-list 4,8,16 --p 2 -o -");
    REQUIRE(r.code == 0);
    for (const auto& row : rows(r.out)) CHECK(std::stod(row[5]) == doctest::Approx(2 * M_PI).epsilon(1e-10));
    CHECK(r.out.find("# slope") != std::string::npos);
    CHECK(lab("expsum --N-list 4 --points-factor 8 -o -").code == 2);
    const Run a = lab("expsum --N-list 4,8 --p 6 --coeffs random --seed 3 -o -");
    const Run b = lab("expsum --N-list 4,8 --p 6 --coeffs random --seed 3 -o -");
    CHECK(a.out == b.out);
}
