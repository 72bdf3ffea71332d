// Drives the built pnes executable as a subprocess.

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string("\"") + PNES_CLI_PATH + "\" " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "pnes_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#')
            out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("cli exit codes")
{
    CHECK(run("validate").status == 0);
    CHECK(run("validate --mutate-amplitude-sign").status == 1);
    CHECK(run("").status == 2);
    CHECK(run("capacity --eta 1.5").status == 2);
    CHECK(run("capacity --state qubit").status == 2);
    CHECK(run("capacity --threshold -1").status == 2);
    CHECK(run("capacity --format xml").status == 2);
    CHECK(run("sweep-energy --mean 2,1").status == 2);
    CHECK(run("sweep-noise --config /nonexistent/pnes.json").status == 2);
    CHECK(run("kernel --eta 0.5 --mean 3").status == 2);
    CHECK(run("capacity --bogus 1").status == 2);
}

TEST_CASE("validate report")
{
    const Run ok = run("validate");
    CHECK(ok.out.find("[FAIL]") == std::string::npos);
    CHECK(ok.out.find("validation passed") != std::string::npos);
    const Run bad = run("validate --mutate-amplitude-sign");
    CHECK(bad.out.find("[FAIL]") != std::string::npos);
    CHECK(bad.out.find("validation FAILED") != std::string::npos);
}

TEST_CASE("kernel dump")
{
    SUBCASE("perfect detector gives the identity")
    {
        const Run r = run("kernel --eta 1 --noise-mean 0.3 --n-max 4");
        REQUIRE(r.status == 0);
        const auto lines = data_lines(r.out);
        REQUIRE(lines.size() == 6);
        CHECK(lines[0] == "s,n0,n1,n2,n3,n4");
        CHECK(lines[1] == "0,1,0,0,0,0");
        CHECK(lines[3] == "2,0,0,1,0,0");
        CHECK(lines[5] == "4,0,0,0,0,1");
    }
    SUBCASE("noiseless loss gives the binomial matrix")
    {
        const Run r = run("kernel --eta 0.7 --noise-mean 0 --n-max 3");
        REQUIRE(r.status == 0);
        const auto lines = data_lines(r.out);
        REQUIRE(lines.size() == 5);
        // row s = 1: C(n,1) 0.7 0.3^(n-1)
        std::istringstream row(lines[2]);
        std::vector<double> v;
        for (std::string f; std::getline(row, f, ',');)
            v.push_back(std::stod(f));
        REQUIRE(v.size() == 5);
        CHECK(v[1] == 0.0);
        CHECK(v[2] == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(v[3] == doctest::Approx(2 * 0.7 * 0.3).epsilon(1e-12));
        CHECK(v[4] == doctest::Approx(3 * 0.7 * 0.09).epsilon(1e-12));
    }
    SUBCASE("thermal columns are normalized")
    {
        const Run r = run("kernel --eta 0.5 --noise-stat thermal --noise-mean 0.2 --n-max 6 --tol 1e-10");
        REQUIRE(r.status == 0);
        const auto lines = data_lines(r.out);
        std::vector<double> sums(7, 0.0);
        for (std::size_t i = 1; i < lines.size(); ++i) {
            std::istringstream row(lines[i]);
            std::string f;
            std::getline(row, f, ',');
            for (std::size_t n = 0; std::getline(row, f, ','); ++n)
                sums.at(n) += std::stod(f);
        }
        for (double s : sums)
            CHECK(std::abs(s - 1.0) < 1e-10);
    }
}

TEST_CASE("output file and formats")
{
    const fs::path csv = scratch("cap.csv");
    fs::remove(csv);
    const Run r = run("capacity --state twb --mean 5 --eta 0.9 --noise-stat poisson --out " + csv.string());
    REQUIRE(r.status == 0);
    CHECK(r.out.empty());
    const std::string text = slurp(csv);
    CHECK(text.rfind("family,signal_mean,eta,noise_mean,noise_stat,capacity_bits,optimal_T,tail_mass\n", 0) == 0);
    CHECK(data_lines(text).size() == 2);

    const Run j = run("capacity --state tmc --mean 1,2 --eta 0.7 --noise-stat thermal --format json");
    REQUIRE(j.status == 0);
    const nlohmann::json doc = nlohmann::json::parse(j.out);
    CHECK(doc.at("meta").at("tool") == "pnes");
    CHECK(doc.at("rows").size() == 2);
    CHECK(doc.at("rows")[1].at("signal_mean").get<double>() == 2.0);
}

TEST_CASE("config file with flag precedence")
{
    const fs::path cfg = scratch("noise.json");
    {
        std::ofstream out(cfg);
        out << R"({"state": "twb", "eta": [0.5, 0.9], "noise_mean": [0, 1], "noise_stat": "poisson", "mean": 3})";
    }
    const Run from_file = run("sweep-noise --config " + cfg.string());
    REQUIRE(from_file.status == 0);
    auto lines = data_lines(from_file.out);
    REQUIRE(lines.size() == 5);
    CHECK(lines[1].rfind("twb,3,0.5,0,poisson,", 0) == 0);
    CHECK(lines[4].rfind("twb,3,0.9,1,poisson,", 0) == 0);

    const Run overridden = run("sweep-noise --config " + cfg.string() + " --eta 0.7 --mean 5");
    REQUIRE(overridden.status == 0);
    lines = data_lines(overridden.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].rfind("twb,5,0.7,0,poisson,", 0) == 0);

    const fs::path broken = scratch("broken.json");
    {
        std::ofstream out(broken);
        out << "{\"eta\": ";
    }
    CHECK(run("sweep-noise --config " + broken.string()).status == 2);
}

TEST_CASE("repeated runs are byte-identical")
{
    const std::string args = "sweep-energy --mean 0.5,5 --eta 0.5,0.9";
    const Run a = run(args);
    const Run b = run(args + " --jobs 2");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == run(args).out);
}
