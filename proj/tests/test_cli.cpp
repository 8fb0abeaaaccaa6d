#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("plsh_cli_" + name);
}

RunResult run_cli(const std::string& args, const std::string& tag) {
    const fs::path out = temp_file("stdout_" + tag + ".txt");
    const std::string cmd =
        std::string(PLSH_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::stringstream buffer;
    buffer << in.rdbuf();
    result.stdout_text = buffer.str();
    fs::remove(out);
    return result;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

// CSV contents with the wall-clock column blanked; wall_ms is the one
// legitimately run-dependent field.
std::string csv_without_wall(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string text, line;
    while (std::getline(in, line)) {
        const auto last_comma = line.rfind(',');
        text += line.substr(0, last_comma);
        text += '\n';
    }
    return text;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("", "noargs").exit_code == 2);
    CHECK(run_cli("unknown-subcommand", "unknown").exit_code == 2);
    CHECK(run_cli("collision-check --trials 10", "nosigma").exit_code == 2);
    CHECK(run_cli("collision-check --sigma 8 --bogus-flag 1", "bogus").exit_code == 2);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help", "help").exit_code == 0);
}

TEST_CASE("collision-check reports analytic values and passes") {
    const RunResult r =
        run_cli("collision-check --sigma 8 --trials 100000 --seed 1 --pairs 0:8,5:5", "cc");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("analytic=0.36787944117144233") != std::string::npos);
    CHECK(r.stdout_text.find("pair=5:5 analytic=1 empirical=1") != std::string::npos);
    CHECK(r.stdout_text.find("all_pass=1") != std::string::npos);
}

TEST_CASE("sample-masks dumps one boundary list per sample, deterministically") {
    const std::string args = "sample-masks --sigma 8 --n 64 --s 3 --seed 9";
    const RunResult a = run_cli(args, "masks_a");
    const RunResult b = run_cli(args, "masks_b");
    CHECK(a.exit_code == 0);
    CHECK(a.stdout_text == b.stdout_text);
    const auto lines = split_lines(a.stdout_text);
    REQUIRE(lines.size() == 3);
    for (const auto& line : lines) {
        CHECK(line.rfind("0,", 0) == 0);
        CHECK(line.substr(line.rfind(',') + 1) == "64");
    }
}

TEST_CASE("convergence writes the exact CSV header and is byte-stable") {
    const fs::path csv_a = temp_file("conv_a.csv");
    const fs::path csv_b = temp_file("conv_b.csv");
    const std::string base =
        "convergence --n 16 --d 3 --d-prime 3 --sigma-list 8 --s-list 4 --seeds 1 --output ";
    CHECK(run_cli(base + csv_a.string(), "conv_a").exit_code == 0);
    CHECK(run_cli(base + csv_b.string(), "conv_b").exit_code == 0);

    const auto lines = split_lines(csv_without_wall(csv_a));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "seed,n,sigma,s,res_spec,res_max,output_err,beta_star,p_two_inf,d_tilde_min,b_max,"
          "block_flop_units");
    CHECK(csv_without_wall(csv_a) == csv_without_wall(csv_b));
    fs::remove(csv_a);
    fs::remove(csv_b);
}

TEST_CASE("convergence sweep covers the full panel grid") {
    const fs::path csv = temp_file("conv_grid.csv");
    const RunResult r = run_cli(
        "convergence --n 12 --d 2 --d-prime 2 --sigma-list 2,8,32,128 --s-list 1,4,16 "
        "--seeds 1,2 --output " +
            csv.string(),
        "grid");
    CHECK(r.exit_code == 0);
    const auto lines = split_lines(csv_without_wall(csv));
    CHECK(lines.size() == 1 + 4 * 3 * 2);
    fs::remove(csv);
}

TEST_CASE("inject-fault drives the audit-failure exit code") {
    const fs::path csv = temp_file("conv_fault.csv");
    const RunResult r = run_cli(
        "convergence --n 8 --d 2 --d-prime 2 --sigma-list 4 --s-list 2 --seeds 1 "
        "--inject-fault --output " +
            csv.string(),
        "fault");
    CHECK(r.exit_code == 1);
    fs::remove(csv);
}

TEST_CASE("config file values apply and CLI flags win") {
    const fs::path cfg = temp_file("sweep_config.txt");
    const fs::path csv = temp_file("conv_cfg.csv");
    {
        std::ofstream out(cfg);
        out << "n = 8\nd = 2\nd_prime = 2\nsigma_list = 4\ns_list = 2\nseeds = 1\n"
            << "output_path = " << csv.string() << "\n";
    }
    CHECK(run_cli("convergence --config " + cfg.string() + " --n 4", "cfg").exit_code == 0);
    const auto lines = split_lines(csv_without_wall(csv));
    REQUIRE(lines.size() == 2);
    CHECK(lines[1].rfind("1,4,4,2,", 0) == 0);  // n overridden to 4
    fs::remove(cfg);
    fs::remove(csv);
}

TEST_CASE("blocksize-tail prints one summary per cell") {
    const RunResult r = run_cli(
        "blocksize-tail --n 64 --sigma-list 0.1 --s-list 1 --delta 0.01 --seed-count 20",
        "tail");
    CHECK(r.exit_code == 0);
    const auto lines = split_lines(r.stdout_text);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].find("sigma=0.1 s=1 delta=0.01") == 0);
    CHECK(lines[0].find("exceed_count=0") != std::string::npos);
}

TEST_CASE("attention-compare on a single token reports zero error") {
    const RunResult r =
        run_cli("attention-compare --n 1 --d 2 --d-prime 2 --sigma 8 --s 4 --seed 1", "one");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("output_err=0\n") != std::string::npos);
    CHECK(r.stdout_text.find("pass=1") != std::string::npos);
}

TEST_CASE("attention-compare unbiased limit with a forced single block") {
    const RunResult r = run_cli(
        "attention-compare --n 24 --d 4 --d-prime 4 --sigma 1e9 --seed 2 --force-single-block",
        "limit");
    CHECK(r.exit_code == 0);
    const auto lines = split_lines(r.stdout_text);
    double output_err = -1.0;
    for (const auto& line : lines)
        if (line.rfind("output_err=", 0) == 0) output_err = std::stod(line.substr(11));
    CHECK(output_err >= 0.0);
    CHECK(output_err <= 1e-6);
}

TEST_CASE("attention-compare default seeded run passes its audit") {
    const RunResult r = run_cli("attention-compare --seed 7 --causal", "default");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("bound_holds=1") != std::string::npos);
}

TEST_CASE("gen-qkv writes matrices that attention-compare accepts") {
    const fs::path prefix = temp_file("gen");
    const RunResult gen = run_cli(
        "gen-qkv --n 12 --d 3 --d-prime 3 --seed 5 --scale 1 --out " + prefix.string(), "gen");
    CHECK(gen.exit_code == 0);
    for (const char* suffix : {"_q.txt", "_k.txt", "_v.txt"}) {
        std::ifstream in(prefix.string() + suffix);
        CHECK(in.good());
        std::string header;
        std::getline(in, header);
        CHECK((header == "12,3"));
    }
    const RunResult cmp = run_cli("attention-compare --q " + prefix.string() + "_q.txt --k " +
                                      prefix.string() + "_k.txt --v " + prefix.string() +
                                      "_v.txt --sigma 8 --s 8 --seed 5",
                                  "cmp_files");
    CHECK(cmp.exit_code == 0);

    // Malformed matrix file: usage/I/O error with the line number.
    {
        std::ofstream out(prefix.string() + "_q.txt");
        out << "2,2\n1.0,2.0\nnot,numbers\n";
    }
    const RunResult bad = run_cli("attention-compare --q " + prefix.string() + "_q.txt --k " +
                                      prefix.string() + "_k.txt --v " + prefix.string() +
                                      "_v.txt --sigma 8 --s 8 --seed 5",
                                  "cmp_bad");
    CHECK(bad.exit_code == 2);
    CHECK(bad.stdout_text.find("line 3") != std::string::npos);
    for (const char* suffix : {"_q.txt", "_k.txt", "_v.txt"})
        fs::remove(prefix.string() + suffix);
}
