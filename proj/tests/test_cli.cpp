// Drives the installed mphb binary end to end. The binary path arrives in
// the MPHB_BIN environment variable (set by the test harness).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* env = std::getenv("MPHB_BIN");
    REQUIRE_MESSAGE(env != nullptr, "MPHB_BIN must point at the mphb binary");
    return env;
}

fs::path scratch() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("mphb-cli-test-" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct Result {
    int exit_code;
    std::string output;
};

// Runs a shell command, capturing stdout and stderr together.
Result run(const std::string& command) {
    const fs::path out = scratch() / "out.txt";
    const fs::path err = scratch() / "err.txt";
    const std::string full = command + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(full.c_str());
    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream text;
        text << in.rdbuf();
        return text.str();
    };
    return {WEXITSTATUS(status), slurp(out) + slurp(err)};
}

void write_keys(const fs::path& path, const std::vector<std::string>& keys) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& key : keys) out << key << '\n';
}

std::string field(const std::string& text, const std::string& name) {
    const auto pos = text.find(name + "=");
    REQUIRE(pos != std::string::npos);
    const auto start = pos + name.size() + 1;
    auto end = text.find_first_of(" \n", start);
    return text.substr(start, end - start);
}

}  // namespace

TEST_CASE("build then verify passes") {
    const auto keys = mphb::test::random_keys(5000, 1001);
    const fs::path key_file = scratch() / "keys.txt";
    const fs::path image = scratch() / "f.mphb";
    write_keys(key_file, keys);

    auto built = run(binary() + " build --input " + key_file.string() + " --output " +
                     image.string() + " --seed 5");
    CHECK(built.exit_code == 0);
    CHECK(built.output.find("MPHB n=5000") != std::string::npos);
    CHECK(field(built.output, "mode") == "mphf");

    auto verified = run(binary() + " verify --function " + image.string() + " --input " +
                        key_file.string());
    CHECK(verified.exit_code == 0);
    CHECK(verified.output.find("PASS") == 0);
}

TEST_CASE("query prints one value per stdin line") {
    const std::vector<std::string> keys = {"alpha", "beta", "gamma", "delta"};
    const fs::path key_file = scratch() / "qkeys.txt";
    const fs::path image = scratch() / "q.mphb";
    write_keys(key_file, keys);

    REQUIRE(run(binary() + " build --input " + key_file.string() + " --output " + image.string())
                .exit_code == 0);

    auto queried = run("cat " + key_file.string() + " | " + binary() + " query --function " +
                       image.string());
    CHECK(queried.exit_code == 0);
    std::istringstream lines(queried.output);
    std::vector<int> values;
    std::string line;
    while (std::getline(lines, line)) values.push_back(std::stoi(line));
    REQUIRE(values.size() == 4);
    std::sort(values.begin(), values.end());
    for (int i = 0; i < 4; ++i) CHECK(values[i] == i);

    // Unknown keys still print an in-range value and exit zero.
    auto unknown = run("echo unknown-key | " + binary() + " query --function " + image.string());
    CHECK(unknown.exit_code == 0);
    CHECK(std::stoi(unknown.output) >= 0);
    CHECK(std::stoi(unknown.output) < 4);
}

TEST_CASE("duplicate keys exit 2 and name the lines") {
    auto keys = mphb::test::random_keys(100, 1002);
    keys[60] = keys[10];
    const fs::path key_file = scratch() / "dup.txt";
    const fs::path image = scratch() / "dup.mphb";
    write_keys(key_file, keys);

    auto built = run(binary() + " build --input " + key_file.string() + " --output " +
                     image.string());
    CHECK(built.exit_code == 2);
    CHECK(built.output.find("duplicate") != std::string::npos);
    CHECK(built.output.find("11") != std::string::npos);
    CHECK(built.output.find("61") != std::string::npos);
}

TEST_CASE("memory below the floor exits 1 and states the floor") {
    const auto keys = mphb::test::random_keys(10, 1003);
    const fs::path key_file = scratch() / "floor.txt";
    write_keys(key_file, keys);
    auto built = run(binary() + " build --input " + key_file.string() + " --output " +
                     (scratch() / "floor.mphb").string() + " --memory 1000");
    CHECK(built.exit_code == 1);
    CHECK(built.output.find("1048576") != std::string::npos);
}

TEST_CASE("verify fails against the wrong key file") {
    const auto keys = mphb::test::random_keys(1000, 1004);
    const auto other = mphb::test::random_keys(1000, 9999, 33, 48);
    const fs::path key_file = scratch() / "right.txt";
    const fs::path other_file = scratch() / "wrong.txt";
    const fs::path image = scratch() / "v.mphb";
    write_keys(key_file, keys);
    write_keys(other_file, other);

    REQUIRE(run(binary() + " build --input " + key_file.string() + " --output " + image.string())
                .exit_code == 0);
    auto verified = run(binary() + " verify --function " + image.string() + " --input " +
                        other_file.string());
    CHECK(verified.exit_code == 3);
    CHECK(verified.output.find("FAIL") != std::string::npos);
}

TEST_CASE("verify rejects a mode mismatch explicitly") {
    const auto keys = mphb::test::random_keys(500, 1005);
    const fs::path key_file = scratch() / "mode.txt";
    const fs::path image = scratch() / "mode.mphb";
    write_keys(key_file, keys);
    REQUIRE(run(binary() + " build --input " + key_file.string() + " --output " + image.string() +
                " --mode phf")
                .exit_code == 0);
    auto verified = run(binary() + " verify --function " + image.string() + " --input " +
                        key_file.string() + " --mode mphf");
    CHECK(verified.exit_code == 1);
    CHECK(verified.output.find("phf") != std::string::npos);

    // Without the expectation flag the PHF image verifies on its own terms.
    auto ok = run(binary() + " verify --function " + image.string() + " --input " +
                  key_file.string());
    CHECK(ok.exit_code == 0);
}

TEST_CASE("identical seeds and inputs give byte-identical images across memory budgets") {
    const auto keys = mphb::test::random_keys(30000, 1006);
    const fs::path key_file = scratch() / "det.txt";
    const fs::path image_a = scratch() / "det-a.mphb";
    const fs::path image_b = scratch() / "det-b.mphb";
    write_keys(key_file, keys);

    REQUIRE(run(binary() + " build --input " + key_file.string() + " --output " +
                image_a.string() + " --seed 42 --memory 1M")
                .exit_code == 0);
    REQUIRE(run(binary() + " build --input " + key_file.string() + " --output " +
                image_b.string() + " --seed 42 --memory 64M")
                .exit_code == 0);

    std::stringstream a, b;
    a << std::ifstream(image_a, std::ios::binary).rdbuf();
    b << std::ifstream(image_b, std::ios::binary).rdbuf();
    CHECK(a.str() == b.str());
    CHECK_FALSE(a.str().empty());
}

TEST_CASE("bench emits the documented CSV schema") {
    const auto keys = mphb::test::random_keys(30000, 1007);
    const fs::path key_file = scratch() / "bench.txt";
    write_keys(key_file, keys);

    auto bench = run(binary() + " bench --input " + key_file.string() +
                     " --sizes 10K,20K --trials 2 --seed 3");
    CHECK(bench.exit_code == 0);
    std::istringstream lines(bench.output);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "n,trial,partition_s,search_s,total_s,bits_per_key,mean_attempts,acyclic_rate");
    int rows = 0;
    int summaries = 0;
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            ++summaries;
            CHECK(line.find("sd_total_s=") != std::string::npos);
        } else {
            ++rows;
            CHECK(std::count(line.begin(), line.end(), ',') == 7);
        }
    }
    CHECK(rows == 4);
    CHECK(summaries == 2);

    // Requesting more keys than the input holds is an error.
    auto too_big = run(binary() + " bench --input " + key_file.string() + " --sizes 1M");
    CHECK(too_big.exit_code == 1);
}

TEST_CASE("keep-spills leaves run files in the workdir") {
    const auto keys = mphb::test::random_keys(100000, 1008);
    const fs::path key_file = scratch() / "spill.txt";
    const fs::path image = scratch() / "spill.mphb";
    const fs::path workdir = scratch() / "work";
    write_keys(key_file, keys);

    REQUIRE(run(binary() + " build --input " + key_file.string() + " --output " + image.string() +
                " --memory 1M --workdir " + workdir.string() + " --keep-spills")
                .exit_code == 0);
    CHECK(fs::exists(workdir / "run-1.spill"));

    fs::remove_all(workdir);
}
