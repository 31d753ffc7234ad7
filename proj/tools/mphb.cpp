// mphb: build, query, verify and benchmark perfect hash functions over
// newline-delimited key files.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mphb/codec.hpp"
#include "mphb/errors.hpp"
#include "mphb/external_build.hpp"

namespace {

using namespace mphb;

// Exit codes shared by all subcommands.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;       // I/O, format or configuration failure
constexpr int kExitDuplicates = 2;  // duplicate keys survived every restart
constexpr int kExitVerifyFail = 3;

struct CommonOptions {
    std::string input;
    std::string output;
    std::string mode = "mphf";
    std::string provider = "provable";
    uint64_t memory = 200ull << 20;
    std::string bucket_bits = "auto";
    double epsilon = 0.045;
    uint32_t kappa = 128;
    uint32_t max_key_bytes = 65;
    std::string workdir;
    uint64_t seed = 1;
    bool keep_spills = false;
};

void add_build_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--mode", opt.mode, "Function mode")
        ->check(CLI::IsMember({"mphf", "phf"}))
        ->capture_default_str();
    cmd->add_option("--provider", opt.provider, "Hash provider")
        ->check(CLI::IsMember({"provable", "heuristic"}))
        ->capture_default_str();
    cmd->add_option("--memory", opt.memory,
                    "Fingerprint buffer budget in bytes (suffixes K/M/G accepted)")
        ->transform(CLI::AsSizeValue(false))
        ->capture_default_str();
    cmd->add_option("--bucket-bits", opt.bucket_bits, "Bucket bits, or 'auto'")
        ->capture_default_str();
    cmd->add_option("--epsilon", opt.epsilon, "Graph sparsity")->capture_default_str();
    cmd->add_option("--kappa", opt.kappa, "Rank sampling interval")->capture_default_str();
    cmd->add_option("--max-key-bytes", opt.max_key_bytes,
                    "Longest fingerprintable key (provable mode)")
        ->capture_default_str();
    cmd->add_option("--workdir", opt.workdir, "Spill-file directory (default: MPHB_WORKDIR or temp)");
    cmd->add_option("--seed", opt.seed, "Build seed")->capture_default_str();
    cmd->add_flag("--keep-spills", opt.keep_spills, "Keep spill files after the build");
}

BuildConfig to_config(const CommonOptions& opt) {
    BuildConfig config;
    config.memory_budget = opt.memory;
    config.mode = opt.mode == "phf" ? FunctionMode::kPhf : FunctionMode::kMphf;
    config.provider = opt.provider == "heuristic" ? HashProviderMode::kHeuristic
                                                  : HashProviderMode::kProvable;
    if (opt.bucket_bits != "auto") {
        config.bucket_bits = static_cast<uint32_t>(std::stoul(opt.bucket_bits));
        if (config.bucket_bits == 0) throw ConfigError("--bucket-bits must be 'auto' or >= 1");
    }
    const double micro = std::llround(opt.epsilon * 1e6);
    if (micro < 1 || micro > 1e6) throw ConfigError("--epsilon must be in (0, 1]");
    config.epsilon_micro = static_cast<uint32_t>(micro);
    config.kappa = opt.kappa;
    config.max_key_bytes = opt.max_key_bytes;
    config.rng_seed = opt.seed;
    config.keep_spills = opt.keep_spills;
    if (!opt.workdir.empty()) {
        config.workdir = opt.workdir;
    } else if (const char* env = std::getenv("MPHB_WORKDIR"); env && *env) {
        config.workdir = env;
    }
    return config;
}

PerfectHashFunction load_function(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open function file " + path);
    return decode(in);
}

// Sink that discards bytes; lets encode() report sizes without touching disk.
struct NullBuffer : std::streambuf {
    int overflow(int c) override { return c; }
    std::streamsize xsputn(const char*, std::streamsize n) override { return n; }
};

struct BuildOutcome {
    BuildReport report;
    EncodeReport sizes;
};

BuildOutcome run_build(KeySource& source, const BuildConfig& config, std::ostream& sink) {
    BuildOutcome outcome;
    PerfectHashFunction function = build_external(source, config, &outcome.report);
    outcome.sizes = encode(function, sink);
    return outcome;
}

int cmd_build(const CommonOptions& opt) {
    const BuildConfig config = to_config(opt);
    FileKeySource source(opt.input);

    std::ofstream out(opt.output, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create output file " + opt.output);
    const BuildOutcome outcome = run_build(source, config, out);
    out.close();
    if (!out) throw IoError("write failure on " + opt.output);

    const BuildReport& r = outcome.report;
    std::cout.setf(std::ios::fixed);
    std::cout.precision(3);
    std::cout << "MPHB"
              << " n=" << r.key_count << " b=" << r.bucket_bits << " mode=" << opt.mode
              << " provider=" << opt.provider
              << " bits_per_key=" << outcome.sizes.bits_per_key(r.key_count)
              << " bits_per_key_total=" << outcome.sizes.bits_per_key_with_tables(r.key_count)
              << " partition_s=" << r.partition_seconds << " search_s=" << r.search_seconds
              << " total_s=" << r.partition_seconds + r.search_seconds
              << " spill_files=" << r.spill_disk_files << " seek_estimate=" << r.seek_estimate
              << " mean_attempts=" << r.mean_attempts() << " acyclic_rate=" << r.acyclic_rate()
              << " restarts=" << r.restarts << " output_bytes=" << outcome.sizes.total_bytes
              << " output=" << opt.output << "\n";
    return kExitOk;
}

int cmd_query(const std::string& function_path) {
    const PerfectHashFunction function = load_function(function_path);
    std::ios::sync_with_stdio(false);
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        try {
            std::cout << function.evaluate(line) << "\n";
        } catch (const KeyTooLongError& e) {
            throw KeyTooLongError(e.length, e.max_length, line_no);
        }
    }
    std::cout.flush();
    return kExitOk;
}

int cmd_verify(const std::string& function_path, const std::string& input,
               const std::string& expect_mode) {
    const PerfectHashFunction function = load_function(function_path);
    const char* image_mode = function.mode() == FunctionMode::kMphf ? "mphf" : "phf";
    if (!expect_mode.empty() && expect_mode != image_mode) {
        throw ConfigError("function image is " + std::string(image_mode) + ", expected " +
                          expect_mode);
    }

    const uint64_t range = function.output_range();
    std::vector<bool> seen(range, false);
    FileKeySource source(input);
    std::string_view key;
    uint64_t count = 0;
    while (source.next(key)) {
        const uint64_t v = function.evaluate(key);
        if (v >= range || seen[v]) {
            std::cout << "FAIL collision or out-of-range value " << v << " at line "
                      << source.line() << "\n";
            return kExitVerifyFail;
        }
        seen[v] = true;
        ++count;
    }
    if (count != function.key_count()) {
        std::cout << "FAIL key count " << count << " does not match the function's "
                  << function.key_count() << "\n";
        return kExitVerifyFail;
    }
    std::cout << "PASS n=" << count << " mode=" << image_mode << " range=" << range << "\n";
    return kExitOk;
}

// Key source that stops after the first `limit` keys of another source.
class LimitKeySource final : public KeySource {
  public:
    LimitKeySource(KeySource& inner, uint64_t limit) : inner_(&inner), limit_(limit) {}
    bool next(std::string_view& key) override {
        if (produced_ >= limit_) return false;
        if (!inner_->next(key)) return false;
        ++produced_;
        return true;
    }
    void reset() override {
        inner_->reset();
        produced_ = 0;
    }
    uint64_t line() const override { return inner_->line(); }

  private:
    KeySource* inner_;
    uint64_t limit_;
    uint64_t produced_ = 0;
};

std::vector<uint64_t> parse_sizes(const std::string& sizes) {
    std::vector<uint64_t> out;
    std::stringstream stream(sizes);
    std::string item;
    while (std::getline(stream, item, ',')) {
        uint64_t scale = 1;
        if (!item.empty() && (item.back() == 'M' || item.back() == 'm')) {
            scale = 1000000;
            item.pop_back();
        } else if (!item.empty() && (item.back() == 'K' || item.back() == 'k')) {
            scale = 1000;
            item.pop_back();
        }
        out.push_back(std::stoull(item) * scale);
    }
    if (out.empty()) throw ConfigError("--sizes must name at least one key count");
    return out;
}

int cmd_bench(const CommonOptions& opt, const std::string& sizes_arg, uint32_t trials) {
    const std::vector<uint64_t> sizes = parse_sizes(sizes_arg);
    FileKeySource file(opt.input);

    std::cout << "n,trial,partition_s,search_s,total_s,bits_per_key,mean_attempts,acyclic_rate\n";
    std::cout.setf(std::ios::fixed);
    std::cout.precision(4);

    for (const uint64_t n : sizes) {
        // Confirm the input covers this size before timing anything.
        {
            file.reset();
            std::string_view key;
            uint64_t available = 0;
            while (available < n && file.next(key)) ++available;
            if (available < n) {
                throw ConfigError("input has only " + std::to_string(available) +
                                  " keys, bench size " + std::to_string(n) + " needs more");
            }
        }

        std::vector<double> partition_s;
        std::vector<double> search_s;
        std::vector<double> total_s;
        std::vector<double> bits;
        std::vector<double> attempts;
        std::vector<double> acyclic;
        for (uint32_t trial = 0; trial < trials; ++trial) {
            BuildConfig config = to_config(opt);
            config.rng_seed = opt.seed + trial;
            // The key count is known, so pin the bucket bits up front and
            // keep the partition pass down to a single scan.
            if (config.bucket_bits == 0) {
                config.bucket_bits = choose_bucket_bits(n, config.max_bucket_size);
            }
            LimitKeySource source(file, n);
            source.reset();

            NullBuffer null_buffer;
            std::ostream null_stream(&null_buffer);
            const BuildOutcome outcome = run_build(source, config, null_stream);

            const BuildReport& r = outcome.report;
            const double total = r.partition_seconds + r.search_seconds;
            std::cout << n << "," << trial << "," << r.partition_seconds << ","
                      << r.search_seconds << "," << total << ","
                      << outcome.sizes.bits_per_key(r.key_count) << "," << r.mean_attempts()
                      << "," << r.acyclic_rate() << "\n";
            partition_s.push_back(r.partition_seconds);
            search_s.push_back(r.search_seconds);
            total_s.push_back(total);
            bits.push_back(outcome.sizes.bits_per_key(r.key_count));
            attempts.push_back(r.mean_attempts());
            acyclic.push_back(r.acyclic_rate());
        }

        auto mean = [](const std::vector<double>& v) {
            return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
        };
        auto stddev = [&](const std::vector<double>& v) {
            if (v.size() < 2) return 0.0;
            const double m = mean(v);
            double acc = 0;
            for (double x : v) acc += (x - m) * (x - m);
            return std::sqrt(acc / double(v.size() - 1));
        };
        std::cout << "# n=" << n << " mean_partition_s=" << mean(partition_s)
                  << " mean_search_s=" << mean(search_s) << " mean_total_s=" << mean(total_s)
                  << " sd_total_s=" << stddev(total_s) << " mean_bits_per_key=" << mean(bits)
                  << " mean_attempts=" << mean(attempts) << " acyclic_rate=" << mean(acyclic)
                  << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perfect and minimal perfect hash functions for large static key sets"};
    app.require_subcommand(1);

    CommonOptions opt;

    auto* build = app.add_subcommand("build", "Build a function from a key file");
    build->add_option("--input", opt.input, "Newline-delimited key file")->required();
    build->add_option("--output", opt.output, "Function image path")->required();
    add_build_options(build, opt);

    std::string function_path;
    auto* query = app.add_subcommand("query", "Print the hash of each stdin line");
    query->add_option("--function", function_path, "Function image")->required();

    std::string verify_input;
    std::string verify_mode;
    auto* verify = app.add_subcommand("verify", "Check a function against its key file");
    verify->add_option("--function", function_path, "Function image")->required();
    verify->add_option("--input", verify_input, "Key file used at build time")->required();
    verify->add_option("--mode", verify_mode, "Fail unless the image has this mode")
        ->check(CLI::IsMember({"mphf", "phf"}));

    std::string sizes;
    uint32_t trials = 1;
    auto* bench = app.add_subcommand("bench", "Timed builds over increasing key counts, CSV output");
    bench->add_option("--input", opt.input, "Key file with enough keys for the largest size")
        ->required();
    bench->add_option("--sizes", sizes, "Comma-separated key counts (K/M suffixes allowed)")
        ->required();
    bench->add_option("--trials", trials, "Builds per size")->capture_default_str();
    add_build_options(bench, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return cmd_build(opt);
        if (query->parsed()) return cmd_query(function_path);
        if (verify->parsed()) return cmd_verify(function_path, verify_input, verify_mode);
        if (bench->parsed()) return cmd_bench(opt, sizes, trials);
    } catch (const DuplicateKeysError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDuplicates;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
