#include "spectrum_scope/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace spectrum_scope::cli {
namespace test {
namespace {

namespace fs = std::filesystem;

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(split_commas(line));
    return out;
}

Options dist_options(int d, int n, std::string spectrum) {
    Options o;
    o.command = "dist";
    o.d = d;
    o.n = n;
    o.spectrum = std::move(spectrum);
    return o;
}

struct Invocation {
    int exit = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs the built binary through the shell; `env` is prepended as assignments.
Invocation invoke(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / ("spectrum_scope_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
    fs::path err = dir / ("err" + std::to_string(counter++) + ".txt");
    std::string cmd = env + " '" SPECTRUM_SCOPE_CLI "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    int status = std::system(cmd.c_str());
    Invocation res;
    res.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    return res;
}

TEST(DistCommandTest, examples) {
    auto res = run(dist_options(3, 120, "0.6,0.3,0.1"), 1);
    ASSERT_EQ(res.exit, exit_code::ok) << res.error;
    auto rows = csv_rows(res.output);
    ASSERT_EQ(rows.front(), (std::vector<std::string>{"Y1", "Y2", "Y3", "est1", "est2", "est3", "prob", "log_prob"}));
    ASSERT_EQ(rows.size(), frame_count(3, 120) + 1);
    std::size_t best = 1;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (parse_real(rows[i][6]) > parse_real(rows[best][6])) best = i;
    const double r[] = {0.6, 0.3, 0.1};
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(parse_real(rows[best][3 + j]), r[j], 0.05);
    EXPECT_EQ(res.manifest["summary"]["mode"], "(74,35,11)");

    auto single = csv_rows(run(dist_options(1, 5, ""), 1).output);
    ASSERT_EQ(single.size(), 2u);
    EXPECT_EQ(single[1], (std::vector<std::string>{"5", "1", "1", "0"}));

    auto pair = csv_rows(run(dist_options(2, 2, "0.5,0.5"), 1).output);
    ASSERT_EQ(pair.size(), 3u);
    EXPECT_NEAR(parse_real(pair[1][4]), 0.75, 1e-15);
    EXPECT_NEAR(parse_real(pair[2][4]), 0.25, 1e-15);
    EXPECT_EQ(pair[1][0], "2");
}

TEST(DistCommandTest, seventeen_significant_digits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(neg_inf), "-inf");
    for (double x : {0.1, 1.0 / 3.0, 2.5e-300, 123456.789, -7.0e-5}) EXPECT_EQ(parse_real(format_double(x)), x);
}

TEST(DistCommandTest, bad_input_and_caps) {
    EXPECT_EQ(run(dist_options(2, 4, "0.6,0.3"), 1).exit, exit_code::bad_input);
    EXPECT_EQ(run(dist_options(2, 4, "0.3,0.7"), 1).exit, exit_code::bad_input);
    EXPECT_EQ(run(dist_options(2, 4, "0.5,abc"), 1).exit, exit_code::bad_input);
    EXPECT_EQ(run(dist_options(3, 4, "0.5,0.5"), 1).exit, exit_code::bad_input);
    EXPECT_EQ(run(dist_options(0, 4, ""), 1).exit, exit_code::bad_input);
    auto capped = run(dist_options(5, 4, ""), 1);
    EXPECT_EQ(capped.exit, exit_code::resource_cap);
    EXPECT_NE(capped.error.find("d <= 4"), std::string::npos);
    EXPECT_EQ(run(dist_options(2, 401, ""), 1).exit, exit_code::resource_cap);

    auto o = dist_options(2, 4, "0.3,0.7");
    o.allow_unsorted = true;
    EXPECT_EQ(run(o, 1).exit, exit_code::ok);
    o = dist_options(2, 4, "6,4");
    EXPECT_EQ(run(o, 1).exit, exit_code::bad_input);
    o.normalize = true;
    auto normalized = run(o, 1);
    EXPECT_EQ(normalized.exit, exit_code::ok);
    EXPECT_EQ(normalized.output, run(dist_options(2, 4, "0.6,0.4"), 1).output);
}

Options scan_options(std::string epsilon, std::string n_list) {
    Options o;
    o.command = "rate-scan";
    o.d = 2;
    o.spectrum = "0.7,0.3";
    o.epsilon = std::move(epsilon);
    o.n_list = std::move(n_list);
    return o;
}

TEST(RateScanCommandTest, examples) {
    auto res = run(scan_options("0.1", "40,80,160,320"), 1);
    ASSERT_EQ(res.exit, exit_code::ok) << res.error;
    auto rows = csv_rows(res.output);
    ASSERT_EQ(rows.front(), (std::vector<std::string>{"N", "K_N", "a_N", "target", "a_N_infinite"}));
    ASSERT_EQ(rows.size(), 5u);
    double previous = pos_inf;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double a = parse_real(rows[i][2]), target = parse_real(rows[i][3]);
        EXPECT_NEAR(target, 0.022582421084357485, 1e-9);
        EXPECT_GT(a, target);
        EXPECT_LT(a, previous);
        previous = a;
        EXPECT_EQ(rows[i][4], "false");
    }

    auto everything = csv_rows(run(scan_options("1", "10,20"), 1).output);
    for (const auto& row : std::span(everything).subspan(1)) {
        EXPECT_EQ(row[1], "0");
        EXPECT_EQ(row[2], "inf");
        EXPECT_EQ(row[3], "inf");
        EXPECT_EQ(row[4], "true");
    }

    // eps = 0: everything except the exact estimate (7,3)/10.
    auto zero = csv_rows(run(scan_options("0", "10"), 1).output);
    double p73 = exact_distribution(2, 10, Spectrum({0.7, 0.3})).probability(YoungFrame({7, 3}));
    EXPECT_NEAR(parse_real(zero[1][1]), 1.0 - p73, 1e-14);
}

TEST(RateScanCommandTest, errors) {
    EXPECT_EQ(run(scan_options("0.1", "10,500"), 1).exit, exit_code::resource_cap);
    EXPECT_EQ(run(scan_options("0.1", "10,x"), 1).exit, exit_code::bad_input);
    EXPECT_EQ(run(scan_options("0.1", "0"), 1).exit, exit_code::bad_input);
    EXPECT_EQ(run(scan_options("-1", "10"), 1).exit, exit_code::bad_input);
}

Options sample_options(int d, int n, std::string spectrum, std::uint64_t samples, std::uint64_t seed) {
    Options o;
    o.command = "sample";
    o.d = d;
    o.n = n;
    o.spectrum = std::move(spectrum);
    o.samples = samples;
    o.seed = seed;
    return o;
}

TEST(SampleCommandTest, examples) {
    auto o = sample_options(2, 30, "0.6,0.4", 2000, 9);
    auto first = run(o, 1);
    ASSERT_EQ(first.exit, exit_code::ok) << first.error;
    EXPECT_EQ(run(o, 1).output, first.output);
    EXPECT_EQ(first.manifest["output_checksum"], run(o, 1).manifest["output_checksum"]);
    auto header = csv_rows(first.output).front();
    EXPECT_EQ(header, (std::vector<std::string>{"Y1", "Y2", "est1", "est2", "count", "frequency"}));

    auto pure = csv_rows(run(sample_options(2, 17, "1,0", 50, 1), 1).output);
    ASSERT_EQ(pure.size(), 2u);
    EXPECT_EQ(pure[1][0], "17");
    EXPECT_EQ(pure[1][4], "50");

    auto big = run(sample_options(3, 10000, "0.6,0.3,0.1", 10000, 3), 1);
    ASSERT_EQ(big.exit, exit_code::ok);
    const double r[] = {0.6, 0.3, 0.1};
    for (std::size_t j = 0; j < 3; ++j)
        EXPECT_NEAR(parse_real(big.manifest["summary"]["mean_estimate"][j].get<std::string>()), r[j], 0.01);
}

TEST(SampleCommandTest, thread_count_does_not_change_output) {
    auto o = sample_options(3, 25, "0.5,0.3,0.2", 30000, 77);
    o.chains = 6;
    auto one = run(o, 1);
    EXPECT_EQ(run(o, 4).output, one.output);
    EXPECT_EQ(run(o, 8).output, one.output);
}

TEST(SampleCommandTest, errors) {
    EXPECT_EQ(run(sample_options(2, 10, "0.4,0.6", 10, 1), 1).exit, exit_code::bad_input);
    EXPECT_EQ(run(sample_options(2, 10, "0.6,0.4", 0, 1), 1).exit, exit_code::bad_input);
    EXPECT_EQ(run(sample_options(2, 0, "0.6,0.4", 10, 1), 1).exit, exit_code::bad_input);
}

Options legendre_options(std::string spectrum, std::string point) {
    Options o;
    o.command = "legendre";
    o.spectrum = std::move(spectrum);
    o.point = std::move(point);
    return o;
}

TEST(LegendreCommandTest, examples) {
    auto same = csv_rows(run(legendre_options("0.6,0.3,0.1", "0.6,0.3,0.1"), 1).output);
    ASSERT_EQ(same.front(), (std::vector<std::string>{"rate", "legendre", "difference", "iterations", "eta1", "eta2", "eta3"}));
    EXPECT_EQ(parse_real(same[1][0]), 0.0);
    EXPECT_NEAR(parse_real(same[1][1]), 0.0, 1e-12);

    auto pair = csv_rows(run(legendre_options("0.6,0.4", "0.8,0.2"), 1).output);
    EXPECT_NEAR(parse_real(pair[1][0]), 0.09151622184943578, 1e-15);
    EXPECT_NEAR(parse_real(pair[1][1]), 0.09151622184943578, 1e-8);
    EXPECT_LT(std::abs(parse_real(pair[1][2])), 1e-8);

    auto boundary = csv_rows(run(legendre_options("0.5,0.3,0.2", "0.7,0.3,0"), 1).output);
    EXPECT_NEAR(parse_real(boundary[1][1]), 0.7 * std::log(1.4) + 0.3 * std::log(1.0), 1e-8);
    EXPECT_EQ(boundary[1][6], "-inf");
}

TEST(LegendreCommandTest, exhausted_budget_exits_four) {
    auto o = legendre_options("0.6,0.4", "0.8,0.2");
    o.max_iterations = 1;
    auto res = run(o, 1);
    EXPECT_EQ(res.exit, exit_code::no_convergence);
    EXPECT_NE(res.error.find("no convergence"), std::string::npos);
    EXPECT_EQ(run(legendre_options("0.6,0.4", ""), 1).exit, exit_code::bad_input);
}

TEST(VerifyCommandTest, quick_level_passes_within_budget) {
    Options o;
    o.command = "verify";
    auto start = std::chrono::steady_clock::now();
    auto res = run(o, 2);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(res.exit, exit_code::ok) << res.output;
    EXPECT_LE(seconds, 60.0);
    auto rows = csv_rows(res.output);
    ASSERT_EQ(rows.size(), 6u);
    std::vector<std::string> names;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        names.push_back(rows[i][0]);
        EXPECT_EQ(rows[i][1], "true");
    }
    EXPECT_EQ(names, (std::vector<std::string>{"normalization", "duality", "bounds", "oracle", "sampler"}));
}

TEST(VerifyCommandTest, tampered_rate_fails_duality) {
    Options o;
    o.command = "verify";
    o.tamper_rate = true;
    auto res = run(o, 1);
    EXPECT_EQ(res.exit, exit_code::invariant_failure);
    EXPECT_NE(res.error.find("duality"), std::string::npos);
    EXPECT_EQ(res.error.find("normalization"), std::string::npos);
    EXPECT_FALSE(res.manifest.empty());
}

TEST(FormatTest, json_carries_the_csv_fields) {
    std::vector<Options> cases{dist_options(2, 6, "0.7,0.3"), scan_options("0.1", "10,20"), scan_options("1", "5"),
                               sample_options(2, 8, "0.7,0.3", 500, 4), legendre_options("0.6,0.4", "0.8,0.2")};
    for (auto o : cases) {
        auto csv = csv_rows(run(o, 1).output);
        o.format = "json";
        auto res = run(o, 1);
        ASSERT_EQ(res.exit, exit_code::ok) << o.command;
        auto json = nlohmann::json::parse(res.output);
        ASSERT_TRUE(json.is_array());
        ASSERT_EQ(json.size() + 1, csv.size()) << o.command;
        for (std::size_t i = 0; i < json.size(); ++i) {
            ASSERT_EQ(json[i].size(), csv[0].size());
            for (std::size_t c = 0; c < csv[0].size(); ++c) {
                const auto& value = json[i].at(csv[0][c]);
                const std::string& cell = csv[i + 1][c];
                if (value.is_null()) EXPECT_TRUE(cell == "inf" || cell == "-inf" || cell == "nan");
                else if (value.is_boolean()) EXPECT_EQ(value.get<bool>() ? "true" : "false", cell);
                else if (value.is_string()) EXPECT_EQ(value.get<std::string>(), cell);
                else EXPECT_EQ(value.get<double>(), parse_real(cell)) << o.command << " " << csv[0][c];
            }
        }
    }
    auto bad = dist_options(2, 6, "0.7,0.3");
    bad.format = "xml";
    EXPECT_EQ(run(bad, 1).exit, exit_code::bad_input);
}

TEST(ManifestTest, fields_and_replay) {
    auto o = sample_options(2, 12, "0.7,0.3", 300, 42);
    auto res = run(o, 1);
    const auto& m = res.manifest;
    EXPECT_EQ(m["tool"], "spectrum_scope");
    EXPECT_EQ(m["version"], tool_version);
    EXPECT_EQ(m["command"], "sample");
    EXPECT_EQ(m["seed"], 42u);
    EXPECT_EQ(m["output_checksum"], checksum(res.output));
    EXPECT_EQ(m["parameters"].get<Options>().samples, 300u);

    auto replayed = replay(m, 4);
    EXPECT_EQ(replayed.exit, exit_code::ok) << replayed.output;

    auto tampered = m;
    tampered["output_checksum"] = "crc32:00000000";
    EXPECT_EQ(replay(tampered, 1).exit, exit_code::invariant_failure);
    EXPECT_EQ(replay(nlohmann::json::object(), 1).exit, exit_code::bad_input);

    for (const auto& other : {dist_options(3, 9, ""), scan_options("0.05", "30"), legendre_options("0.5,0.5", "0.9,0.1")})
        EXPECT_EQ(replay(run(other, 1).manifest, 1).exit, exit_code::ok) << other.command;
}

TEST(CheckSumTest, known_value) {
    // CRC-32 check value of "123456789".
    EXPECT_EQ(checksum("123456789"), "crc32:cbf43926");
}

TEST(BinaryTest, exit_codes) {
    EXPECT_EQ(invoke("dist --d 2 --n 2 --spectrum 0.5,0.5").exit, 0);
    EXPECT_EQ(invoke("dist --d 2 --n 2 --spectrum 0.5,0.4").exit, 2);
    EXPECT_EQ(invoke("dist --d 2 --n 2 --bogus").exit, 2);
    EXPECT_EQ(invoke("").exit, 2);
    EXPECT_EQ(invoke("dist --d 5 --n 3").exit, 3);
    EXPECT_EQ(invoke("legendre --spectrum 0.6,0.4 --point 0.8,0.2 --max-iterations 1").exit, 4);
    auto tampered = invoke("verify --tamper-rate");
    EXPECT_EQ(tampered.exit, 1);
    EXPECT_NE(tampered.err.find("duality"), std::string::npos);
}

TEST(BinaryTest, stdout_data_and_stderr_manifest) {
    auto res = invoke("dist --d 2 --n 2 --spectrum 0.5,0.5");
    EXPECT_EQ(res.out, "Y1,Y2,est1,est2,prob,log_prob\n2,0,1,0,0.75,-0.2876820724517809\n1,1,0.5,0.5,0.25,-1.3862943611198906\n");
    auto manifest = nlohmann::json::parse(res.err);
    EXPECT_EQ(manifest["output_checksum"], checksum(res.out));
}

TEST(BinaryTest, output_file_manifest_and_replay) {
    fs::path dir = fs::temp_directory_path() / ("spectrum_scope_replay_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::path out = dir / "scan.json";
    auto res = invoke("rate-scan --d 2 --spectrum 0.7,0.3 --epsilon 0.1 --n-list 40,80 --format json --out '" + out.string() + "'");
    ASSERT_EQ(res.exit, 0) << res.err;
    EXPECT_TRUE(res.out.empty());
    auto manifest = nlohmann::json::parse(slurp(fs::path(out.string() + ".manifest.json")));
    EXPECT_EQ(manifest["output_checksum"], checksum(slurp(out)));
    EXPECT_EQ(invoke("replay --manifest '" + out.string() + ".manifest.json'").exit, 0);
    fs::remove_all(dir);
}

TEST(BinaryTest, byte_identical_across_thread_counts) {
    const std::string args = "sample --d 3 --n 60 --spectrum 0.5,0.3,0.2 --samples 40000 --seed 5 --chains 8";
    auto one = invoke(args, "SPECTRUM_SCOPE_THREADS=1");
    auto eight = invoke(args, "SPECTRUM_SCOPE_THREADS=8");
    ASSERT_EQ(one.exit, 0);
    EXPECT_EQ(one.out, eight.out);
    EXPECT_EQ(nlohmann::json::parse(one.err), nlohmann::json::parse(eight.err));
}

}  // namespace
}  // namespace test
}  // namespace spectrum_scope::cli
