#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "podag/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
};

CliResult run(const std::string& args) {
    const std::string cmd = std::string(PODAG_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    CliResult r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path workdir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("podag_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path simulate(const fs::path& d, int seed = 3) {
    const CliResult r = run("simulate --nodes 8 --layers 2 --n 200 --seed " + std::to_string(seed) +
                      " -o " + d.string());
    EXPECT_EQ(r.code, 0);
    return d;
}

}  // namespace

TEST(Cli, HelpDocumentsFormatsAndExitCodes) {
    const CliResult r = run("--help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("unordered:"), std::string::npos);
    EXPECT_NE(r.out.find("exit"), std::string::npos);
    for (const char* sub : {"simulate", "learn", "benchmark", "faithfulness"}) {
        EXPECT_NE(r.out.find(sub), std::string::npos);
    }
}

TEST(Cli, SimulateWritesAllFiles) {
    const fs::path d = simulate(workdir("sim"));
    for (const char* f : {"data.csv", "truth.tsv", "sem.json", "layering.txt"}) {
        EXPECT_TRUE(fs::exists(d / f)) << f;
    }
    const auto data = podag::read_dataset((d / "data.csv").string());
    EXPECT_EQ(data.n(), 200);
    EXPECT_EQ(data.m(), 8);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("simulate --epn -1").code, 2);
    EXPECT_EQ(run("bogus").code, 2);
    const fs::path d = simulate(workdir("usage"));
    EXPECT_EQ(run("learn --data " + (d / "data.csv").string() + " --layering " +
                  (d / "layering.txt").string() + " --algorithm nope")
                  .code,
              2);
    EXPECT_EQ(run("learn --data " + (d / "data.csv").string()).code, 2);
}

TEST(Cli, LabelMismatchExitsThree) {
    const fs::path d = simulate(workdir("labels"));
    podag::write_file((d / "bad.txt").string(), "n0,zz\n");
    EXPECT_EQ(run("learn --data " + (d / "data.csv").string() + " --layering " +
                  (d / "bad.txt").string() + " -o " + d.string())
                  .code,
              3);
}

TEST(Cli, SingularDataExitsFour) {
    const fs::path d = workdir("singular");
    std::string csv = "a,b,c\n";
    for (int i = 0; i < 50; ++i) {
        const double x = i * 0.37 - 3.0, y = (i * 7 % 11) * 0.5;
        csv += podag::format_double(x) + "," + podag::format_double(x) + "," +
               podag::format_double(x + y) + "\n";
    }
    podag::write_file((d / "data.csv").string(), csv);
    podag::write_file((d / "layers.txt").string(), "a,b\nc\n");
    EXPECT_EQ(run("learn --data " + (d / "data.csv").string() + " --layering " +
                  (d / "layers.txt").string() + " -o " + d.string())
                  .code,
              4);
}

TEST(Cli, LearnIsDeterministicAndQuiet) {
    const fs::path d = simulate(workdir("learn"));
    const std::string base = "learn --data " + (d / "data.csv").string() + " --layering " +
                             (d / "layering.txt").string() + " --within-layers";
    const CliResult a = run(base + " -o " + (d / "a").string());
    const CliResult b = run(base + " -o " + (d / "b").string());
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_TRUE(a.out.empty());
    EXPECT_EQ(podag::read_file((d / "a" / "result.json").string()),
              podag::read_file((d / "b" / "result.json").string()));
    EXPECT_EQ(podag::read_file((d / "a" / "edges.tsv").string()),
              podag::read_file((d / "b" / "edges.tsv").string()));
    const CliResult s = run(base + " --stdout -o " + (d / "c").string());
    EXPECT_EQ(s.out, podag::read_file((d / "a" / "result.json").string()));
}

TEST(Cli, EveryAlgorithmRuns) {
    const fs::path d = simulate(workdir("algos"));
    for (const char* alg : {"podag", "pc", "pc+", "h0", "h-minus-j"}) {
        const CliResult r = run(std::string("learn --algorithm ") + alg + " --data " +
                          (d / "data.csv").string() + " --layering " +
                          (d / "layering.txt").string() + " -o " + (d / alg).string());
        EXPECT_EQ(r.code, 0) << alg;
        EXPECT_TRUE(fs::exists(d / alg / "edges.tsv")) << alg;
    }
}

TEST(Cli, SimulateFromSemFileReproducesData) {
    const fs::path d = simulate(workdir("semfile"), 5);
    const CliResult r = run("simulate --sem " + (d / "sem.json").string() + " --n 200 --seed 5 -o " +
                      (d / "again").string());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(podag::read_file((d / "again" / "truth.tsv").string()),
              podag::read_file((d / "truth.tsv").string()));
}

TEST(Cli, SmallBenchmarkAndFaithfulness) {
    const fs::path d = workdir("bench");
    const CliResult b = run("benchmark --nodes 10 --layers 2 --n 100 --replicates 1 -o " +
                      (d / "rows.csv").string() + " --summary " + (d / "sum.csv").string());
    EXPECT_EQ(b.code, 0);
    EXPECT_NE(podag::read_file((d / "rows.csv").string()).find("podag"), std::string::npos);
    const CliResult f = run("faithfulness --replicates 2 --nodes 8 -o " + (d / "f.csv").string());
    EXPECT_EQ(f.code, 0);
    EXPECT_NE(podag::read_file((d / "f.csv").string()).find("rho_min_skeleton"), std::string::npos);
}
