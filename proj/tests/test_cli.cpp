#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SAFEBAI_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("safebai_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, RunWritesArtifacts) {
    const fs::path dir = scratch("run");
    EXPECT_EQ(run_cli("run --replications 2 --seed 3 --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "run_0001.csv"));
    EXPECT_TRUE(fs::exists(dir / "run_0002.csv"));
    EXPECT_TRUE(fs::exists(dir / "aggregate.csv"));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    EXPECT_EQ(slurp(dir / "run_0001.csv").substr(0, 5), "round");
}

TEST(Cli, ConfigErrorsExitOne) {
    const fs::path dir = scratch("cfg");
    std::ofstream(dir / "bad.toml") << "[instance]\nunknown = 1\n";
    EXPECT_EQ(run_cli("run --config " + (dir / "bad.toml").string() + " --out " + dir.string()), 1);
    EXPECT_EQ(run_cli("run --criterion X"), 1);
    EXPECT_EQ(run_cli("run --config /nonexistent.toml"), 1);
    EXPECT_EQ(run_cli("sweep --out " + dir.string()), 1);
    EXPECT_EQ(run_cli(""), 1);
}

TEST(Cli, UnwritableOutputExitsTwo) {
    const fs::path dir = scratch("io");
    std::ofstream(dir / "file") << "x";
    EXPECT_EQ(run_cli("run --replications 1 --out " + (dir / "file" / "sub").string()), 2);
}

TEST(Cli, TruncationExitsThree) {
    const fs::path dir = scratch("trunc");
    std::ofstream(dir / "c.toml") << "[algorithm]\nmax_rounds = 1\n";
    EXPECT_EQ(run_cli("run --replications 1 --config " + (dir / "c.toml").string() + " --out " +
                      dir.string()),
              3);
}

TEST(Cli, BoundsAndSweep) {
    const fs::path dir = scratch("bounds");
    EXPECT_EQ(run_cli("bounds --out " + dir.string()), 0);
    EXPECT_NE(slurp(dir / "bounds.json").find("singular"), std::string::npos);
    const fs::path sw = scratch("sweep");
    EXPECT_EQ(run_cli("sweep --parameter t_fe --values 100,200 --replications 2 --out " + sw.string()), 0);
    const std::string csv = slurp(sw / "sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_TRUE(fs::exists(sw / "sweep_gamma2.svg"));
}
