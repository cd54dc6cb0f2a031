#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <csignal>
#include <cstdio>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = RICHSTATE_SOURCE_DIR;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        out_ = fs::temp_directory_path() /
               ("richstate_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(out_);
        fs::create_directories(out_);
    }
    void TearDown() override { fs::remove_all(out_); }

    int run(const std::string& args) {
        const std::string cmd = "\""s + RICHSTATE_CLI + "\" --data-dir \"" + (kSource / "data").string() +
                                "\" --out-dir \"" + out_.string() + "\" " + args + " > \"" +
                                (out_ / "stdout.txt").string() + "\" 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string output() const { return slurp(out_ / "stdout.txt"); }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path out_;
};

}  // namespace

TEST_F(Cli, PopulationLifecycleAndExitCodes) {
    EXPECT_EQ(run("population create sapienz_default"), 0);
    EXPECT_TRUE(fs::exists(out_ / "populations/sapienz_default.json"));
    EXPECT_EQ(run("population status sapienz_default"), 0);
    EXPECT_NE(output().find("\"generation\": 1"), std::string::npos) << output();
    EXPECT_EQ(run("population evolve sapienz_default"), 2);
    EXPECT_EQ(run("population create no_such_population"), 2);
    EXPECT_EQ(run("population frobnicate"), 2);
    EXPECT_EQ(run("population create test_universe"), 0);
    EXPECT_EQ(run("population evolve test_universe"), 0);
    EXPECT_EQ(run("population maintain test_universe"), 0);
    EXPECT_NE(output().find("deactivated 0, created 0"), std::string::npos) << output();
}

TEST_F(Cli, ExploreIsDeterministicAndReportsExhaustion) {
    ASSERT_EQ(run("population create sapienz_default"), 0);
    const std::string a = (out_ / "a.jsonl").string(), b = (out_ / "b.jsonl").string();
    ASSERT_EQ(run("explore run --population sapienz_default --mode rich -R 5 -B 30 -S 9 --build alpha-1 -o " + a), 0);
    ASSERT_EQ(run("explore run --population sapienz_default --mode rich -R 5 -B 30 -S 9 --build alpha-1 -o " + b), 0);
    EXPECT_EQ(slurp(a), slurp(b));
    std::istringstream lines(slurp(a));
    int count = 0;
    for (std::string line; std::getline(lines, line);) ++count;
    EXPECT_EQ(count, 5);
    // 30 users with 10 uses each cover 300 runs and no more
    EXPECT_EQ(run("explore run --population sapienz_default --mode rich -R 301 -B 1 --commit"), 1);
    EXPECT_NE(output().find("population maintain"), std::string::npos) << output();
    EXPECT_EQ(run("explore run --population sapienz_default --mode empty -R 3 -B 5 --beta 2"), 2);
}

TEST_F(Cli, ExperimentCompareWritesArtefacts) {
    const auto dir = out_ / "golden";
    ASSERT_EQ(run("experiment compare -c \"" + (kSource / "tests/golden/config.json").string() +
                  "\" --output-dir \"" + dir.string() + "\""),
              0)
        << output();
    for (const char* name : {"coverage_table.csv", "crashes_table.csv", "growth_curves.csv", "venn.csv"}) {
        EXPECT_EQ(slurp(dir / name), slurp(kSource / "tests/golden" / name)) << name;
    }
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    std::ofstream(out_ / "dup.json") << R"({"builds": ["a", "a"]})";
    EXPECT_EQ(run("experiment compare -c \"" + (out_ / "dup.json").string() + "\""), 2);
    EXPECT_NE(output().find("experiment.builds[1]"), std::string::npos) << output();
}

TEST_F(Cli, UniverseServeAutoEvolvesAndPersistsOnSignal) {
    const auto log = out_ / "serve.log";
    const auto state = out_ / "state";
    const pid_t pid = fork();
    ASSERT_GE(pid, 0);
    if (pid == 0) {
        if (!std::freopen(log.c_str(), "w", stdout)) _exit(126);
        const std::string config = (kSource / "data/universe.json").string();
        const std::string state_dir = state.string();
        execl(RICHSTATE_CLI, RICHSTATE_CLI, "universe", "serve", "--config", config.c_str(), "--port", "0",
              "--auto-evolve", "1", "--state-dir", state_dir.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    int port = 0;
    for (int i = 0; i < 200 && port == 0; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        const auto text = slurp(log);
        const auto at = text.find("127.0.0.1:");
        if (at != std::string::npos && text.find(' ', at) != std::string::npos) {
            port = std::stoi(text.substr(at + 10));
        }
    }
    ASSERT_GT(port, 0) << slurp(log);
    httplib::Client client("127.0.0.1", port);
    auto status = client.Get("/status");
    ASSERT_TRUE(status);
    EXPECT_EQ(status->status, 200);
    std::this_thread::sleep_for(std::chrono::milliseconds(3200));
    status = client.Get("/status");
    ASSERT_TRUE(status);
    const auto generation = nlohmann::json::parse(status->body)["generation"].get<int>();
    EXPECT_GE(generation, 3);

    kill(pid, SIGTERM);
    int wstatus = 0;
    waitpid(pid, &wstatus, 0);
    EXPECT_TRUE(WIFEXITED(wstatus));
    EXPECT_EQ(WEXITSTATUS(wstatus), 0);
    ASSERT_TRUE(fs::exists(state / "universe_state.json"));
    const auto saved = nlohmann::json::parse(slurp(state / "universe_state.json"));
    EXPECT_GE(saved["population"]["world"]["generation"].get<int>(), generation);
}

TEST_F(Cli, RichExplorationReachesMoreThanEmpty) {
    ASSERT_EQ(run("population create sapienz_default"), 0);
    auto counts = [&](const std::string& mode) {
        EXPECT_EQ(run("explore run --population sapienz_default --mode " + mode + " -R 200 -B 100"), 0);
        int runs = 0, endpoints = 0, probes = 0;
        std::sscanf(output().c_str(), "runs %d  unique endpoints %d  unique probes %d", &runs, &endpoints, &probes);
        EXPECT_EQ(runs, 200);
        return std::pair{endpoints, probes};
    };
    const auto rich = counts("rich");
    const auto empty = counts("empty");
    EXPECT_GT(rich.first, empty.first);
    EXPECT_GT(rich.second, empty.second);
}
