#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

const std::string kCli = TABORD_CLI_PATH;
const std::string kData = TABORD_DATA_DIR;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > /tmp/cli_stdout.txt 2>/tmp/cli_stderr.txt";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("analyze writes a report and a verdict") {
    const int rc = run("analyze --input " + kData + "/iris.csv --label class --out /tmp/cli_report.json");
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/cli_report.json"));
    CHECK(j["mean_idf"].get<double>() == doctest::Approx(0.6875));
    CHECK(j["intrinsic_dims"].size() == 4);
    CHECK(j["complexity_interpretation"] == "A");
    CHECK(slurp("/tmp/cli_stdout.txt").find("not recommended") != std::string::npos);
}

TEST_CASE("analyze csv format") {
    const int rc = run("analyze --input " + kData + "/iris.csv --label class --format csv --out /tmp/cli_report.csv");
    CHECK(rc == 0);
    const std::string body = slurp("/tmp/cli_report.csv");
    CHECK(body.find("dataset,threshold,intrinsic_dim,idf,success_prob") != std::string::npos);
    CHECK(body.find("mean_idf=") != std::string::npos);
}

TEST_CASE("order emits a valid permutation file") {
    const int rc = run("order --input " + kData + "/iris.csv --label class --clusters 3 --seed 7 --out /tmp/cli_perm.json");
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/cli_perm.json"));
    auto order = j["order"].get<std::vector<int>>();
    REQUIRE(order.size() == 4);
    std::vector<bool> seen(4, false);
    for (int f : order) {
        REQUIRE(f >= 0);
        REQUIRE(f < 4);
        seen[static_cast<std::size_t>(f)] = true;
    }
    for (bool s : seen) CHECK(s);
    CHECK(j["alphas"].size() == 3);
    CHECK(j["column_names"].size() == 4);
}

TEST_CASE("order is deterministic per seed") {
    run("order --input " + kData + "/iris.csv --label class --clusters 3 --seed 11 --out /tmp/cli_perm_a.json");
    run("order --input " + kData + "/iris.csv --label class --clusters 3 --seed 11 --out /tmp/cli_perm_b.json");
    CHECK(slurp("/tmp/cli_perm_a.json") == slurp("/tmp/cli_perm_b.json"));
}

TEST_CASE("train writes checkpoint and trace") {
    const int rc = run("train --input " + kData + "/iris.csv --label class --clusters 3 "
                       "--epochs 3 --d 4 --d-k 4 --seed 2 --out /tmp/cli_ckpt.json");
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/cli_ckpt.json"));
    CHECK(j["version"] == 1);
    CHECK(j["config"]["m"] == 4);
    CHECK(j["params"].size() > 0);
    const std::string trace = slurp("/tmp/cli_ckpt.json.trace.csv");
    CHECK(trace.find("epoch,task_loss,p_d,p_g,total") != std::string::npos);
    // 3 epochs -> header + 3 rows
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 4);
}

TEST_CASE("train accepts a precomputed permutation") {
    run("order --input " + kData + "/iris.csv --label class --clusters 3 --seed 1 --out /tmp/cli_perm_pre.json");
    const int rc = run("train --input " + kData + "/iris.csv --label class "
                       "--permutation /tmp/cli_perm_pre.json --epochs 2 --d 4 --d-k 4 "
                       "--seed 2 --out /tmp/cli_ckpt2.json");
    CHECK(rc == 0);
}

TEST_CASE("exit codes map to error kinds") {
    CHECK(run("analyze --input /nonexistent.csv --out /tmp/x.json") == 2);
    CHECK(run("analyze --input " + kData + "/iris.csv --label nope --out /tmp/x.json") == 3);
    // k > n is a validation failure
    CHECK(run("order --input " + kData + "/iris.csv --label class --clusters 100000 --out /tmp/x.json") == 3);
}

TEST_CASE("train without labels fails with a validation exit") {
    CHECK(run("train --input " + kData + "/iris.csv --out /tmp/x.json") == 3);
}
