#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CliResult run_cli(const std::string& args) {
    static int seq = 0;
    const fs::path base = fs::temp_directory_path() /
                          ("agentattr-cli-" + std::to_string(::getpid()) + "-" +
                           std::to_string(seq++));
    const fs::path out = base.string() + ".out";
    const fs::path err = base.string() + ".err";
    const std::string cmd = std::string(AGENTATTR_CLI_PATH) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    fs::remove(out);
    fs::remove(err);
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int seq = 0;
        path = fs::temp_directory_path() /
               ("agentattr-cli-dir-" + std::to_string(::getpid()) + "-" +
                std::to_string(seq++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// One shared synth directory for the attribute/eval happy paths.
const TempDir& fixture_cases() {
    static TempDir dir;
    static bool built = false;
    if (!built) {
        auto r = run_cli("synth --n 4 --seed 17 --out " + dir.file("cases"));
        REQUIRE(r.exit_code == 0);
        built = true;
    }
    return dir;
}

}  // namespace

TEST_CASE("version and help exit cleanly") {
    auto v = run_cli("--version");
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);

    auto h = run_cli("--help");
    CHECK(h.exit_code == 0);
    CHECK(h.out.find("attribute") != std::string::npos);
    CHECK(h.out.find("eval") != std::string::npos);
    CHECK(h.out.find("synth") != std::string::npos);
}

TEST_CASE("flag misuse exits with the usage code") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("attribute").exit_code == 2);  // missing required flags
    auto r = run_cli("attribute --trajectory x --out y --scorer carrier-pigeon");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("usage error:") != std::string::npos);
    auto b = run_cli("attribute --trajectory x --out y --baselines loo,magic");
    CHECK(b.exit_code == 2);
    CHECK(b.err.find("unknown baseline") != std::string::npos);
}

TEST_CASE("synth writes paired cases plus the shared model") {
    const TempDir& dir = fixture_cases();
    CHECK(fs::exists(dir.file("cases/synth-000.trajectory.json")));
    CHECK(fs::exists(dir.file("cases/synth-000.gt.json")));
    CHECK(fs::exists(dir.file("cases/synth-003.trajectory.json")));
    CHECK(fs::exists(dir.file("cases/synth-003.gt.json")));
    CHECK(fs::exists(dir.file("cases/model.json")));

    auto doc = nlohmann::json::parse(slurp(dir.file("cases/synth-001.trajectory.json")));
    CHECK(doc.at("meta").at("id") == "synth-001");
    CHECK(doc.at("components").is_array());
    CHECK(doc.at("target_action").is_string());
}

TEST_CASE("attribute runs end to end and reruns byte-identically") {
    const TempDir& dir = fixture_cases();
    TempDir out;
    const std::string common =
        "attribute --trajectory " + dir.file("cases/synth-000.trajectory.json") +
        " --model-path " + dir.file("cases/model.json") +
        " --baselines loo,contextcite --seed 3 --top-k 2";

    auto r1 = run_cli(common + " --concurrency 1 --out " + out.file("r1.json"));
    REQUIRE(r1.exit_code == 0);
    auto r2 = run_cli(common + " --concurrency 8 --out " + out.file("r2.json") +
                      " --html " + out.file("r2.html"));
    REQUIRE(r2.exit_code == 0);

    const std::string b1 = slurp(out.file("r1.json"));
    const std::string b2 = slurp(out.file("r2.json"));
    CHECK(!b1.empty());
    CHECK(b1 == b2);

    auto doc = nlohmann::json::parse(b1);
    CHECK(doc.at("selected_components").size() == 2);
    CHECK(doc.at("baselines").at("loo_enabled") == true);
    CHECK(doc.at("baselines").at("contextcite_enabled") == true);
    CHECK(doc.at("seed") == 3);
    CHECK_FALSE(doc.contains("elapsed_ms"));

    const std::string html = slurp(out.file("r2.html"));
    CHECK(html.find("<style") != std::string::npos);
    CHECK(html.find("<script") == std::string::npos);
}

TEST_CASE("timings flag adds wall-clock and is off by default") {
    const TempDir& dir = fixture_cases();
    TempDir out;
    auto r = run_cli("attribute --trajectory " +
                     dir.file("cases/synth-001.trajectory.json") + " --model-path " +
                     dir.file("cases/model.json") + " --timings --out " +
                     out.file("timed.json"));
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(slurp(out.file("timed.json")));
    REQUIRE(doc.contains("elapsed_ms"));
    CHECK(doc.at("elapsed_ms").get<double>() >= 0.0);
}

TEST_CASE("attribute failure modes map to distinct exit codes") {
    const TempDir& dir = fixture_cases();
    TempDir out;

    auto io = run_cli("attribute --trajectory " + out.file("absent.json") +
                      " --model-path " + dir.file("cases/model.json") + " --out " +
                      out.file("r.json"));
    CHECK(io.exit_code == 5);
    CHECK(io.err.find("io error:") != std::string::npos);

    std::ofstream(out.file("broken.json")) << "{nope";
    auto parse = run_cli("attribute --trajectory " + out.file("broken.json") +
                         " --model-path " + dir.file("cases/model.json") + " --out " +
                         out.file("r.json"));
    CHECK(parse.exit_code == 3);
    CHECK(parse.err.find("parse error:") != std::string::npos);

    // ngram backend with no model source at all.
    auto usage = run_cli("attribute --trajectory " +
                         dir.file("cases/synth-000.trajectory.json") + " --out " +
                         out.file("r.json"));
    CHECK(usage.exit_code == 2);
    CHECK(usage.err.find("usage error:") != std::string::npos);

    CHECK_FALSE(fs::exists(out.file("r.json")));
}

TEST_CASE("unreachable scorer endpoint fails without a partial report") {
    const TempDir& dir = fixture_cases();
    TempDir out;
    auto r = run_cli("attribute --trajectory " +
                     dir.file("cases/synth-000.trajectory.json") +
                     " --scorer http --endpoint http://127.0.0.1:1 --model m --out " +
                     out.file("r.json"));
    CHECK(r.exit_code == 4);
    CHECK(r.err.find("scorer error:") != std::string::npos);
    CHECK_FALSE(fs::exists(out.file("r.json")));
    CHECK_FALSE(fs::exists(out.file("r.json.tmp" + std::to_string(::getpid()))));
}

TEST_CASE("eval prints the hit table and reruns byte-identically") {
    const TempDir& dir = fixture_cases();
    TempDir out;
    const std::string common = "eval --cases " + dir.file("cases") +
                               " --methods drop_hold,loo --k 1,3 --seed 0";

    auto r1 = run_cli(common + " --concurrency 1 --out " + out.file("e1.json"));
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.out.find("Hit@1") != std::string::npos);
    CHECK(r1.out.find("component") != std::string::npos);
    CHECK(r1.out.find("drop_hold") != std::string::npos);
    CHECK(r1.out.find("cases: 4") != std::string::npos);

    auto r2 = run_cli(common + " --concurrency 8 --out " + out.file("e2.json"));
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(out.file("e1.json")) == slurp(out.file("e2.json")));
    CHECK(r1.out == r2.out);

    auto doc = nlohmann::json::parse(slurp(out.file("e1.json")));
    CHECK(doc.at("num_cases") == 4);
    CHECK(doc.at("methods").contains("drop_hold"));
    CHECK(doc.at("methods").contains("loo"));
    CHECK_FALSE(doc.at("methods").contains("contextcite"));
    CHECK(doc.at("component").at("hit@1") == 1.0);
    CHECK(doc.at("methods").at("drop_hold").at("hit@1") == 1.0);
}

TEST_CASE("eval failure modes") {
    const TempDir& dir = fixture_cases();
    TempDir out;

    auto unknown = run_cli("eval --cases " + dir.file("cases") +
                           " --methods sorcery --out " + out.file("e.json"));
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.err.find("usage error:") != std::string::npos);

    fs::create_directories(out.file("empty"));
    auto empty = run_cli("eval --cases " + out.file("empty") + " --out " +
                         out.file("e.json"));
    CHECK(empty.exit_code == 5);
    CHECK(empty.err.find("io error:") != std::string::npos);
    CHECK_FALSE(fs::exists(out.file("e.json")));
}
