#include <doctest.h>

#include <fstream>
#include <sstream>

#include "groupcast/cli.hpp"
#include "groupcast/ingest.hpp"
#include "helpers.hpp"

using namespace groupcast;
using groupcast::testing::TempDir;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small directed corpus shared by the cases below.
const std::filesystem::path& corpus() {
    static TempDir dir("cli_corpus");
    static const bool made = [] {
        const auto r = cli({"gen-synth", "--out", dir.path().string(), "--groups", "4", "--duration", "160",
                            "--addressing", "directed", "--rates", "0.6", "0.3", "0.3", "--seed", "3"});
        REQUIRE(r.code == kExitOk);
        return true;
    }();
    (void)made;
    return dir.path();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("gen-synth writes loadable sessions with the expected window count") {
        TempDir tmp("cli_gen");
        const auto r = cli({"gen-synth", "--out", tmp.path().string(), "--groups", "2", "--duration", "288"});
        REQUIRE(r.code == kExitOk);
        CHECK(std::filesystem::exists(tmp.path() / "synthetic.json"));
        const auto streams = parse_session(tmp.path() / "G01");
        CHECK(build_timeline(streams).window_count() == 17);
        CHECK(std::filesystem::is_directory(tmp.path() / "G02"));
    }

    TEST_CASE("evaluate writes a report and prints one line per predictor") {
        TempDir run("cli_eval");
        const auto r = cli({"evaluate", "--data", corpus().string(), "--out", run.path().string(), "--predictor",
                            "persistence,markov,llm", "--mock", "echo"});
        REQUIRE(r.code == kExitOk);
        CHECK(std::filesystem::exists(run.path() / "report.csv"));
        CHECK(std::filesystem::exists(run.path() / "config.json"));
        const auto summary = nlohmann::json::parse(slurp(run.path() / "summary.json"));
        REQUIRE(summary["results"].size() == 3);
        bool found = false;
        for (const auto& res : summary["results"])
            if (res["predictor"].get<std::string>().rfind("llm", 0) == 0) {
                found = true;
                CHECK(res["aggregate"]["weighted_jaccard"]["average"].get<double>() == doctest::Approx(1.0));
            }
        CHECK(found);
        CHECK(summary["data"]["source"].get<std::string>().find("synthetic") != std::string::npos);

        const auto rep = cli({"report", "--run", run.path().string()});
        CHECK(rep.code == kExitOk);
        CHECK(rep.out.find("persistence") != std::string::npos);
    }

    TEST_CASE("replaying a run reproduces its report byte for byte") {
        TempDir run("cli_replay");
        const auto first = cli({"simulate", "--data", corpus().string(), "--out", run.path().string(), "--predictor",
                                "llm,stratified", "--mock", "context", "--mock-noise", "0.1", "--horizon", "3",
                                "--jobs", "3"});
        REQUIRE(first.code == kExitOk);
        const auto again_dir = run.path().string() + "-again";
        const auto again = cli({"--replay", (run.path() / "config.json").string(), "--replay-out", again_dir});
        REQUIRE(again.code == kExitOk);
        CHECK(slurp(run.path() / "report.csv") == slurp(std::filesystem::path(again_dir) / "report.csv"));
        std::filesystem::remove_all(again_dir);
    }

    TEST_CASE("exit codes") {
        TempDir run("cli_codes");
        CHECK(cli({}).code == kExitUsage);  // no subcommand: help plus usage status
        CHECK(cli({"evaluate", "--bogus"}).code == kExitUsage);
        CHECK(cli({"evaluate", "--data", corpus().string()}).code == kExitUsage);  // missing --out
        CHECK(cli({"evaluate", "--data", corpus().string(), "--out", run.path().string(), "--predictor", "oracle"})
                  .code == kExitUsage);
        CHECK(cli({"evaluate", "--data", "/nonexistent/corpus", "--out", run.path().string()}).code == kExitData);
        const auto down = cli({"evaluate", "--data", corpus().string(), "--out", run.path().string(), "--predictor",
                               "llm", "--endpoint", "http://127.0.0.1:9", "--max-attempts", "1", "--timeout", "1"});
        CHECK(down.code == kExitEndpoint);
        const auto flaky = cli({"evaluate", "--data", corpus().string(), "--out", run.path().string(), "--predictor",
                                "llm", "--mock", "echo", "--mock-error", "1"});
        CHECK(flaky.code == kExitEndpoint);
    }

    TEST_CASE("help lists options with their defaults") {
        const auto r = cli({"evaluate", "--help"});
        CHECK(r.code == kExitOk);
        const auto text = r.out + r.err;
        for (const char* s : {"--window", "32", "--stride", "16", "--horizon", "--token-budget", "8192", "--jobs",
                              "--endpoint", "--mock"})
            CHECK(text.find(s) != std::string::npos);
    }

    TEST_CASE("options can come from a config file") {
        TempDir run("cli_config");
        const auto ini = run.path() / "opts.ini";
        std::ofstream(ini) << "[evaluate]\npredictor=smoothing\nsmoothing-n=2\n";
        const auto r = cli({"--config", ini.string(), "evaluate", "--data", corpus().string(), "--out",
                            (run.path() / "out").string()});
        REQUIRE(r.code == kExitOk);
        const auto cfg = nlohmann::json::parse(slurp(run.path() / "out" / "config.json"));
        CHECK(cli_settings_from_json(cfg).smoothing_n == 2);
    }

    TEST_CASE("settings json round trip") {
        CliSettings s;
        s.predictors = {"markov", "llm"};
        s.seed = 99;
        s.mock = "context";
        const auto back = cli_settings_from_json(to_json(s));
        CHECK(to_json(back) == to_json(s));
        CHECK(cli_settings_from_json(nlohmann::json::object()).window_s == 32.0);
    }
}
