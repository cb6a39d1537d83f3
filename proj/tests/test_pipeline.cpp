#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"

#include "rolecomm/error.hpp"
#include "rolecomm/pipeline.hpp"

using namespace rolecomm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("rolecomm_test_" + name + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path writeFile(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Two directed 4-cycles with all chords, joined by one edge each way.
std::string twoCliques() {
    std::string text;
    for (int base : {0, 4})
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j)
                    text += std::to_string(base + i) + " " + std::to_string(base + j) + "\n";
    text += "3 4\n4 3\n";
    return text;
}

PipelineConfig smallConfig(const fs::path& input, const fs::path& out) {
    PipelineConfig cfg;
    cfg.inputPath = input.string();
    cfg.outputDir = out.string();
    cfg.nTimes = 12;
    cfg.runs = 10;
    cfg.tMin = 0.01;
    cfg.tMax = 100.0;
    cfg.threads = 2;
    return cfg;
}

int cli(const std::string& args) {
    const std::string cmd = std::string("\"") + ROLECOMM_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("2-cycle runs end to end") {
    auto dir = scratch("cycle");
    auto input = writeFile(dir / "g.txt", "a b\nb a\n");
    auto cfg = smallConfig(input, dir / "out");
    auto result = runPipeline(cfg);
    CHECK(result.labels == std::vector<std::string>{"a", "b"});
    CHECK(result.rbs.features.kMax == 1);
    CHECK(result.rmst.edges == std::vector<UndirectedEdge>{{0, 1}});
    for (const auto& p : result.scan)
        CHECK((p.communities == 1 || p.communities == 2));
    emitOutputs(cfg, result);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("emitted files parse and reruns are byte identical") {
    auto dir = scratch("emit");
    auto input = writeFile(dir / "g.txt", twoCliques());
    auto cfg = smallConfig(input, dir / "a");
    auto result = runPipeline(cfg);
    emitOutputs(cfg, result);

    const auto out = dir / "a";
    for (const char* f : {"manifest.json", "rmst_edges.csv", "scan.csv", "robust_partitions.json"})
        CHECK(fs::exists(out / f));
    CHECK_FALSE(fs::exists(out / "similarity.csv"));

    auto manifest = OrderedJson::parse(slurp(out / "manifest.json"));
    CHECK(manifest["graph"]["n_nodes"] == 8);
    CHECK(manifest["config"]["seed"] == 0);
    CHECK(manifest.contains("timings_seconds"));
    auto robust = OrderedJson::parse(slurp(out / "robust_partitions.json"));
    REQUIRE(robust.is_array());
    for (const auto& r : robust)
        CHECK(r["assignment"].size() == 8);

    std::ifstream scanIn(out / "scan.csv");
    std::string header;
    std::getline(scanIn, header);
    CHECK(header == "t,n_communities,best_stability,mean_vi");

    auto cfg2 = cfg;
    cfg2.outputDir = (dir / "b").string();
    cfg2.threads = 1;
    cfg2.emitSimilarity = true;
    emitOutputs(cfg2, runPipeline(cfg2));
    CHECK(slurp(out / "scan.csv") == slurp(dir / "b" / "scan.csv"));
    CHECK(slurp(out / "rmst_edges.csv") == slurp(dir / "b" / "rmst_edges.csv"));
    CHECK(slurp(out / "robust_partitions.json") == slurp(dir / "b" / "robust_partitions.json"));
    CHECK(fs::exists(dir / "b" / "similarity.csv"));

    // Turning the flag off again removes the stale matrix.
    cfg2.emitSimilarity = false;
    emitOutputs(cfg2, runPipeline(cfg2));
    CHECK_FALSE(fs::exists(dir / "b" / "similarity.csv"));
    fs::remove_all(dir);
}

TEST_CASE("unwritable output directory fails before any stage runs") {
    auto dir = scratch("unwritable");
    auto input = writeFile(dir / "g.txt", "a b\nb a\n");
    auto blocker = writeFile(dir / "file", "x");
    auto cfg = smallConfig(input, blocker / "out");
    try {
        runPipeline(cfg);
        FAIL("expected an error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "output");
        CHECK_THROWS_AS(std::rethrow_exception(e.cause()), IoError);
    }
    fs::remove_all(dir);
}

TEST_CASE("stage errors carry the stage name") {
    auto dir = scratch("stages");
    SUBCASE("missing input") {
        auto cfg = smallConfig(dir / "nope.txt", dir / "out");
        try {
            runPipeline(cfg);
            FAIL("expected an error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "parse");
            CHECK_THROWS_AS(std::rethrow_exception(e.cause()), IoError);
        }
    }
    SUBCASE("malformed input") {
        auto cfg = smallConfig(writeFile(dir / "bad.txt", "a b c d\n"), dir / "out");
        try {
            runPipeline(cfg);
            FAIL("expected an error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "parse");
            CHECK_THROWS_AS(std::rethrow_exception(e.cause()), ParseError);
        }
    }
    SUBCASE("bad configuration") {
        auto cfg = smallConfig(writeFile(dir / "g.txt", "a b\n"), dir / "out");
        cfg.alpha = 1.5;
        try {
            runPipeline(cfg);
            FAIL("expected an error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "config");
        }
    }
    SUBCASE("disconnected RMST cannot happen, but a 1-node graph is rejected") {
        auto cfg = smallConfig(writeFile(dir / "g.txt", "a a\n"), dir / "out");
        CHECK_THROWS_AS(runPipeline(cfg), StageError);
    }
    fs::remove_all(dir);
}

TEST_CASE("CSV formats round trip") {
    std::vector<std::string> labels{"x", "y", "z"};
    SimilarityMatrix sim;
    sim.y.resize(3, 3);
    sim.y << 1.0, 0.1, 1.0 / 3.0,
             0.1, 1.0, 0.7,
             1.0 / 3.0, 0.7, 1.0;
    std::stringstream s;
    writeSimilarityCsv(s, labels, sim);
    auto back = readSimilarityCsv(s);
    CHECK(back.labels == labels);
    CHECK(back.similarity.y == sim.y);

    auto net = buildRmst(sim, 0.5, false);
    std::stringstream e;
    writeRmstEdgesCsv(e, labels, net, sim);
    auto readNet = readRmstEdgesCsv(e, labels);
    CHECK(readNet.labels == labels);
    CHECK(readNet.network.edges == net.edges);
    REQUIRE(readNet.network.weights.has_value());
    for (std::size_t k = 0; k < net.edges.size(); ++k)
        CHECK((*readNet.network.weights)[k] ==
              sim.y(static_cast<Eigen::Index>(net.edges[k].u), static_cast<Eigen::Index>(net.edges[k].v)));

    std::stringstream bad("label,a,b\na,1\n");
    CHECK_THROWS_AS(readSimilarityCsv(bad), ParseError);
}

TEST_CASE("formatDouble round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, 0.0})
        CHECK(std::stod(formatDouble(v)) == v);
}

TEST_CASE("command line exit codes and staged subcommands") {
    auto dir = scratch("cli");
    auto input = writeFile(dir / "g.txt", twoCliques());
    const std::string small = " --n-times 6 --runs 4 --t-min 0.01 --t-max 100 --threads 1";
    const auto d = dir.string();

    CHECK(cli("run " + input.string() + small + " --out " + d + "/run") == 0);
    CHECK(fs::exists(dir / "run" / "scan.csv"));
    CHECK(cli("run " + d + "/missing.txt --out " + d + "/x") == 5);
    CHECK(cli("run " + writeFile(dir / "bad.txt", "a\n").string() + " --out " + d + "/x") == 2);
    CHECK(cli("run " + input.string() + " --alpha 2 --out " + d + "/x") == 3);
    CHECK(cli("run " + input.string() + " --kmax nonsense --out " + d + "/x") == 3);
    CHECK(cli("run " + input.string() + " --out " + (dir / "g.txt").string() + "/sub") == 5);
    CHECK(cli("--bogus") == 3);

    CHECK(cli("rbs " + input.string() + " --kmax 3 --out " + d + "/s1") == 0);
    CHECK(fs::exists(dir / "s1" / "similarity.csv"));
    CHECK(cli("rmst " + d + "/s1/similarity.csv --out " + d + "/s2") == 0);
    CHECK(fs::exists(dir / "s2" / "rmst_edges.csv"));
    CHECK(cli("scan " + d + "/s2/rmst_edges.csv --nodes-file " + d + "/s2/nodes.txt" + small + " --out " + d +
              "/s3") == 0);
    CHECK(fs::exists(dir / "s3" / "scan.csv"));
    CHECK(fs::exists(dir / "s3" / "robust_partitions.json"));

    // The staged route and the one-shot route agree.
    CHECK(cli("run " + input.string() + " --kmax 3" + small + " --out " + d + "/whole") == 0);
    CHECK(slurp(dir / "whole" / "scan.csv") == slurp(dir / "s3" / "scan.csv"));
    fs::remove_all(dir);
}
