// rolecomm: role-communities of directed networks.
//
//   rolecomm run  <edges>            full pipeline
//   rolecomm rbs  <edges>            similarity.csv + rbs.json
//   rolecomm rmst <similarity.csv>   rmst_edges.csv + nodes.txt
//   rolecomm scan <rmst_edges.csv>   scan.csv + robust_partitions.json

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "rolecomm/error.hpp"
#include "rolecomm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rolecomm;

namespace {

enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kParse = 2,
    kConfig = 3,
    kNumerical = 4,
    kIo = 5,
};

int exitCodeFor(std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const StageError& e) {
        return exitCodeFor(e.cause());
    } catch (const ParseError&) {
        return kParse;
    } catch (const ConfigError&) {
        return kConfig;
    } catch (const NumericalError&) {
        return kNumerical;
    } catch (const IoError&) {
        return kIo;
    } catch (...) {
        return kUnexpected;
    }
}

std::optional<std::size_t> parseKmax(const std::string& text) {
    if (text == "auto")
        return std::nullopt;
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || text.empty() || text[0] == '-')
        throw ConfigError("--kmax expects a positive integer or 'auto', got '" + text + "'");
    return static_cast<std::size_t>(value);
}

void writeFile(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush())
        throw IoError("failed to write '" + path.string() + "'");
}

void openInput(std::ifstream& in, const std::string& path) {
    in.open(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
}

void reportWarnings(const ParseWarnings& w) {
    if (w.duplicateEdges)
        std::cerr << "warning: collapsed " << w.duplicateEdges << " duplicate edge line(s)\n";
    if (w.selfLoops)
        std::cerr << "warning: kept " << w.selfLoops << " self-loop(s)\n";
    if (w.ignoredWeights)
        std::cerr << "warning: ignored the weight column on " << w.ignoredWeights << " line(s)\n";
}

struct Options {
    PipelineConfig cfg;
    std::string kmax = "auto";
    std::string nodesFile;
};

void addRbsFlags(CLI::App* app, Options& o) {
    app->add_option("--alpha", o.cfg.alpha, "Path-length weighting in (0,1)")->capture_default_str();
    app->add_option("--kmax", o.kmax, "Longest path length, or 'auto'")->capture_default_str();
    app->add_option("--nodes-file", o.nodesFile, "Node labels, one per line (fixes order, adds isolated nodes)");
}

void addScanFlags(CLI::App* app, Options& o) {
    app->add_flag("--weighted", o.cfg.weightedSimilarity, "Weight RMST edges by similarity");
    app->add_option("--t-min", o.cfg.tMin, "Smallest Markov time")->capture_default_str();
    app->add_option("--t-max", o.cfg.tMax, "Largest Markov time")->capture_default_str();
    app->add_option("--n-times", o.cfg.nTimes, "Log-spaced grid points")->capture_default_str();
    app->add_option("--runs", o.cfg.runs, "Louvain runs per Markov time")->capture_default_str();
    app->add_option("--seed", o.cfg.seed, "Master random seed")->capture_default_str();
    app->add_option("--vi-threshold", o.cfg.viThreshold, "Mean VI below which a dip counts")->capture_default_str();
    app->add_option("--min-plateau", o.cfg.minPlateau, "Grid points of constant community count")->capture_default_str();
    app->add_option("--threads", o.cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

int runFull(Options& o) {
    o.cfg.kMax = parseKmax(o.kmax);
    if (!o.nodesFile.empty())
        o.cfg.nodesPath = o.nodesFile;
    auto result = runPipeline(o.cfg);
    reportWarnings(result.warnings);
    emitOutputs(o.cfg, result);
    std::cout << "N=" << result.labels.size() << " edges=" << result.edgeCount
              << " lambda_1=" << result.rbs.spectral.lambda1 << " K_max=" << result.rbs.features.kMax
              << " rmst_edges=" << result.rmst.edges.size() << '\n';
    for (const auto& s : result.robust) {
        std::cout << "robust scale t=" << s.t << " communities=" << s.communities
                  << " mean_vi=" << s.meanVi << " plateau=" << s.plateauLength() << '\n';
    }
    std::cout << "outputs written to " << o.cfg.outputDir << '\n';
    return kOk;
}

int runRbs(Options& o) {
    ensureWritableDirectory(o.cfg.outputDir);
    ParseOptions parseOptions;
    if (!o.nodesFile.empty())
        parseOptions.nodeLabels = readNodeLabelsFile(o.nodesFile);
    auto parsed = readEdgeListFile(o.cfg.inputPath, parseOptions);
    reportWarnings(parsed.warnings);
    RbsConfig rc = o.cfg.rbsConfig();
    rc.kMax = parseKmax(o.kmax);
    auto rbs = computeRbs(parsed.graph, rc);

    std::ostringstream sim;
    writeSimilarityCsv(sim, parsed.graph.labels(), rbs.similarity);
    OrderedJson info = {{"n_nodes", parsed.graph.size()},
                        {"n_edges", parsed.graph.edgeCount()},
                        {"alpha", rc.alpha},
                        {"lambda_1", rbs.spectral.lambda1},
                        {"beta", rbs.spectral.beta},
                        {"power_iterations", rbs.spectral.iterations},
                        {"k_max", rbs.features.kMax}};
    const fs::path dir(o.cfg.outputDir);
    writeFile(dir / "similarity.csv", sim.str());
    writeFile(dir / "rbs.json", info.dump(2) + "\n");
    std::cout << "lambda_1=" << rbs.spectral.lambda1 << " beta=" << rbs.spectral.beta
              << " K_max=" << rbs.features.kMax << '\n';
    return kOk;
}

int runRmst(Options& o) {
    if (!(o.cfg.gamma >= 0.0))
        throw ConfigError("gamma must be nonnegative");
    ensureWritableDirectory(o.cfg.outputDir);
    std::ifstream in;
    openInput(in, o.cfg.inputPath);
    auto labeled = readSimilarityCsv(in);
    auto net = buildRmst(labeled.similarity, o.cfg.gamma, false);

    std::ostringstream edges, nodes;
    writeRmstEdgesCsv(edges, labeled.labels, net, labeled.similarity);
    for (const auto& l : labeled.labels)
        nodes << l << '\n';
    const fs::path dir(o.cfg.outputDir);
    writeFile(dir / "rmst_edges.csv", edges.str());
    writeFile(dir / "nodes.txt", nodes.str());
    std::cout << "rmst_edges=" << net.edges.size() << " mst_edges=" << net.mstEdges.size() << '\n';
    return kOk;
}

int runScan(Options& o) {
    PipelineConfig& c = o.cfg;
    if (c.runs < 2)
        throw ConfigError("runs must be at least 2");
    if (c.minPlateau < 1)
        throw ConfigError("min_plateau must be at least 1");
    ensureWritableDirectory(c.outputDir);
    std::optional<std::vector<std::string>> labels;
    if (!o.nodesFile.empty())
        labels = readNodeLabelsFile(o.nodesFile);
    std::ifstream in;
    openInput(in, c.inputPath);
    auto labeled = readRmstEdgesCsv(in, labels);
    auto mp = markovProcess(labeled.network, c.weightedSimilarity);
    auto times = logGrid(c.tMin, c.tMax, c.nTimes);
    ScanOptions so;
    so.runs = c.runs;
    so.seed = c.seed;
    so.threads = c.threads;
    auto scan = timeScan(mp, times, so);
    auto robust = selectRobust(scan, c.viThreshold, c.minPlateau);

    std::ostringstream scanCsv;
    writeScanCsv(scanCsv, scan);
    const fs::path dir(c.outputDir);
    writeFile(dir / "scan.csv", scanCsv.str());
    writeFile(dir / "robust_partitions.json", robustPartitionsJson(robust).dump(2) + "\n");
    for (const auto& s : robust)
        std::cout << "robust scale t=" << s.t << " communities=" << s.communities << " mean_vi=" << s.meanVi << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Role-communities of directed networks: role-based similarity, relaxed "
                 "minimum spanning tree and Markov stability"};
    app.set_version_flag("--version", std::string(ROLECOMM_VERSION));
    app.require_subcommand(1);

    Options o;
    auto* run = app.add_subcommand("run", "Run the full pipeline on an edge list");
    run->add_option("input", o.cfg.inputPath, "Directed edge list")->required();
    addRbsFlags(run, o);
    run->add_option("--gamma", o.cfg.gamma, "RMST relaxation")->capture_default_str();
    addScanFlags(run, o);
    run->add_option("--out", o.cfg.outputDir, "Output directory")->capture_default_str();
    run->add_flag("--emit-similarity", o.cfg.emitSimilarity, "Also write similarity.csv");

    auto* rbs = app.add_subcommand("rbs", "Compute the role-based similarity matrix");
    rbs->add_option("input", o.cfg.inputPath, "Directed edge list")->required();
    addRbsFlags(rbs, o);
    rbs->add_option("--out", o.cfg.outputDir, "Output directory")->capture_default_str();

    auto* rmst = app.add_subcommand("rmst", "Sparsify a similarity matrix into the RMST network");
    rmst->add_option("input", o.cfg.inputPath, "similarity.csv from the rbs stage")->required();
    rmst->add_option("--gamma", o.cfg.gamma, "RMST relaxation")->capture_default_str();
    rmst->add_option("--out", o.cfg.outputDir, "Output directory")->capture_default_str();

    auto* scan = app.add_subcommand("scan", "Markov stability scan of an RMST network");
    scan->add_option("input", o.cfg.inputPath, "rmst_edges.csv from the rmst stage")->required();
    scan->add_option("--nodes-file", o.nodesFile, "Node order (nodes.txt from the rmst stage)");
    addScanFlags(scan, o);
    scan->add_option("--out", o.cfg.outputDir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (run->parsed())
            return runFull(o);
        if (rbs->parsed())
            return runRbs(o);
        if (rmst->parsed())
            return runRmst(o);
        return runScan(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exitCodeFor(std::current_exception());
    }
}
