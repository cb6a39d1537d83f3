#include "rolecomm/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "rolecomm/error.hpp"

namespace rolecomm {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    if (inputPath.empty())
        throw ConfigError("no input edge list given");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("alpha must lie in (0, 1)");
    if (!(gamma >= 0.0))
        throw ConfigError("gamma must be nonnegative");
    if (!(tMin > 0.0) || !(tMin < tMax))
        throw ConfigError("Markov times need 0 < t_min < t_max");
    if (nTimes < 2)
        throw ConfigError("n_times must be at least 2");
    if (runs < 2)
        throw ConfigError("runs must be at least 2");
    if (!(viThreshold >= 0.0))
        throw ConfigError("vi_threshold must be nonnegative");
    if (minPlateau < 1)
        throw ConfigError("min_plateau must be at least 1");
    if (outputDir.empty())
        throw ConfigError("output directory must be set");
}

RbsConfig PipelineConfig::rbsConfig() const {
    RbsConfig rc;
    rc.alpha = alpha;
    rc.kMax = kMax;
    return rc;
}

OrderedJson PipelineConfig::toJson() const {
    OrderedJson j;
    j["input_path"] = inputPath;
    j["nodes_path"] = nodesPath ? OrderedJson(*nodesPath) : OrderedJson(nullptr);
    j["alpha"] = alpha;
    j["k_max"] = kMax ? OrderedJson(*kMax) : OrderedJson("auto");
    j["gamma"] = gamma;
    j["weighted_similarity"] = weightedSimilarity;
    j["t_min"] = tMin;
    j["t_max"] = tMax;
    j["n_times"] = nTimes;
    j["runs"] = runs;
    j["seed"] = seed;
    j["vi_threshold"] = viThreshold;
    j["min_plateau"] = minPlateau;
    j["output_dir"] = outputDir;
    j["emit_similarity"] = emitSimilarity;
    j["threads"] = threads;
    return j;
}

std::string formatDouble(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw IoError("cannot format floating-point value");
    return std::string(buf, ptr);
}

void ensureWritableDirectory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory '" + dir.string() + "'");
    const fs::path probe = dir / ".rolecomm_write_probe";
    {
        std::ofstream out(probe);
        if (!out || !(out << "probe") || !out.flush())
            throw IoError("output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
}

namespace {

template <typename F>
auto runStage(const std::string& name, double& seconds, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    try {
        auto value = body();
        finish();
        return value;
    } catch (const std::exception& e) {
        throw StageError(name, std::current_exception(), e.what());
    }
}

OrderedJson buildManifest(const PipelineConfig& cfg, const PipelineResult& r) {
    OrderedJson m;
    m["tool"] = "rolecomm";
    m["version"] = ROLECOMM_VERSION;
    m["config"] = cfg.toJson();
    m["graph"] = {{"n_nodes", r.labels.size()},
                  {"n_edges", r.edgeCount},
                  {"duplicate_edges", r.warnings.duplicateEdges},
                  {"self_loops", r.warnings.selfLoops},
                  {"ignored_weights", r.warnings.ignoredWeights}};
    m["rbs"] = {{"lambda_1", r.rbs.spectral.lambda1},
                {"beta", r.rbs.spectral.beta},
                {"power_iterations", r.rbs.spectral.iterations},
                {"k_max", r.rbs.features.kMax}};
    m["rmst"] = {{"n_edges", r.rmst.edges.size()},
                 {"n_mst_edges", r.rmst.mstEdges.size()},
                 {"gamma", r.rmst.gamma},
                 {"weighted", cfg.weightedSimilarity}};
    m["grid"] = r.times;

    OrderedJson perTime = OrderedJson::array();
    for (const auto& p : r.scan) {
        perTime.push_back({{"t", p.t},
                           {"n_communities", p.communities},
                           {"best_stability", p.bestStability},
                           {"mean_vi", p.meanVi},
                           {"vi_to_previous", p.viToPrevious}});
    }
    m["scan"] = std::move(perTime);

    OrderedJson robust = OrderedJson::array();
    for (const auto& s : r.robust) {
        robust.push_back({{"t", s.t},
                          {"n_communities", s.communities},
                          {"stability", s.stability},
                          {"mean_vi", s.meanVi},
                          {"plateau_t_min", r.scan[s.plateauBegin].t},
                          {"plateau_t_max", r.scan[s.plateauEnd - 1].t},
                          {"plateau_length", s.plateauLength()},
                          {"vi_dip", s.viDip}});
    }
    m["robust_scales"] = std::move(robust);
    m["timings_seconds"] = {{"parse", r.timings.parse},
                            {"rbs", r.timings.rbs},
                            {"rmst", r.timings.rmst},
                            {"markov", r.timings.markov},
                            {"scan", r.timings.scan}};
    m["node_labels"] = r.labels;
    return m;
}

} // namespace

PipelineResult runPipeline(const PipelineConfig& cfg) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw StageError("config", std::current_exception(), e.what());
    }
    try {
        ensureWritableDirectory(cfg.outputDir);
    } catch (const std::exception& e) {
        throw StageError("output", std::current_exception(), e.what());
    }

    PipelineResult r;
    auto parsed = runStage("parse", r.timings.parse, [&] {
        ParseOptions options;
        if (cfg.nodesPath)
            options.nodeLabels = readNodeLabelsFile(*cfg.nodesPath);
        return readEdgeListFile(cfg.inputPath, options);
    });
    r.labels = parsed.graph.labels();
    r.warnings = parsed.warnings;
    r.edgeCount = parsed.graph.edgeCount();

    r.rbs = runStage("rbs", r.timings.rbs, [&] { return computeRbs(parsed.graph, cfg.rbsConfig()); });
    r.rmst = runStage("rmst", r.timings.rmst,
                      [&] { return buildRmst(r.rbs.similarity, cfg.gamma, cfg.weightedSimilarity); });
    auto mp = runStage("markov", r.timings.markov,
                       [&] { return markovProcess(r.rmst, cfg.weightedSimilarity); });
    r.times = logGrid(cfg.tMin, cfg.tMax, cfg.nTimes);
    r.scan = runStage("scan", r.timings.scan, [&] {
        ScanOptions options;
        options.runs = cfg.runs;
        options.seed = cfg.seed;
        options.threads = cfg.threads;
        return timeScan(mp, r.times, options);
    });
    r.robust = selectRobust(r.scan, cfg.viThreshold, cfg.minPlateau);
    r.manifest = buildManifest(cfg, r);
    return r;
}

void writeSimilarityCsv(std::ostream& out, const std::vector<std::string>& labels,
                        const SimilarityMatrix& sim) {
    out << "label";
    for (const auto& l : labels)
        out << ',' << l;
    out << '\n';
    for (Eigen::Index i = 0; i < sim.y.rows(); ++i) {
        out << labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < sim.y.cols(); ++j)
            out << ',' << formatDouble(sim.y(i, j));
        out << '\n';
    }
}

namespace {

std::vector<std::string> splitCsv(const std::string& line) {
    std::vector<std::string> fields;
    for (auto f : splitFields(line))
        fields.emplace_back(f);
    return fields;
}

double parseDouble(const std::string& s, std::size_t lineNo) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(lineNo) + ": '" + s + "' is not a number");
    return value;
}

} // namespace

LabeledSimilarity readSimilarityCsv(std::istream& in) {
    LabeledSimilarity result;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("similarity file is empty");
    auto header = splitCsv(line);
    if (header.empty() || header[0] != "label")
        throw ParseError("similarity file must start with a 'label' header");
    result.labels.assign(header.begin() + 1, header.end());
    const auto n = static_cast<Eigen::Index>(result.labels.size());
    result.similarity.y.resize(n, n);

    Eigen::Index row = 0;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line == "\r")
            continue;
        auto fields = splitCsv(line);
        if (row >= n)
            throw ParseError("line " + std::to_string(lineNo) + ": more rows than labels");
        if (static_cast<Eigen::Index>(fields.size()) != n + 1)
            throw ParseError("line " + std::to_string(lineNo) + ": expected "
                             + std::to_string(n + 1) + " fields");
        if (fields[0] != result.labels[static_cast<std::size_t>(row)])
            throw ParseError("line " + std::to_string(lineNo) + ": row label '" + fields[0]
                             + "' does not match header order");
        for (Eigen::Index j = 0; j < n; ++j)
            result.similarity.y(row, j) = parseDouble(fields[static_cast<std::size_t>(j + 1)], lineNo);
        ++row;
    }
    if (row != n)
        throw ParseError("similarity file has " + std::to_string(row) + " rows for "
                         + std::to_string(n) + " labels");
    return result;
}

void writeRmstEdgesCsv(std::ostream& out, const std::vector<std::string>& labels,
                       const RmstNetwork& net, const SimilarityMatrix& sim) {
    out << "source_label,target_label,similarity\n";
    for (const auto& e : net.edges) {
        out << labels[e.u] << ',' << labels[e.v] << ','
            << formatDouble(sim.y(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)))
            << '\n';
    }
}

LabeledNetwork readRmstEdgesCsv(std::istream& in, const std::optional<std::vector<std::string>>& nodeLabels) {
    LabeledNetwork result;
    std::unordered_map<std::string, std::size_t> index;
    if (nodeLabels) {
        result.labels = *nodeLabels;
        for (std::size_t i = 0; i < result.labels.size(); ++i) {
            if (!index.emplace(result.labels[i], i).second)
                throw ParseError("duplicate node label '" + result.labels[i] + "'");
        }
    }
    auto lookup = [&](const std::string& label, std::size_t lineNo) {
        if (auto it = index.find(label); it != index.end())
            return it->second;
        if (nodeLabels)
            throw ParseError("line " + std::to_string(lineNo) + ": unknown node '" + label + "'");
        index.emplace(label, result.labels.size());
        result.labels.push_back(label);
        return result.labels.size() - 1;
    };

    std::string line;
    if (!std::getline(in, line) || splitCsv(line)
        != std::vector<std::string>{"source_label", "target_label", "similarity"})
        throw ParseError("RMST edge file must start with 'source_label,target_label,similarity'");

    std::vector<std::pair<UndirectedEdge, double>> edges;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line == "\r")
            continue;
        auto fields = splitCsv(line);
        if (fields.size() != 3)
            throw ParseError("line " + std::to_string(lineNo) + ": expected 3 fields");
        std::size_t a = lookup(fields[0], lineNo), b = lookup(fields[1], lineNo);
        if (a == b)
            throw ParseError("line " + std::to_string(lineNo) + ": self-loop in RMST network");
        double w = parseDouble(fields[2], lineNo);
        edges.push_back({a < b ? UndirectedEdge{a, b} : UndirectedEdge{b, a}, w});
    }
    std::sort(edges.begin(), edges.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (edges[k].first == edges[k - 1].first)
            throw ParseError("duplicate RMST edge");
    }

    RmstNetwork& net = result.network;
    net.n = result.labels.size();
    std::vector<double> weights;
    for (const auto& [e, w] : edges) {
        net.edges.push_back(e);
        weights.push_back(w);
    }
    net.weights = std::move(weights);
    return result;
}

void writeScanCsv(std::ostream& out, const std::vector<ScanPoint>& scan) {
    out << "t,n_communities,best_stability,mean_vi\n";
    for (const auto& p : scan) {
        out << formatDouble(p.t) << ',' << p.communities << ',' << formatDouble(p.bestStability)
            << ',' << formatDouble(p.meanVi) << '\n';
    }
}

OrderedJson robustPartitionsJson(const std::vector<RobustScale>& robust) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& s : robust) {
        arr.push_back({{"t", s.t},
                       {"n_communities", s.communities},
                       {"stability", s.stability},
                       {"mean_vi", s.meanVi},
                       {"assignment", s.partition.assignment}});
    }
    return arr;
}

void emitOutputs(const PipelineConfig& cfg, const PipelineResult& result) {
    const fs::path dir(cfg.outputDir);
    ensureWritableDirectory(dir);

    std::vector<std::pair<std::string, std::string>> files;
    auto add = [&](const std::string& name, auto&& writer) {
        std::ostringstream os;
        writer(os);
        files.emplace_back(name, os.str());
    };
    add("manifest.json", [&](std::ostream& os) { os << result.manifest.dump(2) << '\n'; });
    add("rmst_edges.csv", [&](std::ostream& os) {
        writeRmstEdgesCsv(os, result.labels, result.rmst, result.rbs.similarity);
    });
    add("scan.csv", [&](std::ostream& os) { writeScanCsv(os, result.scan); });
    add("robust_partitions.json",
        [&](std::ostream& os) { os << robustPartitionsJson(result.robust).dump(2) << '\n'; });
    if (cfg.emitSimilarity) {
        add("similarity.csv",
            [&](std::ostream& os) { writeSimilarityCsv(os, result.labels, result.rbs.similarity); });
    }

    if (!cfg.emitSimilarity) {
        std::error_code ec;
        fs::remove(dir / "similarity.csv", ec);
    }

    std::vector<fs::path> written;
    for (const auto& [name, content] : files) {
        const fs::path path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out || !(out << content) || !out.flush()) {
            std::error_code ec;
            for (const auto& p : written)
                fs::remove(p, ec);
            fs::remove(path, ec);
            throw IoError("failed to write '" + path.string() + "'");
        }
        written.push_back(path);
    }
}

} // namespace rolecomm
