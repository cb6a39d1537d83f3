#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rolecomm/graph_io.hpp"
#include "rolecomm/rbs.hpp"
#include "rolecomm/rmst.hpp"
#include "rolecomm/stability.hpp"

namespace rolecomm {

using OrderedJson = nlohmann::ordered_json;

struct PipelineConfig {
    std::string inputPath;
    std::optional<std::string> nodesPath;
    double alpha = RbsConfig::kDefaultAlpha;
    std::optional<std::size_t> kMax;
    double gamma = 0.5;
    bool weightedSimilarity = false;
    double tMin = 0.1;
    double tMax = 1000.0;
    std::size_t nTimes = 100;
    std::size_t runs = 100;
    std::uint64_t seed = 0;
    double viThreshold = 0.05;
    std::size_t minPlateau = 3;
    std::string outputDir = "rolecomm_out";
    bool emitSimilarity = false;
    /// 0 selects the machine's hardware concurrency.
    std::size_t threads = 0;

    void validate() const;
    RbsConfig rbsConfig() const;
    OrderedJson toJson() const;
};

struct StageTimings {
    double parse = 0.0;
    double rbs = 0.0;
    double rmst = 0.0;
    double markov = 0.0;
    double scan = 0.0;
};

struct PipelineResult {
    std::vector<std::string> labels;
    ParseWarnings warnings;
    std::size_t edgeCount = 0;
    RbsResult rbs;
    RmstNetwork rmst;
    std::vector<double> times;
    std::vector<ScanPoint> scan;
    std::vector<RobustScale> robust;
    StageTimings timings;
    OrderedJson manifest;
};

/// Error raised by a pipeline stage, tagged with the stage name. The
/// original exception is kept for exit-code mapping.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, std::exception_ptr cause, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), cause_(std::move(cause)) {}

    const std::string& stage() const { return stage_; }
    std::exception_ptr cause() const { return cause_; }

private:
    std::string stage_;
    std::exception_ptr cause_;
};

/// Creates the directory if needed and probes it with a scratch file.
/// Throws IoError if it cannot be written.
void ensureWritableDirectory(const std::filesystem::path& dir);

/// Parse -> RBS -> RMST -> Markov-time scan -> robust scales. Checks the
/// output directory up front but writes nothing.
PipelineResult runPipeline(const PipelineConfig& cfg);

/// Writes manifest.json, rmst_edges.csv, scan.csv, robust_partitions.json
/// and, when requested, similarity.csv. Files already written are removed
/// if a later one fails.
void emitOutputs(const PipelineConfig& cfg, const PipelineResult& result);

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Header "label,<l_0>,...,<l_n-1>", then one row per node.
void writeSimilarityCsv(std::ostream& out, const std::vector<std::string>& labels,
                        const SimilarityMatrix& sim);

struct LabeledSimilarity {
    std::vector<std::string> labels;
    SimilarityMatrix similarity;
};
LabeledSimilarity readSimilarityCsv(std::istream& in);

/// Header "source_label,target_label,similarity".
void writeRmstEdgesCsv(std::ostream& out, const std::vector<std::string>& labels,
                       const RmstNetwork& net, const SimilarityMatrix& sim);

struct LabeledNetwork {
    std::vector<std::string> labels;
    RmstNetwork network;
};
/// Node order follows `nodeLabels` when given, first appearance otherwise.
/// The similarity column becomes the edge weights.
LabeledNetwork readRmstEdgesCsv(std::istream& in,
                                const std::optional<std::vector<std::string>>& nodeLabels = {});

/// Header "t,n_communities,best_stability,mean_vi".
void writeScanCsv(std::ostream& out, const std::vector<ScanPoint>& scan);

/// Array of {t, n_communities, stability, mean_vi, assignment}.
OrderedJson robustPartitionsJson(const std::vector<RobustScale>& robust);

/// Shortest round-trip decimal form of a double.
std::string formatDouble(double value);

} // namespace rolecomm
