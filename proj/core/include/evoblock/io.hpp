#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "evoblock/centrality.hpp"
#include "evoblock/temporal_network.hpp"

namespace evoblock {

/// `src,dst,start,duration` with a required header line.
std::vector<EventRecord> read_events_csv(const std::filesystem::path& path);
void write_events_csv(const std::filesystem::path& path, const std::vector<EventRecord>& events);

/// Snapshot CSV `k,src,dst` (1-based k) plus a JSON sidecar with the same
/// basename holding n, M, times, labels and free-form provenance fields.
std::filesystem::path sidecar_path(const std::filesystem::path& snapshot);
void write_snapshots(const std::filesystem::path& path, const TemporalNetwork& net,
                     const std::map<std::string, std::string>& provenance = {});
TemporalNetwork read_snapshots(const std::filesystem::path& path);

enum class ReportFormat { Csv, Json };
ReportFormat parse_format(const std::string& s);

/// Key/value metadata written ahead of the score table.
using Metadata = std::vector<std::pair<std::string, std::string>>;

Metadata report_metadata(const CentralityReport& report);

/// Table of node_id, score, rank. CSV puts metadata on leading `# key: value`
/// lines; JSON nests it under "metadata".
void write_report(const std::filesystem::path& path, const CentralityReport& report, ReportFormat format,
                  const Metadata& extra = {});

/// Two columns for plotting: aggregate out-degree against score.
void write_scatter(const std::filesystem::path& path, const std::vector<double>& out_degree,
                   const std::vector<double>& scores);

/// Row sums of the aggregate adjacency matrix.
std::vector<double> aggregate_out_degree(const TemporalNetwork& net);

/// Shortest decimal that round-trips (17 significant digits).
std::string format_double(double x);

}  // namespace evoblock
