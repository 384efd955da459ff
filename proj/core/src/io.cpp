#include "evoblock/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evoblock/errors.hpp"

namespace evoblock {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    return cells;
}

template <typename T>
T parse_number(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    T value{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw IoError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + s + "'");
    return value;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (ec != std::errc{}) throw Error("format_double failed");
    return std::string(buf, ptr);
}

std::vector<EventRecord> read_events_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file, expected header src,dst,start,duration");
    const auto header = split_csv(line);
    if (header != std::vector<std::string>{"src", "dst", "start", "duration"})
        throw IoError(path.string() + ": header must be src,dst,start,duration");
    std::vector<EventRecord> events;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 4) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
        events.push_back({parse_number<Index>(cells[0], path, lineno), parse_number<Index>(cells[1], path, lineno),
                          parse_number<double>(cells[2], path, lineno), parse_number<double>(cells[3], path, lineno)});
    }
    return events;
}

void write_events_csv(const std::filesystem::path& path, const std::vector<EventRecord>& events) {
    auto out = open_out(path);
    out << "src,dst,start,duration\n";
    for (const auto& e : events)
        out << e.src << ',' << e.dst << ',' << format_double(e.start) << ',' << format_double(e.duration) << '\n';
    finish(out, path);
}

std::filesystem::path sidecar_path(const std::filesystem::path& snapshot) {
    auto p = snapshot;
    p.replace_extension(".json");
    if (p == snapshot) p += ".meta.json";
    return p;
}

void write_snapshots(const std::filesystem::path& path, const TemporalNetwork& net,
                     const std::map<std::string, std::string>& provenance) {
    {
        auto out = open_out(path);
        out << "k,src,dst\n";
        for (std::size_t k = 0; k < net.steps(); ++k) {
            const auto& s = net.slice(k);
            const auto ro = s.row_offsets();
            const auto ci = s.col_indices();
            for (Index i = 0; i < s.rows(); ++i)
                for (Index p = ro[static_cast<std::size_t>(i)]; p < ro[static_cast<std::size_t>(i) + 1]; ++p)
                    out << (k + 1) << ',' << i << ',' << ci[static_cast<std::size_t>(p)] << '\n';
        }
        finish(out, path);
    }
    nlohmann::ordered_json meta;
    meta["n"] = net.nodes();
    meta["M"] = net.steps();
    meta["times"] = net.times();
    if (!net.labels().empty()) meta["labels"] = net.labels();
    for (const auto& [k, v] : provenance) meta[k] = v;
    const auto side = sidecar_path(path);
    auto out = open_out(side);
    out << meta.dump(2) << '\n';
    finish(out, side);
}

TemporalNetwork read_snapshots(const std::filesystem::path& path) {
    const auto side = sidecar_path(path);
    nlohmann::json meta;
    try {
        auto in = open_in(side);
        meta = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(side.string() + ": " + e.what());
    }
    Index n = 0;
    std::size_t m = 0;
    std::vector<double> times;
    std::vector<std::string> labels;
    try {
        n = meta.at("n").get<Index>();
        m = meta.at("M").get<std::size_t>();
        if (meta.contains("times")) times = meta.at("times").get<std::vector<double>>();
        if (meta.contains("labels")) labels = meta.at("labels").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(side.string() + ": " + e.what());
    }
    if (m < 1) throw IoError(side.string() + ": M must be at least 1");
    if (times.empty())
        for (std::size_t k = 0; k < m; ++k) times.push_back(static_cast<double>(k + 1));

    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"k", "src", "dst"})
        throw IoError(path.string() + ": header must be k,src,dst");
    std::vector<std::vector<Triplet>> entries(m);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 3) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 3 fields");
        const auto k = parse_number<std::size_t>(cells[0], path, lineno);
        const auto i = parse_number<Index>(cells[1], path, lineno);
        const auto j = parse_number<Index>(cells[2], path, lineno);
        if (k < 1 || k > m || i < 0 || i >= n || j < 0 || j >= n)
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": entry out of range");
        entries[k - 1].push_back({i, j, 1.0});
    }
    std::vector<SparseMatrix> slices;
    for (auto& e : entries) slices.push_back(SparseMatrix::from_triplets(n, n, std::move(e)));
    try {
        return TemporalNetwork(n, std::move(times), std::move(slices), std::move(labels));
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    throw InvalidArgument("unknown format '" + s + "' (expected csv or json)");
}

Metadata report_metadata(const CentralityReport& r) {
    return {{"method", r.method},
            {"backend", r.backend},
            {"a", format_double(r.params.a)},
            {"b", format_double(r.params.b)},
            {"normalize", r.params.normalize ? "true" : "false"},
            {"rho_star", format_double(r.rho_star)},
            {"iterations", std::to_string(r.iterations)},
            {"residual", format_double(r.residual)}};
}

void write_report(const std::filesystem::path& path, const CentralityReport& report, ReportFormat format,
                  const Metadata& extra) {
    auto meta = report_metadata(report);
    meta.insert(meta.end(), extra.begin(), extra.end());
    const std::size_t n = report.scores.size();
    std::vector<std::size_t> rank(n);
    for (std::size_t p = 0; p < report.ranking.size(); ++p) rank[static_cast<std::size_t>(report.ranking[p])] = p + 1;

    auto out = open_out(path);
    if (format == ReportFormat::Csv) {
        for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
        out << "node_id,score,rank\n";
        for (std::size_t i = 0; i < n; ++i) out << i << ',' << format_double(report.scores[i]) << ',' << rank[i] << '\n';
    } else {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : meta) j["metadata"][k] = v;
        j["nodes"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < n; ++i)
            j["nodes"].push_back({{"node_id", i}, {"score", report.scores[i]}, {"rank", rank[i]}});
        out << j.dump(2) << '\n';
    }
    finish(out, path);
}

void write_scatter(const std::filesystem::path& path, const std::vector<double>& out_degree,
                   const std::vector<double>& scores) {
    if (out_degree.size() != scores.size()) throw DimensionError("write_scatter: column lengths differ");
    auto out = open_out(path);
    out << "aggregate_out_degree,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
        out << format_double(out_degree[i]) << ',' << format_double(scores[i]) << '\n';
    finish(out, path);
}

std::vector<double> aggregate_out_degree(const TemporalNetwork& net) { return aggregate(net).row_sums(); }

}  // namespace evoblock
