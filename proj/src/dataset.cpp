#include "fpdetect/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fpdetect::dataset {

namespace {

using nlohmann::json;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

TimeFrame read_jsonl(std::istream& in) {
    TimeFrame frame;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            fail_line(lineno, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object() || !obj.contains("features") || !obj.contains("claimed_id"))
            fail_line(lineno, "expected object with 'features' and 'claimed_id'");
        Fingerprint fp;
        for (const auto& v : obj.at("features")) fp.features.push_back(v.get<double>());
        fp.claimed_id = obj.at("claimed_id").get<std::string>();
        if (obj.contains("truth_id") && !obj.at("truth_id").is_null())
            fp.truth_id = obj.at("truth_id").get<std::string>();
        frame.fingerprints.push_back(std::move(fp));
    }
    frame.validate();
    return frame;
}

void write_jsonl(std::ostream& out, const TimeFrame& frame) {
    for (const auto& fp : frame.fingerprints) {
        json obj;
        obj["features"] = fp.features;
        obj["claimed_id"] = fp.claimed_id;
        if (fp.truth_id) obj["truth_id"] = *fp.truth_id;
        out << obj.dump() << '\n';
    }
}

TimeFrame read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file");
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) header.push_back(col);
    }
    if (header.size() < 3 || header[header.size() - 2] != "claimed_id" ||
        header.back() != "truth_id")
        throw std::runtime_error("CSV header must be f0,...,f{d-1},claimed_id,truth_id");
    const std::size_t d = header.size() - 2;
    for (std::size_t j = 0; j < d; ++j) {
        if (header[j] != "f" + std::to_string(j))
            throw std::runtime_error("CSV header must be f0,...,f{d-1},claimed_id,truth_id");
    }

    TimeFrame frame;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (cells.size() != d + 2) fail_line(lineno, "wrong number of columns");
        Fingerprint fp;
        fp.features.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            try {
                std::size_t pos = 0;
                fp.features[j] = std::stod(cells[j], &pos);
                if (pos != cells[j].size()) throw std::invalid_argument("trailing chars");
            } catch (const std::exception&) {
                fail_line(lineno, "invalid number '" + cells[j] + "'");
            }
        }
        fp.claimed_id = cells[d];
        if (!cells[d + 1].empty()) fp.truth_id = cells[d + 1];
        frame.fingerprints.push_back(std::move(fp));
    }
    frame.validate();
    return frame;
}

void write_csv(std::ostream& out, const TimeFrame& frame) {
    const std::size_t d = frame.dim();
    for (std::size_t j = 0; j < d; ++j) out << 'f' << j << ',';
    out << "claimed_id,truth_id\n";
    for (const auto& fp : frame.fingerprints) {
        for (double v : fp.features) out << format_double(v) << ',';
        out << fp.claimed_id << ',' << (fp.truth_id ? *fp.truth_id : "") << '\n';
    }
}

TimeFrame read_jsonl_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_jsonl(in);
}

void write_jsonl_file(const std::filesystem::path& path, const TimeFrame& frame) {
    auto out = open_out(path);
    write_jsonl(out, frame);
}

TimeFrame read_csv_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_csv(in);
}

void write_csv_file(const std::filesystem::path& path, const TimeFrame& frame) {
    auto out = open_out(path);
    write_csv(out, frame);
}

TimeFrame read_file(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return read_csv_file(path);
    if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return read_jsonl_file(path);
    throw std::runtime_error("unrecognized dataset extension '" + ext +
                             "' (expected .jsonl or .csv)");
}

}  // namespace fpdetect::dataset
