// Fingerprint dataset files: JSON-lines and CSV.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fpdetect/core.hpp"

namespace fpdetect::dataset {

// JSONL: one object per line with "features" (array), "claimed_id" (string)
// and optional "truth_id" (string).
TimeFrame read_jsonl(std::istream& in);
TimeFrame read_jsonl_file(const std::filesystem::path& path);
void write_jsonl(std::ostream& out, const TimeFrame& frame);
void write_jsonl_file(const std::filesystem::path& path, const TimeFrame& frame);

// CSV with header f0,...,f{d-1},claimed_id,truth_id; empty truth_id column
// means absent.
TimeFrame read_csv(std::istream& in);
TimeFrame read_csv_file(const std::filesystem::path& path);
void write_csv(std::ostream& out, const TimeFrame& frame);
void write_csv_file(const std::filesystem::path& path, const TimeFrame& frame);

// Dispatch on extension: .jsonl/.ndjson -> JSONL, .csv -> CSV.
TimeFrame read_file(const std::filesystem::path& path);

}  // namespace fpdetect::dataset
