#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lpvdd/core/types.hpp"

namespace lpvdd {

struct DictionaryMeta {
  double sampling_period = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<int> window_offset;
  std::string source;
  std::string created;  // wall-clock stamp, sidecar only
};

struct LoadedDictionary {
  DataDictionary dictionary;
  DictionaryMeta meta;
};

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

std::string dictionary_csv(const DataDictionary& d);
// Writes the CSV and its JSON sidecar next to it.
void write_dictionary(const std::filesystem::path& csv, const DataDictionary& d,
                      const DictionaryMeta& meta);
// Fails with Consistency when the data no longer match the sidecar's hash.
LoadedDictionary read_dictionary(const std::filesystem::path& csv);

// SHA-256 of the dictionary CSV text, hex encoded.
std::string dictionary_hash(const DataDictionary& d);
std::string sha256_hex(const std::string& bytes);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Splits on commas; no quoting support, none of our files need it.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace lpvdd
