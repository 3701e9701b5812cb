// CSV tables, SHA-256 digests and run manifests.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rzlab/common.hpp"

namespace rzlab::harness {

/// Output directory or file could not be created, written or read.
class IoError : public Error {
 public:
  using Error::Error;
};

/// In-memory CSV with a header row; LF line endings, no quoting (cells never
/// contain commas).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  class Row {
   public:
    Row& operator<<(const std::string& cell);
    Row& operator<<(const char* cell) { return *this << std::string(cell); }
    Row& operator<<(double x);
    Row& operator<<(std::uint64_t x);
    Row& operator<<(std::int64_t x);
    Row& operator<<(int x) { return *this << static_cast<std::int64_t>(x); }
    Row& operator<<(unsigned x) { return *this << static_cast<std::uint64_t>(x); }
    Row& operator<<(bool b) { return *this << static_cast<std::uint64_t>(b ? 1 : 0); }
    ~Row();

   private:
    friend class CsvTable;
    explicit Row(CsvTable& table) : table_(table) {}
    CsvTable& table_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] const std::string& body() const { return text_; }

 private:
  void append(const std::vector<std::string>& cells);

  std::vector<std::string> header_;
  std::string text_;
  std::size_t rows_ = 0;
};

/// Parsed CSV (for reports and tests).
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const;
};
CsvData parse_csv(const std::string& text);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

struct OutputFile {
  std::string name;  // relative to the run directory
  std::string sha256;
  std::uint64_t bytes = 0;
  std::uint64_t rows = 0;  // data rows for CSV, 0 otherwise
};

struct RunManifest {
  std::string artifact_version;
  std::string experiment;
  std::uint64_t master_seed = 0;
  std::map<std::string, std::string> parameters;  // canonical text per key
  std::string started_at;
  std::string finished_at;
  std::vector<OutputFile> outputs;  // sorted by name
  std::map<std::string, std::string> summary;

  [[nodiscard]] std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kArtifactVersion = "1.0.0";

/// UTC time as ISO 8601.
std::string utc_timestamp();

struct DigestCheck {
  std::string name;
  std::string expected;
  std::string actual;  // empty when the file is missing
  [[nodiscard]] bool ok() const { return expected == actual; }
};

/// Recompute the digest of every listed output of the run in `dir`.
std::vector<DigestCheck> verify_run(const std::string& dir, const RunManifest& manifest);

}  // namespace rzlab::harness
