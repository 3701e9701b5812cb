#include "rzlab/harness/output.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rzlab/harness/config.hpp"

namespace rzlab::harness {

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) { append(header_); }

void CsvTable::append(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_.push_back(',');
    text_ += cells[i];
  }
  text_.push_back('\n');
}

CsvTable::Row& CsvTable::Row::operator<<(const std::string& cell) {
  cells_.push_back(cell);
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(double x) { return *this << format_real(x); }
CsvTable::Row& CsvTable::Row::operator<<(std::uint64_t x) { return *this << std::to_string(x); }
CsvTable::Row& CsvTable::Row::operator<<(std::int64_t x) { return *this << std::to_string(x); }

CsvTable::Row::~Row() {
  table_.append(cells_);
  ++table_.rows_;
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError("CSV has no column '" + name + "'");
}

CsvData parse_csv(const std::string& text) {
  CsvData data;
  std::stringstream ss(text);
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      data.header = std::move(cells);
      first = false;
    } else {
      data.rows.push_back(std::move(cells));
    }
  }
  return data;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IntegrityError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("write failed for " + path);
}

std::string RunManifest::to_json() const {
  nlohmann::json doc;
  doc["artifact_version"] = artifact_version;
  doc["experiment"] = experiment;
  doc["master_seed"] = master_seed;
  doc["parameters"] = parameters;
  doc["started_at"] = started_at;
  doc["finished_at"] = finished_at;
  doc["summary"] = summary;
  auto outs = nlohmann::json::array();
  for (const auto& o : outputs) {
    outs.push_back({{"name", o.name}, {"sha256", o.sha256}, {"bytes", o.bytes}, {"rows", o.rows}});
  }
  doc["outputs"] = outs;
  return doc.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ValidationError("manifest is not valid JSON");
  try {
    RunManifest m;
    m.artifact_version = doc.at("artifact_version").get<std::string>();
    m.experiment = doc.at("experiment").get<std::string>();
    m.master_seed = doc.at("master_seed").get<std::uint64_t>();
    m.parameters = doc.at("parameters").get<std::map<std::string, std::string>>();
    m.started_at = doc.value("started_at", "");
    m.finished_at = doc.value("finished_at", "");
    if (doc.contains("summary")) m.summary = doc.at("summary").get<std::map<std::string, std::string>>();
    for (const auto& o : doc.at("outputs")) {
      m.outputs.push_back({o.at("name").get<std::string>(), o.at("sha256").get<std::string>(),
                           o.at("bytes").get<std::uint64_t>(), o.at("rows").get<std::uint64_t>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest field missing or mistyped: ") + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<DigestCheck> verify_run(const std::string& dir, const RunManifest& manifest) {
  std::vector<DigestCheck> checks;
  for (const auto& o : manifest.outputs) {
    DigestCheck c{o.name, o.sha256, {}};
    const auto path = std::filesystem::path(dir) / o.name;
    if (std::filesystem::exists(path)) c.actual = sha256_hex(read_file(path.string()));
    checks.push_back(std::move(c));
  }
  return checks;
}

}  // namespace rzlab::harness
