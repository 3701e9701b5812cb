#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "rzlab/harness/experiments.hpp"

namespace rzlab::harness {

namespace {

namespace fs = std::filesystem;

std::string fixed(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

double to_real(const std::string& s) { return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s); }

CsvData load_csv(const fs::path& dir, const std::string& name) { return parse_csv(read_file((dir / name).string())); }

void lil_section(const fs::path& dir, std::ostream& out) {
  const CsvData d = load_csv(dir, "count_stats.csv");
  const auto cn = d.column("n"), cl = d.column("lil"), cr = d.column("replica");
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> by_n;  // n -> (in band, total)
  std::map<std::uint64_t, bool> replica_ok;
  for (const auto& row : d.rows) {
    if (row[cl].empty()) continue;
    const double v = to_real(row[cl]);
    const bool in = v > 0.0 && v <= 2.5;
    auto& [hit, total] = by_n[std::stoull(row[cn])];
    hit += in ? 1 : 0;
    ++total;
    const auto r = std::stoull(row[cr]);
    replica_ok.try_emplace(r, true);
    replica_ok[r] = replica_ok[r] && in;
  }
  out << "LIL band occupancy, ratio in (0, 2.5]\n";
  out << "  n              in-band  replicas  fraction\n";
  for (const auto& [n, ht] : by_n) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-14llu %7llu %9llu  %s\n", static_cast<unsigned long long>(n),
                  static_cast<unsigned long long>(ht.first), static_cast<unsigned long long>(ht.second),
                  fixed(static_cast<double>(ht.first) / static_cast<double>(ht.second)).c_str());
    out << line;
  }
  const auto all = std::count_if(replica_ok.begin(), replica_ok.end(), [](const auto& kv) { return kv.second; });
  if (!replica_ok.empty()) {
    out << "  replicas in band at every checkpoint: " << all << "/" << replica_ok.size() << " ("
        << fixed(static_cast<double>(all) / static_cast<double>(replica_ok.size())) << ")\n";
  }
}

void region_section(const fs::path& dir, std::ostream& out) {
  const CsvData d = load_csv(dir, "region_cells.csv");
  const auto cb = d.column("beta"), ce = d.column("eps"), cf = d.column("converged_fraction");
  std::set<double> betas, eps;
  std::map<std::pair<double, double>, double> frac;
  for (const auto& row : d.rows) {
    const double b = to_real(row[cb]), e = to_real(row[ce]);
    betas.insert(b);
    eps.insert(e);
    frac[{b, e}] = to_real(row[cf]);
  }
  out << "Region-scan heat table, converged fraction (* marks beta > 3/(2 eps))\n";
  out << "  beta \\ eps";
  for (const double e : eps) {
    char cell[32];
    std::snprintf(cell, sizeof cell, " %9g", e);
    out << cell;
  }
  out << "\n";
  for (const double b : betas) {
    char head[32];
    std::snprintf(head, sizeof head, "  %-10g", b);
    out << head;
    for (const double e : eps) {
      const auto it = frac.find({b, e});
      std::string cell = it == frac.end() ? "-" : fixed(it->second, 2);
      if (b > 1.5 / e) cell += "*";
      char buf[32];
      std::snprintf(buf, sizeof buf, " %9s", cell.c_str());
      out << buf;
    }
    out << "\n";
  }
}

void critical_section(const fs::path& dir, std::ostream& out) {
  const CsvData d = load_csv(dir, "critical_line_summary.csv");
  const auto cs = d.column("sigma"), cn = d.column("N"), cv = d.column("var_partial"),
             cp = d.column("lemma_probability"), cm = d.column("centered_median");
  out << "Critical-line summary\n  sigma   N            var_partial  median|S1'-E|  P(lemma)\n";
  for (const auto& row : d.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-7s %-12s %11s  %13s  %8s\n", row[cs].c_str(), row[cn].c_str(),
                  fixed(to_real(row[cv]), 4).c_str(), fixed(to_real(row[cm]), 4).c_str(),
                  fixed(to_real(row[cp])).c_str());
    out << line;
  }
}

void additive_section(const fs::path& dir, std::ostream& out) {
  const CsvData d = load_csv(dir, "additive_summary.csv");
  const auto cf = d.column("failures"), c0 = d.column("n0");
  std::uint64_t defined = 0, failures = 0, worst = 0;
  for (const auto& row : d.rows) {
    failures += std::stoull(row[cf]);
    if (!row[c0].empty()) {
      ++defined;
      worst = std::max<std::uint64_t>(worst, std::stoull(row[c0]));
    }
  }
  out << "Additive representation\n  replicas with N0 defined: " << defined << "/" << d.rows.size()
      << "\n  total failures in range: " << failures << "\n  largest N0: " << worst << "\n";
}

void infinitude_section(const fs::path& dir, std::ostream& out) {
  const CsvData d = load_csv(dir, "infinitude_summary.csv");
  if (d.rows.empty()) return;
  const auto& last = d.rows.back();
  out << "Infinitude proxy at K = " << last[d.column("k")] << "\n  mean hits " << fixed(to_real(last[d.column("mean_hits")]))
      << ", expected " << fixed(to_real(last[d.column("expected")])) << ", one-replica variance "
      << fixed(to_real(last[d.column("variance")])) << "\n";
}

void symmetry_section(const fs::path& dir, std::ostream& out) {
  const CsvData sums = load_csv(dir, "block_sums.csv");
  const auto cr = sums.column("residual"), cs = sums.column("third_order_scale");
  double worst = 0.0;
  for (const auto& row : sums.rows) {
    const double scale = to_real(row[cs]);
    if (scale > 0.0) worst = std::max(worst, to_real(row[cr]) / scale);
  }
  out << "Symmetry cancellation\n  max residual / (k B^3 / C^{3+sigma}): " << worst << "\n";
  const CsvData clt = load_csv(dir, "clt_summary.csv");
  for (const auto& row : clt.rows) {
    out << "  CLT block " << row[clt.column("block")] << " (k = " << row[clt.column("k")] << "): mean "
        << fixed(to_real(row[clt.column("mean")])) << ", variance " << fixed(to_real(row[clt.column("variance")]))
        << ", skew " << fixed(to_real(row[clt.column("skew")]))
        << (row[clt.column("regime_warning")] == "1" ? "  [k < 30: outside CLT regime]" : "") << "\n";
  }
}

void reference_section(const fs::path& dir, std::ostream& out) {
  const CsvData d = load_csv(dir, "reference_checks.csv");
  std::map<std::string, std::pair<int, int>> tally;
  for (const auto& row : d.rows) {
    auto& [pass, total] = tally[row[d.column("check")]];
    pass += row[d.column("pass")] == "1" ? 1 : 0;
    ++total;
  }
  out << "Reference checks\n";
  for (const auto& [name, pt] : tally) out << "  " << name << ": " << pt.first << "/" << pt.second << " pass\n";
}

}  // namespace

ReportResult build_report(const std::string& from) {
  const fs::path root(from);
  std::vector<fs::path> runs;
  if (fs::exists(root / kManifestName)) {
    runs.push_back(root);
  } else if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.is_directory() && fs::exists(entry.path() / kManifestName)) runs.push_back(entry.path());
    }
    std::sort(runs.begin(), runs.end());
  }
  if (runs.empty()) throw IoError("no run manifest found under " + from);

  ReportResult result;
  std::ostringstream out;
  for (const auto& dir : runs) {
    const RunManifest m = RunManifest::from_json(read_file((dir / kManifestName).string()));
    out << "== " << m.experiment << " (" << dir.string() << ")\n";
    out << "seed " << m.master_seed << ", version " << m.artifact_version << ", " << m.parameters.size()
        << " parameters\n";
    bool run_ok = true;
    for (const auto& check : verify_run(dir.string(), m)) {
      const char* status = check.ok() ? "ok" : (check.actual.empty() ? "MISSING" : "DIGEST MISMATCH");
      out << "  " << check.name << ": " << status << "\n";
      run_ok = run_ok && check.ok();
    }
    result.integrity_ok = result.integrity_ok && run_ok;
    if (!run_ok) {
      out << "  summaries skipped: outputs do not match the manifest\n\n";
      continue;
    }
    for (const auto& [k, v] : m.summary) out << "  " << k << " = " << v << "\n";
    if (m.experiment == "count-stats") lil_section(dir, out);
    if (m.experiment == "region-scan") region_section(dir, out);
    if (m.experiment == "critical-line") critical_section(dir, out);
    if (m.experiment == "additive") additive_section(dir, out);
    if (m.experiment == "infinitude") infinitude_section(dir, out);
    if (m.experiment == "symmetry") symmetry_section(dir, out);
    if (m.experiment == "reference-check") reference_section(dir, out);
    out << "\n";
  }
  result.text = out.str();
  return result;
}

}  // namespace rzlab::harness
