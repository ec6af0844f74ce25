#include "acefl/report.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "acefl/error.h"
#include "acefl/transcript.h"

namespace acefl {
namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Opt(const std::optional<double>& v) { return v ? Num(*v) : "N/A"; }

std::vector<std::string> Cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double ParseNum(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw FormatError("bad number '" + s + "'");
  return v;
}

std::optional<double> ParseOpt(const std::string& s) {
  if (s == "N/A") return std::nullopt;
  return ParseNum(s);
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw FormatError("cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<DetectionRow> ParseDetectionLines(std::istream& in) {
  std::vector<DetectionRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = Cells(line);
    if (c.size() != 4) throw FormatError("detection row '" + line + "'");
    rows.push_back({c[0], ParseOpt(c[1]), ParseOpt(c[2]), ParseOpt(c[3])});
  }
  return rows;
}

}  // namespace

ReportData ReportFromResult(const ScenarioResult& result) {
  ReportData d;
  d.method = MethodName(result.config.method);
  d.attack = AttackTypeName(result.config.attack);
  d.attackers = result.attackers;
  d.contribution = result.summary;
  d.accuracy = {{"untrained", result.acc_initial},
                {"attack_free", result.acc_free},
                {"attack", result.acc_attack}};
  for (const auto& r : result.detection) {
    d.detection.push_back({DefenseName(r.method), r.precision, r.recall, r.f1});
  }
  return d;
}

ReportData LoadReport(const std::filesystem::path& dir) {
  ReportData d;
  try {
    const Json meta = Json::parse(ReadFile(dir / "meta.json"));
    d.method = meta.at("method").get<std::string>();
    d.attack = meta.at("attack").get<std::string>();
    d.attackers = meta.at("attackers").get<std::vector<ClientId>>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("meta.json: ") + e.what());
  }
  {
    std::istringstream in(ReadFile(dir / "summary.csv"));
    d.contribution = ReadSummaryCsv(in);
  }
  {
    std::istringstream in(ReadFile(dir / "accuracy.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto c = Cells(line);
      if (c.size() != 2) throw FormatError("accuracy row '" + line + "'");
      d.accuracy.emplace_back(c[0], ParseNum(c[1]));
    }
  }
  {
    std::istringstream in(ReadFile(dir / "detection.csv"));
    std::string header;
    std::getline(in, header);
    d.detection = ParseDetectionLines(in);
  }
  return d;
}

std::string RenderReport(const ReportData& data) {
  std::ostringstream out;
  out << "# contribution method=" << data.method << " attack=" << data.attack
      << '\n';
  out << "client,role,cs_free,cs_attack,rank_free,rank_attack,delta_r\n";
  double total_free = 0.0, total_attack = 0.0;
  for (const auto& r : data.contribution) {
    const bool attacker = std::find(data.attackers.begin(), data.attackers.end(),
                                    r.client) != data.attackers.end();
    out << r.client << ',' << (attacker ? "attacker" : "honest") << ','
        << Num(r.cs_free) << ',' << Num(r.cs_attack) << ',' << r.rank_free << ','
        << r.rank_attack << ',' << r.delta_r << '\n';
    total_free += r.cs_free;
    total_attack += r.cs_attack;
  }
  out << "total,," << Num(total_free) << ',' << Num(total_attack) << ",,,\n";
  out << "\n# accuracy\nscenario,accuracy\n";
  for (const auto& [name, acc] : data.accuracy) out << name << ',' << Num(acc) << '\n';
  out << "\n# detection\nmethod,precision,recall,f1\n";
  for (const auto& r : data.detection) {
    out << r.method << ',' << Opt(r.precision) << ',' << Opt(r.recall) << ','
        << Opt(r.f1) << '\n';
  }
  return out.str();
}

ReportData ParseReport(const std::string& text) {
  ReportData d;
  std::istringstream in(text);
  std::string line;
  std::string section;
  bool header_next = false;
  std::ostringstream detection_lines;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      std::istringstream words(line.substr(2));
      words >> section;
      std::string kv;
      while (words >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw FormatError("bad section key '" + kv + "'");
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "method") d.method = value;
        else if (key == "attack") d.attack = value;
      }
      header_next = true;
      continue;
    }
    if (header_next) {
      header_next = false;
      continue;
    }
    const auto c = Cells(line);
    if (section == "contribution") {
      if (c.at(0) == "total") continue;
      if (c.size() != 7) throw FormatError("contribution row '" + line + "'");
      SummaryRow r;
      r.client = std::stoi(c[0]);
      if (c[1] == "attacker") d.attackers.push_back(r.client);
      r.cs_free = ParseNum(c[2]);
      r.cs_attack = ParseNum(c[3]);
      r.rank_free = std::stoi(c[4]);
      r.rank_attack = std::stoi(c[5]);
      r.delta_r = std::stoi(c[6]);
      d.contribution.push_back(r);
    } else if (section == "accuracy") {
      if (c.size() != 2) throw FormatError("accuracy row '" + line + "'");
      d.accuracy.emplace_back(c[0], ParseNum(c[1]));
    } else if (section == "detection") {
      detection_lines << line << '\n';
    } else {
      throw FormatError("row outside a known section: '" + line + "'");
    }
  }
  std::istringstream det(detection_lines.str());
  d.detection = ParseDetectionLines(det);
  return d;
}

}  // namespace acefl
