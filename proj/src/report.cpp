#include "qdu/report.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <vector>

#include "qdu/error.hpp"

namespace qdu {

using nlohmann::json;

Format parse_format(const std::string& text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  if (text == "md") return Format::Markdown;
  fail(ErrorKind::InvalidSpec, "unknown format '" + text + "' (json, csv, md)");
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

double round_sig12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // drop negative zero
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", round_sig12(x));
  return buf;
}

json rounded(const json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) return format_number(x);
    return round_sig12(x);
  }
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items()) out[k] = rounded(v);
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(rounded(v));
    return out;
  }
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const Report& r) {
  json j = {{"schema_version", kReportSchemaVersion},
            {"tool", "qdu"},
            {"tool_version", kToolVersion},
            {"command", r.command},
            {"input_digest", r.input_digest},
            {"seed", r.seed},
            {"results", rounded(r.results)},
            {"residuals", rounded(r.residuals)}};
  if (r.timestamp) j["timestamp"] = *r.timestamp;
  return j;
}

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

// Depth-first (path, value) pairs; arrays index as path[i].
void flatten(const json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    if (j.empty() && !path.empty()) out.emplace_back(path, "{}");
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
  } else if (j.is_array()) {
    if (j.empty()) out.emplace_back(path, "[]");
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(path, scalar_text(j));
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) out += c == '|' ? std::string("\\|") : c == '\n' ? std::string(" ") : std::string(1, c);
  return out;
}

std::vector<std::pair<std::string, std::string>> metadata(const Report& r) {
  std::vector<std::pair<std::string, std::string>> m{{"schema_version", std::to_string(kReportSchemaVersion)},
                                                     {"tool_version", kToolVersion},
                                                     {"command", r.command},
                                                     {"input_digest", r.input_digest},
                                                     {"seed", std::to_string(r.seed)}};
  if (r.timestamp) m.emplace_back("timestamp", *r.timestamp);
  return m;
}

}  // namespace

std::string render(const Report& r, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::Json:
      os << to_json(r).dump(2) << "\n";
      break;
    case Format::Csv: {
      os << "section,key,value\n";
      for (const auto& [k, v] : metadata(r)) os << "meta," << csv_field(k) << "," << csv_field(v) << "\n";
      for (const char* section : {"results", "residuals"}) {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(rounded(std::string(section) == "results" ? r.results : r.residuals), "", rows);
        for (const auto& [k, v] : rows) os << section << "," << csv_field(k) << "," << csv_field(v) << "\n";
      }
      break;
    }
    case Format::Markdown: {
      os << "# qdu " << r.command << "\n\n| field | value |\n|---|---|\n";
      for (const auto& [k, v] : metadata(r)) os << "| " << md_cell(k) << " | " << md_cell(v) << " |\n";
      for (const char* section : {"results", "residuals"}) {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(rounded(std::string(section) == "results" ? r.results : r.residuals), "", rows);
        os << "\n## " << section << "\n\n";
        if (rows.empty()) {
          os << "none\n";
          continue;
        }
        os << "| key | value |\n|---|---|\n";
        for (const auto& [k, v] : rows) os << "| " << md_cell(k) << " | " << md_cell(v) << " |\n";
      }
      break;
    }
  }
  return os.str();
}

}  // namespace qdu
