#pragma once

// Reports emitted by the CLI. Every number is rounded to 12 significant
// digits before encoding, so JSON, CSV and Markdown carry identical values.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace qdu {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

enum class Format { Json, Csv, Markdown };
Format parse_format(const std::string& text);

struct Report {
  std::string command;
  std::string input_digest;  // sha256 of the canonical input
  std::uint64_t seed = 0;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json residuals = nlohmann::json::object();
  std::optional<std::string> timestamp;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

/// x rounded to 12 significant digits; non-finite values pass through.
double round_sig12(double x);
/// "%.12g" with non-finite values spelled "inf", "-inf", "nan".
std::string format_number(double x);

/// Copy of j with every floating-point number rounded to 12 significant digits.
nlohmann::json rounded(const nlohmann::json& j);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

nlohmann::json to_json(const Report& r);
std::string render(const Report& r, Format format);

}  // namespace qdu
