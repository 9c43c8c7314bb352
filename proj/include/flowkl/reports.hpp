#pragma once

// JSON (schema version "1") and CSV serialization of diagnostic reports.
// JSON field names match the report struct members.

#include "flowkl/covariance.hpp"
#include "flowkl/diagnostics.hpp"
#include "flowkl/io.hpp"
#include "flowkl/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace flowkl {

inline constexpr const char* kReportSchemaVersion = "1";

nlohmann::json to_json(const NndReport& r);
nlohmann::json to_json(const TraceReport& r);
nlohmann::json to_json(const CrossValidationReport& r);
nlohmann::json to_json(const MercerReport& r);
nlohmann::json to_json(const KLReport& r);
nlohmann::json to_json(const ScalarComparisonReport& r);
nlohmann::json to_json(const FormatReport& r);

/// One row per J.
std::string to_csv(const MercerReport& r);
std::string to_csv(const KLReport& r);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace flowkl
