#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spherecover/bounds.hpp"
#include "spherecover/construct.hpp"
#include "spherecover/schedule.hpp"
#include "spherecover/verify.hpp"

namespace spherecover {

inline constexpr int kFormatVersion = 1;

// 17 significant digits, exponent form.
std::string format_real(double x);
// Shortest form that still carries 17 significant digits.
std::string format_real_compact(double x);

// Ordered "key: value" records.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string render_key_values(const KeyValues& kv);

std::string write_covering_text(const Covering& cov);
Covering read_covering_text(const std::string& text);

KeyValues param_fields(const ParamSet& params);
KeyValues report_fields(const VerificationReport& report, std::string_view prefix);

std::string bounds_csv_header();
std::string bounds_csv_row(const BoundBreakdown& b);

// Writes to a temporary sibling, then renames over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace spherecover
