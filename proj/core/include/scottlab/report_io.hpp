#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "scottlab/inequality_lab.hpp"

namespace scottlab {

// 17 significant digits ("%.17g"); non-finite values as "nan", "inf", "-inf".
std::string format_fixed17(double x);
// Shortest representation that parses back to the same double.
std::string format_shortest(double x);

// Header: constants and grids; body: checks with fields in a fixed order.
std::string report_to_json(const VerificationReport& report);
VerificationReport report_from_json(std::string_view text);

void write_report(const std::filesystem::path& path, const VerificationReport& report);

const char* relation_name(Relation r);

}  // namespace scottlab
