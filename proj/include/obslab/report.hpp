#pragma once

#include "obslab/realset.hpp"
#include "obslab/spectra.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace obslab {

using Json = nlohmann::ordered_json;

// Floats as %.17g so every value round-trips; non-finite values become "inf", "-inf", "nan".
std::string dump_json(const Json& j, int indent = 2);
Json finite_or_string(double v);

struct CsvTable {
    std::vector<std::string> comments;  // written as "# ..." lines
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
std::string dump_csv(const CsvTable& t);

// temp file in the same directory, then rename
void write_atomic(const std::filesystem::path& path, const std::string& content);

// "1.5", "pi", "pi/2", "3*pi/4", "pi/2+0.3", "-1e-3"
double parse_number(const std::string& token);
// "a,b,c" of numbers; "a..b" integer steps; "a..b:step"
std::vector<double> parse_list(const std::string& token);

// halfline:a  bounded:R  periodic:x0  dyadic:coeff,power  polygap:eps
// intervals:a:b,c:d  file:path (JSON {"intervals": [[a,b],...]} or whitespace pairs)
SetFamily parse_set(const std::string& spec);
// "monomial:m", "m" alone, or "shifted:C,c"
Potential parse_potential(const std::string& spec);

}  // namespace obslab
