#pragma once

#include "screenopt/design.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace screenopt {

// Header row of factor names, then one row per run. An optional trailing
// `replicate_of` column holds the 1-based row a replicate copies (empty
// for D_u rows). Lines starting with '#' are ignored.
Design parse_design_csv(std::istream& in);
Design load_design_csv(const std::string& path);
std::string format_design_csv(const Design& design);
void save_design_csv(const Design& design, const std::string& path);

// Shortest round-tripping decimal for a double ("-1", "0.5", ...).
std::string format_number(double x);

struct ResponseTable {
  std::vector<std::string> names;
  Matrix values;  // n x m, one column per response set
};

ResponseTable load_responses_csv(const std::string& path);
ResponseTable parse_responses_csv(std::istream& in);

}  // namespace screenopt
