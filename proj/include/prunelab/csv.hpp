#ifndef PRUNELAB_CSV_HPP
#define PRUNELAB_CSV_HPP

#include <string>
#include <vector>

namespace prunelab {

// Minimal RFC-4180-ish CSV: fields are quoted when they contain commas,
// quotes, or newlines; embedded quotes are doubled.
std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::string> csv_split(const std::string& line);

// %.17g, enough digits to round-trip a double exactly.
std::string format_double(double v);
double parse_double_field(const std::string& field);

}  // namespace prunelab

#endif
