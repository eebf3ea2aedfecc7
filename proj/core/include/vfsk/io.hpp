#pragma once

#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>

namespace vfsk::io {

/// Shortest round-trip-safe text for a double ("%.17g").
std::string format_double(double x);

/// Writes one CSV line of numbers.
void write_row(std::ostream& os, std::span<const double> row);
void write_row(std::ostream& os, std::initializer_list<double> row);

/// Writes one CSV line of header names.
void write_header(std::ostream& os, std::initializer_list<std::string> names);
void write_header(std::ostream& os, std::span<const std::string> names);

}  // namespace vfsk::io
