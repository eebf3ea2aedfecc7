#include "vfsk/io.hpp"

#include <cstdio>
#include <ostream>

namespace vfsk::io {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_row(std::ostream& os, std::span<const double> row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        os << format_double(row[i]);
    }
    os << '\n';
}

void write_row(std::ostream& os, std::initializer_list<double> row) {
    write_row(os, std::span<const double>(row.begin(), row.size()));
}

void write_header(std::ostream& os, std::span<const std::string> names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) os << ',';
        os << names[i];
    }
    os << '\n';
}

void write_header(std::ostream& os, std::initializer_list<std::string> names) {
    write_header(os, std::span<const std::string>(names.begin(), names.size()));
}

}  // namespace vfsk::io
