#pragma once

// Small strict readers and writers for the toolkit's file formats. Malformed
// input reports the offending line number.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace biviso {

struct XYData {
    std::vector<double> z;
    std::vector<double> y;
};

// Header "z,y", one observation per line.
XYData read_xy_csv(std::istream& in);
XYData read_xy_csv_file(const std::string& path);

// Header "node,y"; repeated node names pool their responses.
std::vector<std::pair<std::string, double>> read_node_csv(std::istream& in);
std::vector<std::pair<std::string, double>> read_node_csv_file(const std::string& path);

void write_fit_csv(std::ostream& os, const std::vector<double>& z,
                   const std::vector<double>& g1, const std::vector<double>& g2);

std::string read_text_file(const std::string& path);

}  // namespace biviso
