#include "biviso/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "biviso/errors.hpp"

namespace biviso {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

double parse_number(const std::string& field, long line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("not a number: '" + field + "'", line_no);
    return v;
}

// Strips a UTF-8 byte order mark from the first line.
void strip_bom(std::string& line) {
    if (line.size() >= 3 && line[0] == '\xef' && line[1] == '\xbb' && line[2] == '\xbf')
        line.erase(0, 3);
}

void require_header(std::istream& in, const std::string& expected, long& line_no) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header '" + expected + "'", 1);
    ++line_no;
    strip_bom(line);
    std::string got;
    for (const std::string& f : split_fields(line)) {
        if (!got.empty()) got += ',';
        got += f;
    }
    if (got != expected)
        throw ParseError("expected header '" + expected + "', found '" + got + "'", line_no);
}

}  // namespace

XYData read_xy_csv(std::istream& in) {
    long line_no = 0;
    require_header(in, "z,y", line_no);
    XYData out;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 2) throw ParseError("expected two fields", line_no);
        out.z.push_back(parse_number(fields[0], line_no));
        out.y.push_back(parse_number(fields[1], line_no));
    }
    if (out.z.empty()) throw ParseError("no observations", line_no + 1);
    return out;
}

XYData read_xy_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    return read_xy_csv(in);
}

std::vector<std::pair<std::string, double>> read_node_csv(std::istream& in) {
    long line_no = 0;
    require_header(in, "node,y", line_no);
    std::vector<std::pair<std::string, double>> out;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 2) throw ParseError("expected two fields", line_no);
        if (fields[0].empty()) throw ParseError("empty node name", line_no);
        out.emplace_back(fields[0], parse_number(fields[1], line_no));
    }
    if (out.empty()) throw ParseError("no observations", line_no + 1);
    return out;
}

std::vector<std::pair<std::string, double>> read_node_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    return read_node_csv(in);
}

void write_fit_csv(std::ostream& os, const std::vector<double>& z,
                   const std::vector<double>& g1, const std::vector<double>& g2) {
    os << "z,g1,g2\n";
    char buf[192];
    for (std::size_t k = 0; k < z.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", z[k], g1[k], g2[k]);
        os << buf;
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace biviso
