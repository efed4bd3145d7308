#ifndef MEMECLF_TSV_HPP
#define MEMECLF_TSV_HPP

#include <string>
#include <vector>

namespace memeclf::tsv {

// Text cells escape tab, newline, carriage return and backslash so that a
// serialized corpus round-trips byte-identically through the loader.
std::string escape(const std::string& field);
std::string unescape(const std::string& field);

std::vector<std::string> split_line(const std::string& line);
std::string join_line(const std::vector<std::string>& fields);

// Reads all lines, tolerating a trailing newline and CRLF endings.
std::vector<std::string> read_lines(const std::string& path);

std::string lower(std::string s);

} // namespace memeclf::tsv

#endif
