#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace dcw {

/// IEEE double round-trip formatting: 17 significant digits.
std::string format_double(double v);

/// Column writer with the exact headers pinned by the external interfaces.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path, const std::string& header);

    void row(const std::vector<std::string>& cells);
    void close();

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

std::string cell(double v);
std::string cell(std::uint64_t v);
std::string cell(int v);
std::string cell(bool v);

} // namespace dcw
