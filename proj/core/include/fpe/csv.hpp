#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fpe {

/// Shortest round-trip decimal for a double (std::to_chars).
std::string format_double(double v);

/// Minimal CSV writer: mandatory header, shortest round-trip floats, '\n'
/// line endings so identical runs produce bit-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

private:
    std::ofstream out_;
};

} // namespace fpe
