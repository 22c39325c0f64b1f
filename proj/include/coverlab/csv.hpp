#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coverlab {

/// 17 significant digits, '.' decimal point regardless of locale.
std::string fmt17(double x);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}
    void header(const std::vector<std::string>& cols);
    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
    CsvWriter& cell(const std::string& s);
    void end_row();

private:
    std::ostream& os_;
    bool first_ = true;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(std::istream& is);
double parse_double(const std::string& s);

}  // namespace coverlab
