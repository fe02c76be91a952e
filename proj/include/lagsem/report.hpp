#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace lagsem {

// Formats a double with 17 significant digits (round-trip safe, diff-stable).
std::string fmt17(double v);

// Per-gridpoint record of a computed value against its envelope or oracle.
struct BoundRow {
    std::vector<double> inputs;
    double computed = 0.0;
    double reference = 0.0;  // envelope or oracle value
    double ratio = 0.0;
    bool pass = true;
};

struct BoundReport {
    std::vector<std::string> input_names;
    std::vector<BoundRow> rows;
    std::map<std::string, double> fitted;       // empirical constants
    std::map<std::string, std::string> meta;    // config echo, notes
    bool pass = true;

    void write_csv(std::ostream& os) const;
};

}  // namespace lagsem
