#include "lagsem/report.hpp"

#include <cstdio>

namespace lagsem {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void BoundReport::write_csv(std::ostream& os) const {
    for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
    for (const auto& [k, v] : fitted) os << "# fitted." << k << "=" << fmt17(v) << "\n";
    for (size_t i = 0; i < input_names.size(); ++i) os << input_names[i] << ",";
    os << "computed,reference,ratio,pass\n";
    for (const auto& r : rows) {
        for (double v : r.inputs) os << fmt17(v) << ",";
        os << fmt17(r.computed) << "," << fmt17(r.reference) << "," << fmt17(r.ratio) << ","
           << (r.pass ? 1 : 0) << "\n";
    }
    os << "# pass=" << (pass ? 1 : 0) << "\n";
}

}  // namespace lagsem
