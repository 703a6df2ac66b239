// Records the empirical estimate constants: largest ratio per estimate over
// the oracle seeds. Prints the table in the form used by estimates.hpp and
// optionally writes the per-sample CSV.

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "qsw/estimates.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Estimate sweep oracle"};
    std::uint64_t first = qsw::oracle_first_seed;
    int count = qsw::oracle_seed_count;
    std::string csv_path;
    app.add_option("--first", first, "First seed");
    app.add_option("--count", count, "Number of seeds")->check(CLI::PositiveNumber);
    app.add_option("--csv", csv_path, "Per-sample CSV output");
    CLI11_PARSE(app, argc, argv);

    std::unique_ptr<std::ofstream> csv;
    if (!csv_path.empty()) {
        csv = std::make_unique<std::ofstream>(csv_path);
        if (!*csv) {
            std::cerr << "cannot open " << csv_path << '\n';
            return 3;
        }
    }
    try {
        const auto worst = qsw::sweep_estimate_maxima(first, count, csv.get());
        for (const auto& [name, value] : worst) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", value);
            std::cout << "        {\"" << name << "\", " << buf << "},\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "sweep failed: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
