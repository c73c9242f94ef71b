#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace rqc {

/// Column-typed delimited table; the header row names each column and its unit.
class Table {
public:
    using Cell = std::variant<std::int64_t, double, std::string>;

    struct Column {
        std::string name;
        std::string unit;  ///< "1" for dimensionless
    };

    explicit Table(std::vector<Column> columns);

    const std::vector<Column>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }
    const std::vector<Cell>& row(std::size_t i) const { return rows_.at(i); }

    void add(std::vector<Cell> row);
    /// Numeric value of a cell (integers widen).
    double number(std::size_t row, std::size_t column) const;
    std::size_t column_index(const std::string& name) const;

    /// Comma separated, header "name [unit]", doubles in shortest round-trip form.
    std::string to_csv() const;
    void write_csv(const std::filesystem::path& path) const;

private:
    std::vector<Column> columns_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_number(double v);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

/// Static line plot as an SVG document.
std::string svg_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec);
void write_svg_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                    const PlotSpec& spec);

} // namespace rqc
