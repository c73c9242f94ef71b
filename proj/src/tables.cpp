#include "rqc/tables.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rqc/errors.hpp"

namespace rqc {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

Table::Table(std::vector<Column> columns) : columns_(std::move(columns))
{
    require(!columns_.empty(), "a table needs at least one column");
}

void Table::add(std::vector<Cell> row)
{
    require(row.size() == columns_.size(), "row width does not match the table");
    rows_.push_back(std::move(row));
}

double Table::number(std::size_t row, std::size_t column) const
{
    const Cell& c = rows_.at(row).at(column);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    throw PreconditionError("table cell is not numeric");
}

std::size_t Table::column_index(const std::string& name) const
{
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    throw PreconditionError("no column named " + name);
}

std::string Table::to_csv() const
{
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i].name + " [" + columns_[i].unit + "]";
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::int64_t>) {
                        out += std::to_string(v);
                    } else if constexpr (std::is_same_v<T, double>) {
                        out += format_number(v);
                    } else {
                        out += v;
                    }
                },
                row[i]);
        }
        out += '\n';
    }
    return out;
}

void Table::write_csv(const std::filesystem::path& path) const
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot write " + path.string());
    f << to_csv();
}

namespace {

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec)
{
    const double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 50;
    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        require(s.x.size() == s.y.size(), "plot series sizes differ");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((spec.log_x && !(s.x[i] > 0)) || (spec.log_y && !(s.y[i] > 0))) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * (W - left - right); };
    auto py = [&](double v) { return H - bottom - (ty(v) - y0) / (y1 - y0) * (H - top - bottom); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
      << "</text>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n";
    auto label = [&](double v, bool log) { return format_number(log ? std::pow(10.0, v) : v).substr(0, 8); };
    for (int k = 0; k <= 4; ++k) {
        double vx = x0 + (x1 - x0) * k / 4, vy = y0 + (y1 - y0) * k / 4;
        double sx = left + (W - left - right) * k / 4, sy = H - bottom - (H - top - bottom) * k / 4;
        o << "<text x=\"" << sx << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
          << label(vx, spec.log_x) << "</text>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
          << label(vy, spec.log_y) << "</text>\n";
    }
    o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(spec.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (top + H - bottom) / 2 << ")\">" << escape(spec.y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* c = colors[s % 6];
        o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            double x = series[s].x[i], y = series[s].y[i];
            if ((spec.log_x && !(x > 0)) || (spec.log_y && !(y > 0)) || !std::isfinite(x) || !std::isfinite(y)) continue;
            o << px(x) << ',' << py(y) << ' ';
        }
        o << "\"/>\n";
        o << "<text x=\"" << left + 10 << "\" y=\"" << top + 14 + 16 * s << "\" font-size=\"12\" fill=\"" << c << "\">"
          << escape(series[s].label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_svg_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series, const PlotSpec& spec)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot write " + path.string());
    f << svg_plot(series, spec);
}

} // namespace rqc
