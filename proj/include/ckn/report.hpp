#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace ckn {

/// 17 significant digits, locale independent; inf and nan spelled out.
inline std::string fmt(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Plain CSV: header row, comma separated, fields quoted only when needed.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    std::size_t size() const { return rows_.size(); }

    void write(std::ostream& os) const
    {
        line(os, header_);
        for (const auto& r : rows_)
            line(os, r);
    }

private:
    static void line(std::ostream& os, const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                os << ',';
            os << quote(cells[i]);
        }
        os << '\n';
    }

    static std::string quote(const std::string& s)
    {
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"')
                out += '"';
            out += c;
        }
        return out + "\"";
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace ckn
