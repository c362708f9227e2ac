#pragma once

// Column-oriented result table with a deterministic CSV writer.
// Values are formatted with %.17g so identical doubles always produce
// identical bytes regardless of how many workers computed them.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace owcsim {

using CellValue = std::variant<double, long long, std::string>;

inline std::string format_double_17g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline std::string csv_escape(const std::string& s) {
    bool needs_quote = false;
    for (char c : s) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quote = true;
            break;
        }
    }
    if (!needs_quote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

class ResultTable {
public:
    explicit ResultTable(std::vector<std::string> columns)
        : columns_(std::move(columns)) {
        if (columns_.empty()) throw std::invalid_argument("table needs at least one column");
    }

    void add_metadata(const std::string& key, const std::string& value) {
        metadata_.emplace_back(key, value);
    }

    void add_row(std::vector<CellValue> row) {
        if (row.size() != columns_.size())
            throw std::invalid_argument("row width does not match column count");
        rows_.push_back(std::move(row));
    }

    size_t n_rows() const { return rows_.size(); }
    size_t n_cols() const { return columns_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<CellValue>& row(size_t i) const { return rows_.at(i); }

    double numeric(size_t row, const std::string& column) const {
        const CellValue& cell = rows_.at(row).at(column_index(column));
        if (std::holds_alternative<double>(cell)) return std::get<double>(cell);
        if (std::holds_alternative<long long>(cell))
            return static_cast<double>(std::get<long long>(cell));
        throw std::invalid_argument("column '" + column + "' is not numeric");
    }

    size_t column_index(const std::string& name) const {
        for (size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == name) return i;
        throw std::invalid_argument("unknown column '" + name + "'");
    }

    void write_csv(std::ostream& os) const {
        for (const auto& [k, v] : metadata_)
            os << "# " << k << "=" << v << "\n";
        for (size_t i = 0; i < columns_.size(); ++i) {
            if (i) os << ",";
            os << csv_escape(columns_[i]);
        }
        os << "\n";
        for (const auto& row : rows_) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) os << ",";
                const CellValue& cell = row[i];
                if (std::holds_alternative<double>(cell))
                    os << format_double_17g(std::get<double>(cell));
                else if (std::holds_alternative<long long>(cell))
                    os << std::get<long long>(cell);
                else
                    os << csv_escape(std::get<std::string>(cell));
            }
            os << "\n";
        }
    }

    std::string to_csv_string() const {
        std::ostringstream ss;
        write_csv(ss);
        return ss.str();
    }

    void save_csv(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
        write_csv(f);
        if (!f) throw std::runtime_error("write to '" + path + "' failed");
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> metadata_;
    std::vector<std::vector<CellValue>> rows_;
};

} // namespace owcsim
