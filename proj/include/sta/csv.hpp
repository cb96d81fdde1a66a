#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sta/errors.hpp"

namespace sta::csv {

// Splits one line on the delimiter. Quoted fields ("a,b") are supported so
// GTFS feeds in the wild parse; quotes are stripped.
inline std::vector<std::string> split_line(const std::string& line, char delim = ',') {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
                else quoted = false;
            } else cur += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline void strip_bom(std::string& s) {
    if (s.size() >= 3 && (unsigned char)s[0] == 0xEF && (unsigned char)s[1] == 0xBB &&
        (unsigned char)s[2] == 0xBF)
        s.erase(0, 3);
}

// Header-indexed table reader for delimiter-separated UTF-8 text.
class Table {
public:
    static Table read_file(const std::filesystem::path& path, char delim = ',') {
        std::ifstream in(path);
        if (!in) throw MissingTable(path.string());
        return read_stream(in, path.string(), delim);
    }

    static Table read_string(const std::string& text, const std::string& name = "<string>",
                             char delim = ',') {
        std::istringstream in(text);
        return read_stream(in, name, delim);
    }

    const std::string& name() const { return name_; }
    size_t rows() const { return rows_.size(); }
    bool has_column(const std::string& col) const { return col_index_.count(col) > 0; }

    const std::string& cell(size_t row, const std::string& col) const {
        auto it = col_index_.find(col);
        if (it == col_index_.end())
            throw ParseError(name_ + ": missing column '" + col + "'");
        const auto& r = rows_[row];
        static const std::string empty;
        return it->second < r.size() ? r[it->second] : empty;
    }

    double num(size_t row, const std::string& col) const {
        const std::string& s = cell(row, col);
        try {
            size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ParseError(name_ + " row " + std::to_string(row + 2) + ": bad number '" + s +
                             "' in column " + col);
        }
    }

    long integer(size_t row, const std::string& col) const {
        const std::string& s = cell(row, col);
        long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw ParseError(name_ + " row " + std::to_string(row + 2) + ": bad integer '" + s +
                             "' in column " + col);
        return v;
    }

private:
    template <class Stream>
    static Table read_stream(Stream& in, const std::string& name, char delim) {
        Table t;
        t.name_ = name;
        std::string line;
        if (!std::getline(in, line)) throw ParseError(name + ": empty file");
        strip_bom(line);
        auto headers = split_line(line, delim);
        for (size_t i = 0; i < headers.size(); ++i) t.col_index_[headers[i]] = i;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            t.rows_.push_back(split_line(line, delim));
        }
        return t;
    }

    std::string name_;
    std::unordered_map<std::string, size_t> col_index_;
    std::vector<std::vector<std::string>> rows_;
};

// Writer that renders numbers with a fixed format so reruns are byte-identical.
class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw ParseError("cannot open for write: " + path.string());
    }

    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    static std::string fmt(double v, int decimals = 6) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
        return buf;
    }

private:
    std::ofstream out_;
};

}  // namespace sta::csv
