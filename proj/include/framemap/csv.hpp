#pragma once

// Minimal delimited-table reader/writer. The corpus manifest is a UTF-8
// comma- or tab-separated file; the delimiter is inferred from the header
// row. Quoting follows RFC 4180 (double quotes, doubled to escape).

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace framemap::csv {

struct Table {
    char delimiter = ',';
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    }
};

namespace detail {

inline std::vector<std::string> split_record(const std::string& record, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < record.size(); ++i) {
        const char c = record[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < record.size() && record[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

// Reads one logical record, continuing across newlines inside quotes.
inline bool read_record(std::istream& in, std::string& record) {
    record.clear();
    std::string line;
    bool got = false;
    while (std::getline(in, line)) {
        got = true;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        record += record.empty() ? line : "\n" + line;
        std::size_t quotes = 0;
        for (char c : record) {
            if (c == '"') ++quotes;
        }
        if (quotes % 2 == 0) return true;
        record += "";  // odd quote count: record continues on the next line
    }
    return got;
}

}  // namespace detail

inline Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tabular file: " + path);
    Table t;
    std::string record;
    if (!detail::read_record(in, record)) {
        throw std::runtime_error("empty tabular file: " + path);
    }
    t.delimiter = record.find('\t') != std::string::npos ? '\t' : ',';
    t.header = detail::split_record(record, t.delimiter);
    while (detail::read_record(in, record)) {
        if (record.empty()) continue;
        t.rows.push_back(detail::split_record(record, t.delimiter));
    }
    return t;
}

inline std::string quote(const std::string& field, char delim) {
    bool needs = false;
    for (char c : field) {
        if (c == delim || c == '"' || c == '\n' || c == '\r') {
            needs = true;
            break;
        }
    }
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

inline std::string to_string(const Table& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) os << t.delimiter;
        os << quote(t.header[i], t.delimiter);
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << t.delimiter;
            os << quote(row[i], t.delimiter);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace framemap::csv
