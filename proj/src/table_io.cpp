#include "hrcm/table_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hrcm {

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw std::invalid_argument("table: row width != header width");
    rows.push_back(std::move(row));
}

std::string csv_escape(const std::string &cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string Table::to_csv() const {
    std::ostringstream s;
    for (std::size_t i = 0; i < header.size(); i++) {
        if (i) s << ',';
        s << csv_escape(header[i]);
    }
    s << "\r\n";
    for (const auto &row : rows) {
        for (std::size_t i = 0; i < row.size(); i++) {
            if (i) s << ',';
            s << csv_escape(row[i]);
        }
        s << "\r\n";
    }
    return s.str();
}

namespace {

std::string json_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string json_array(const std::vector<std::string> &vs) {
    std::string s = "[";
    for (std::size_t i = 0; i < vs.size(); i++) {
        if (i) s += ",";
        s += "\"" + json_escape(vs[i]) + "\"";
    }
    return s + "]";
}

} // namespace

std::string Table::to_json() const {
    std::string s = "{\"header\":" + json_array(header) + ",\"rows\":[";
    for (std::size_t i = 0; i < rows.size(); i++) {
        if (i) s += ",";
        s += json_array(rows[i]);
    }
    return s + "]}";
}

std::string RunManifest::canonical() const {
    std::ostringstream s;
    s << "subcommand=" << subcommand << ";model=" << model_digest
      << ";params=" << parameters << ";seed=" << seed
      << ";version=" << tool_version;
    return s.str();
}

std::string RunManifest::digest() const { return fnv1a_hex(canonical()); }

std::string render_output(const Table &t, const RunManifest &m,
                          const std::string &format) {
    if (format == "csv") {
        std::ostringstream s;
        s << "# manifest: " << m.digest() << "\r\n";
        s << "# subcommand: " << m.subcommand << "\r\n";
        s << "# model: " << m.model_digest << "\r\n";
        s << "# params: " << m.parameters << "\r\n";
        s << "# seed: " << m.seed << "\r\n";
        s << "# version: " << m.tool_version << "\r\n";
        s << t.to_csv();
        return s.str();
    }
    if (format == "json") {
        std::string s = "{\"manifest\":{";
        s += "\"digest\":\"" + m.digest() + "\",";
        s += "\"subcommand\":\"" + json_escape(m.subcommand) + "\",";
        s += "\"model\":\"" + json_escape(m.model_digest) + "\",";
        s += "\"params\":\"" + json_escape(m.parameters) + "\",";
        s += "\"seed\":" + std::to_string(m.seed) + ",";
        s += "\"version\":\"" + json_escape(m.tool_version) + "\"";
        s += "},\"table\":" + t.to_json() + "}\n";
        return s;
    }
    throw std::invalid_argument("unknown output format: " + format);
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace hrcm
