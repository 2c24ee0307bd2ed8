#ifndef HRCM_TABLE_IO_HPP
#define HRCM_TABLE_IO_HPP

#include <string>
#include <vector>

#include "hrcm/model_io.hpp"

namespace hrcm {

/** A rectangular table of strings with a mandatory header row.  Cells are
 * produced by the caller (numbers through format_double for 17-significant-
 * digit round-tripping) and serialized to RFC-4180 CSV or a JSON document. */
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string to_csv() const;   // RFC-4180: CRLF, quoting when needed
    std::string to_json() const;  // {"header": [...], "rows": [[...], ...]}
};

std::string csv_escape(const std::string &cell);

/** Provenance block attached to every CLI output: what ran, on what, with
 * which knobs.  The digest is FNV-1a over the canonical serialization, so
 * equal manifests imply byte-identical data sections. */
struct RunManifest {
    std::string subcommand;
    std::string model_digest;  // FNV-1a of the model file text ("-" if none)
    std::string parameters;    // canonical "key=value;..." string
    std::uint64_t seed = 0;
    std::string tool_version;

    std::string canonical() const;
    std::string digest() const;  // FNV-1a of canonical()
};

/** Writes a table plus manifest: CSV gets "# key: value" comment lines
 * before the header; JSON nests {"manifest": {...}, "table": {...}}. */
std::string render_output(const Table &t, const RunManifest &m,
                          const std::string &format);

void write_file(const std::string &path, const std::string &content);

} // namespace hrcm

#endif
