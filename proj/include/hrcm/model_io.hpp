#ifndef HRCM_MODEL_IO_HPP
#define HRCM_MODEL_IO_HPP

#include <string>

#include "hrcm/models.hpp"

namespace hrcm {

/** Structured key-value model definition format ("key = value" lines, '#'
 * comments).  Schema documented in README.md; parse/serialize round-trips
 * losslessly (doubles written with 17 significant digits). */
AdjacencyModel parse_model(const std::string &text);
AdjacencyModel load_model(const std::string &path);
std::string serialize_model(const AdjacencyModel &m);

/** FNV-1a 64-bit digest of a byte string, hex-encoded; used to tie output
 * tables to the exact model definition that produced them. */
std::string fnv1a_hex(const std::string &bytes);

/** Formats a double with 17 significant digits (shortest exact form used
 * throughout CSV/JSON output). */
std::string format_double(double v);

} // namespace hrcm

#endif
