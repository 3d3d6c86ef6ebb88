#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace strata::csv {

using Record = std::vector<std::string>;

/// RFC 4180 reader: comma separated, double-quote escaping, quoted fields may
/// span lines. Accepts LF or CRLF line endings and a leading UTF-8 BOM.
/// Throws Error(kValue) on an unterminated quoted field.
std::vector<Record> read_all(std::istream& in);

/// Writes one field, quoting only when needed.
void write_field(std::ostream& out, std::string_view field);

void write_record(std::ostream& out, const Record& record);

}  // namespace strata::csv
