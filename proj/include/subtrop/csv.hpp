#ifndef SUBTROP_CSV_HPP_
#define SUBTROP_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "subtrop/matrix.hpp"

namespace subtrop {

// Comma-separated matrix text. `NaN` (any case) marks a missing entry.
// Malformed cells raise DataError naming the 1-based line and column.
NonNegMatrix parse_csv(std::istream& in, bool skip_header = false);
NonNegMatrix read_csv(const std::filesystem::path& path,
                      bool skip_header = false);

// Writes 17 significant digits so values round-trip exactly.
void write_csv(std::ostream& out, const NonNegMatrix& A);
void write_csv(const std::filesystem::path& path, const NonNegMatrix& A);

std::string format_double(double v);

}  // namespace subtrop

#endif  // SUBTROP_CSV_HPP_
