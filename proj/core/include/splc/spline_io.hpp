#ifndef SPLC_SPLINE_IO_HPP
#define SPLC_SPLINE_IO_HPP

#include <iosfwd>
#include <string>

#include "splc/spline_field.hpp"

namespace splc {

/// Plain-text spline exchange format (see docs/spline-text-format.md).
/// Values are written with enough digits to round-trip binary64 exactly.
void write_spline_text(std::ostream& os, const SplineField& field);
SplineField read_spline_text(std::istream& is);

void write_spline_file(const std::string& path, const SplineField& field);
SplineField read_spline_file(const std::string& path);

}  // namespace splc

#endif
