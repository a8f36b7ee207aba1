#pragma once

#include <iosfwd>
#include <string>

#include "fdg/core.hpp"

namespace fdg {

// AG text: the vertex count, one line of vertex attributes, then the n x n
// arc matrix row by row. A tuple is comma-separated components; "-" is a null
// vertex or a missing arc, "~" an explicit null arc. Optional trailing lines:
// "extended", then "ordered" followed by "order i: j k ..." per vertex for the
// cyclic arc order. '#' starts a comment.
AttributedGraph parse_ag(const std::string& text);
std::string format_ag(const AttributedGraph& g);
AttributedGraph read_ag(const std::string& path);
void write_ag(const std::string& path, const AttributedGraph& g);

// FDG text is keyword-per-line with every double written at full precision.
Fdg parse_fdg(const std::string& text);
std::string format_fdg(const Fdg& f);
Fdg read_fdg(const std::string& path);
void write_fdg(const std::string& path, const Fdg& f);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace fdg
