#pragma once

#include <string>

#include "gedfem/mesh.hpp"

namespace gedfem {

// Abaqus input-file subset: *NODE, *ELEMENT (TYPE=C3D8 variants), *NSET and
// *ELSET in plain and GENERATE form. Keywords are case-insensitive, comment
// lines start with **, ids are 1-based and may be sparse (remapped densely).
Mesh parse_inp(const std::string& path);
Mesh parse_inp_text(const std::string& text, const std::string& context);

// Minimal writer for the same subset (fixture generation, round-trip tests).
void write_inp(const Mesh& mesh, const std::string& path);

}  // namespace gedfem
