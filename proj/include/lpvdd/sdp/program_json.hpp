#pragma once

#include <filesystem>
#include <string>

#include "lpvdd/sdp/program.hpp"

namespace lpvdd::sdp {

// JSON interchange for debugging and solver cross-checks. Matrices are stored
// as sparse triplets {"rows", "cols", "entries": [[i, j, v], ...]}.
std::string dump_program(const ConicProgram& program);
ConicProgram load_program(const std::string& json_text);

void write_program(const std::filesystem::path& path, const ConicProgram& program);
ConicProgram read_program(const std::filesystem::path& path);

}  // namespace lpvdd::sdp
