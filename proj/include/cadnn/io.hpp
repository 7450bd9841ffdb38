#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "cadnn/sim.hpp"

namespace cadnn {

/// 64-bit FNV-1a over a raw byte range.
std::uint64_t hash_bytes(const void* data, std::size_t size);
std::uint64_t hash_string(const std::string& s);

/// CSV rendering of a run log: one header row naming every column, one row
/// per logged step, doubles printed with 17 significant digits so values
/// round-trip exactly.
std::string csv_string(const SimLog& log);
void write_csv(const SimLog& log, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cadnn
