#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "waveleton/grid2d.hpp"

namespace waveleton {

// Shortest text that exactly round-trips the value, capped at 17 significant
// digits ("%.17g").
std::string format_g17(double v);

// Lowercase hex SHA-256 digests.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);  // IoError when unreadable

// Whole-file helpers. atomic_write_bytes stages the content in a sibling
// temporary file and renames it over the target, so readers never observe a
// partially written file. Throws IoError.
std::string read_file_bytes(const std::string& path);
void atomic_write_bytes(const std::string& path, const std::string& bytes);

// Binary grid container: "WGRD" magic, u32 version (=1), u32 nq, u32 np,
// f64 q_min, q_max, p_min, p_max, then nq*np f64 values, everything
// little-endian, values row-major with the q index outermost.
std::string encode_grid(const Grid2D& g);
Grid2D decode_grid(const std::string& bytes);  // IoError on malformed input
void write_grid_file(const std::string& path, const Grid2D& g);
Grid2D read_grid_file(const std::string& path);

// 8-bit binary PGM (P5) heatmap of the grid values. The header comment
// documents the mapping: byte = round(255 * (v - min) / (max - min)),
// degenerate all-equal grids map to 0. Image rows run over the q index
// (ascending), columns over the p index (ascending).
std::string encode_pgm(const Grid2D& g);
void write_pgm_file(const std::string& path, const Grid2D& g);

// CSV with one header row; every cell is pre-formatted text. Rows need not
// share a length (column-oriented callers pad as needed).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Parse a comma/whitespace-separated numeric table. A single leading
// non-numeric line is treated as a header and skipped; blank lines are
// ignored. Throws IoError on unreadable files or non-numeric cells.
std::vector<std::vector<double>> read_csv_numbers(const std::string& path);

}  // namespace waveleton
