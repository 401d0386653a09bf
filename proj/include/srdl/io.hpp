#pragma once

#include "srdl/cube.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace srdl {

enum class CubeFormat { native, envi, csv };

CubeFormat parse_format(const std::string& name);

// Loads a cube. `path` conventions:
//   native: "<name>.json" (or "<name>", ".json" appended) next to "<name>.bin",
//           gt sidecar "<name>.gt.csv" picked up when present
//   envi:   ENVI header file ("x.hdr") or the raw file next to it; BSQ/BIL/BIP,
//           uncompressed, integer/float samples widened to f64
//   csv:    dims line "height,width,bands" then one line per pixel
// Band-interleaved inputs are normalized to pixel-major layout.
HsiCube load_cube(const std::string& path, CubeFormat format);

// Writes the native format: <name>.json header + <name>.bin little-endian f64
// payload (+ <name>.gt.csv when the cube has ground truth). `path` may carry
// the .json suffix or not.
void save_cube(const HsiCube& cube, const std::string& path);

// Grid CSV of per-pixel integers, height lines x width comma-separated values.
// The reader accepts comma or whitespace separated streams.
std::vector<int> load_label_csv(const std::string& path, int height, int width);
// Same reader, dimensions inferred from the grid shape (rejects ragged rows).
std::vector<int> load_label_grid(const std::string& path, int* height, int* width);
void save_label_csv(const std::vector<int>& labels, int height, int width,
                    const std::string& path);

// 16-bit binary PGM (P5, maxval 65535), one gray level per label.
std::vector<int> load_label_pgm(const std::string& path, int* height, int* width);
void save_label_pgm(const std::vector<int>& labels, int height, int width,
                    const std::string& path);

// Binary PPM (P6). rgb is 3 bytes per pixel.
void save_ppm(const std::vector<uint8_t>& rgb, int height, int width,
              const std::string& path);

// FNV-1a over a file's bytes; used to stamp reports with an input fingerprint.
uint64_t fnv1a_file(const std::string& path);
// Incremental FNV-1a over a buffer; default hash is the 64-bit offset basis.
uint64_t fnv1a_bytes(const void* data, size_t len,
                     uint64_t hash = 14695981039346656037ull);

} // namespace srdl
