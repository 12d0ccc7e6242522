#pragma once

#include <string>

#include "mlcs/core.hpp"

namespace mlcs {

/// Reads a binary (P5) PGM with maxval up to 65535, scaled to [0, 1] by maxval.
/// Throws FormatError on malformed input.
Image2D load_pgm(const std::string& path);

/// Writes a binary PGM, quantizing round(v * maxval) after clamping to [0, 1].
/// maxval > 255 selects 16-bit big-endian samples.
void save_pgm(const Image2D& img, const std::string& path, int maxval = 255);

/// Writes a real or complex array in NumPy .npy (v1.0, little-endian, C order).
void save_npy(const std::string& path, const Signal& data, std::vector<Index> shape, bool complex);
/// Reads an array written by save_npy ('<f8' or '<c16').
Signal load_npy(const std::string& path, std::vector<Index>* shape = nullptr);

}  // namespace mlcs
