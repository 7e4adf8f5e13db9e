#ifndef MORSP_PGM_IO_HPP
#define MORSP_PGM_IO_HPP

#include <stdexcept>
#include <string>

#include "morsp/image.hpp"

namespace morsp {

struct FileNotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads a binary (P5) 8-bit PGM with maxval 255 and maps byte values
/// to [0,1] by v/255. Comments after the magic are honored.
GrayImage read_pgm(const std::string& path);

/// Writes binary P5 with maxval 255; values are clamped to [0,1] and
/// quantized round-half-up on v*255, so write-then-read is exact on
/// quantized data.
void write_pgm(const std::string& path, const GrayImage& image);

unsigned char quantize_byte(double v);

}  // namespace morsp

#endif
