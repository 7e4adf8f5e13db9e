#include "morsp/pgm_io.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace morsp {

namespace {

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) return token;
            continue;
        }
        token.push_back(static_cast<char>(ch));
    }
    return token;
}

int parse_header_int(std::istream& in, const std::string& path,
                     const char* what) {
    std::string token = next_token(in);
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError(path + ": bad PGM " + what);
    return std::stoi(token);
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw FileNotFoundError(path + ": no such file");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path + ": cannot open");

    std::string magic = next_token(in);
    if (magic != "P5")
        throw FormatError(path + ": expected binary PGM magic P5, got '" +
                          magic + "'");
    int width = parse_header_int(in, path, "width");
    int height = parse_header_int(in, path, "height");
    int maxval = parse_header_int(in, path, "maxval");
    if (width < 1 || height < 1)
        throw FormatError(path + ": bad PGM dimensions");
    if (maxval != 255)
        throw FormatError(path + ": only 8-bit PGM (maxval 255) is supported");
    // The maxval token is terminated by exactly one whitespace byte,
    // already consumed by the tokenizer.

    std::vector<unsigned char> bytes(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw FormatError(path + ": truncated pixel data");

    GrayImage image(height, width);
    for (std::size_t i = 0; i < bytes.size(); ++i)
        image.data()[i] = bytes[i] / 255.0;
    return image;
}

unsigned char quantize_byte(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("quantize_byte: non-finite");
    double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    double scaled = std::floor(clamped * 255.0 + 0.5);  // round half up
    return static_cast<unsigned char>(scaled > 255.0 ? 255.0 : scaled);
}

void write_pgm(const std::string& path, const GrayImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    std::vector<unsigned char> bytes(image.size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = quantize_byte(image.data()[i]);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace morsp
