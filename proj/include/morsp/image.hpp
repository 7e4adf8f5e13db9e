#ifndef MORSP_IMAGE_HPP
#define MORSP_IMAGE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace morsp {

/// Row-major 2-D grid of double scalars. Mask/skeleton images live in
/// [0,1]; feature maps are unrestricted. Operations treat images as
/// values and return fresh instances.
class GrayImage {
public:
    GrayImage() = default;

    GrayImage(int height, int width, double fill = 0.0)
        : height_(height), width_(width),
          data_(check_dims(height, width), fill) {}

    /// Builds from external data, enforcing the type invariants
    /// (size match, finite entries).
    static GrayImage from_data(int height, int width, std::vector<double> data);

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return data_.size(); }

    double operator()(int r, int c) const { return data_[idx(r, c)]; }
    double& operator()(int r, int c) { return data_[idx(r, c)]; }

    double at(int r, int c) const {
        check_bounds(r, c);
        return data_[idx(r, c)];
    }

    bool in_bounds(int r, int c) const {
        return r >= 0 && r < height_ && c >= 0 && c < width_;
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const GrayImage& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double min_value() const;
    double max_value() const;

    bool operator==(const GrayImage& other) const {
        return height_ == other.height_ && width_ == other.width_ &&
               data_ == other.data_;
    }

private:
    static std::size_t check_dims(int height, int width) {
        if (height < 1 || width < 1)
            throw std::invalid_argument("GrayImage: dimensions must be >= 1");
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * width_ + c;
    }
    void check_bounds(int r, int c) const {
        if (!in_bounds(r, c))
            throw std::out_of_range("GrayImage: pixel (" + std::to_string(r) +
                                    "," + std::to_string(c) + ") out of bounds");
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

/// Integer pixel offset (dy down, dx right).
struct Offset {
    int dy = 0;
    int dx = 0;
    bool operator==(const Offset&) const = default;
};

enum class ElementShape { square, disk };

/// Finite set of pixel offsets containing the origin; the neighborhood
/// of every morphological operation. Square radius r covers
/// max(|dy|,|dx|) <= r, disk radius r covers dy^2+dx^2 <= r^2.
struct StructuringElement {
    ElementShape shape = ElementShape::square;
    int radius = 0;
    std::vector<Offset> offsets;
};

StructuringElement make_element(ElementShape shape, int radius);

/// Parses "square:1" / "disk:2" element descriptions (CLI and config files).
StructuringElement parse_element(const std::string& text);
std::string element_to_string(const StructuringElement& element);

void require_same_shape(const GrayImage& a, const GrayImage& b, const char* where);

}  // namespace morsp

#endif
