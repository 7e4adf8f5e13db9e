#include "morsp/image.hpp"

#include <algorithm>
#include <sstream>

namespace morsp {

GrayImage GrayImage::from_data(int height, int width, std::vector<double> data) {
    GrayImage img(height, width);
    if (data.size() != img.size())
        throw std::invalid_argument("GrayImage: data length must equal height*width");
    for (double v : data)
        if (!std::isfinite(v))
            throw std::invalid_argument("GrayImage: data contains non-finite values");
    img.data_ = std::move(data);
    return img;
}

double GrayImage::min_value() const {
    return *std::min_element(data_.begin(), data_.end());
}

double GrayImage::max_value() const {
    return *std::max_element(data_.begin(), data_.end());
}

StructuringElement make_element(ElementShape shape, int radius) {
    if (radius < 0)
        throw std::invalid_argument("make_element: radius must be >= 0");
    StructuringElement element;
    element.shape = shape;
    element.radius = radius;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (shape == ElementShape::disk &&
                dy * dy + dx * dx > radius * radius)
                continue;
            element.offsets.push_back({dy, dx});
        }
    }
    return element;
}

StructuringElement parse_element(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("element: expected <shape>:<radius>, got '" + text + "'");
    std::string shape = text.substr(0, colon);
    std::string radius_text = text.substr(colon + 1);
    int radius = 0;
    try {
        std::size_t used = 0;
        radius = std::stoi(radius_text, &used);
        if (used != radius_text.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("element: bad radius '" + radius_text + "'");
    }
    if (radius < 0)
        throw std::invalid_argument("element: radius must be >= 0");
    if (shape == "square") return make_element(ElementShape::square, radius);
    if (shape == "disk") return make_element(ElementShape::disk, radius);
    throw std::invalid_argument("element: unknown shape '" + shape + "'");
}

std::string element_to_string(const StructuringElement& element) {
    std::ostringstream out;
    out << (element.shape == ElementShape::square ? "square" : "disk")
        << ':' << element.radius;
    return out.str();
}

void require_same_shape(const GrayImage& a, const GrayImage& b, const char* where) {
    if (!a.same_shape(b)) {
        std::ostringstream msg;
        msg << where << ": size mismatch (" << a.height() << "x" << a.width()
            << " vs " << b.height() << "x" << b.width() << ")";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace morsp
