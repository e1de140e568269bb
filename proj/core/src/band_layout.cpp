#include "ipsc/band_layout.hpp"

#include "ipsc/errors.hpp"

namespace ipsc {

BandLayout::BandLayout(std::vector<int> edges, std::string id)
    : edges_(std::move(edges)), id_(std::move(id)) {
    if (edges_.size() < 2) throw InvalidInput("band layout needs at least one band");
    if (edges_.front() != 0 || edges_.back() != kStride) {
        throw InvalidInput("band layout must cover [0, " + std::to_string(kStride) + ")");
    }
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i] <= edges_[i - 1]) throw InvalidInput("band edges must be strictly increasing");
    }
    for (std::size_t i = 2; i < edges_.size(); ++i) {
        if (edges_[i] - edges_[i - 1] < edges_[i - 1] - edges_[i - 2]) {
            throw InvalidInput("band widths must be non-decreasing");
        }
    }
}

const BandLayout& default_band_layout() {
    // 24 widths: 4,4,5,6,6,7,8,9,9,11,12,13,15,16,18,20,23,25,29,31,36,40,45,48
    static const BandLayout layout(
        {0, 4, 8, 13, 19, 25, 32, 40, 49, 58, 69, 81, 94, 109, 125,
         143, 163, 186, 211, 240, 271, 307, 347, 392, 440},
        "ipsc-v1-b24");
    return layout;
}

BandLayout::BandLayout() : BandLayout(default_band_layout()) {}

}  // namespace ipsc
