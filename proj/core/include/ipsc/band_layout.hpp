#pragma once

#include <string>
#include <vector>

#include "ipsc/audio.hpp"

namespace ipsc {

/// Partition of the kStride MDCT lines into contiguous frequency bands.
/// Band widths are non-decreasing with band index (wider at high frequency).
class BandLayout {
public:
    /// The canonical layout (same as default_band_layout()).
    BandLayout();

    /// edges must be strictly increasing, start at 0 and end at kStride.
    BandLayout(std::vector<int> edges, std::string id);

    int bands() const { return static_cast<int>(edges_.size()) - 1; }
    int begin(int b) const { return edges_[b]; }
    int end(int b) const { return edges_[b + 1]; }
    int width(int b) const { return edges_[b + 1] - edges_[b]; }
    const std::vector<int>& edges() const { return edges_; }
    const std::string& id() const { return id_; }

    bool operator==(const BandLayout& other) const {
        return edges_ == other.edges_ && id_ == other.id_;
    }

private:
    std::vector<int> edges_;
    std::string id_;
};

/// The canonical 24-band quasi-Bark layout, id "ipsc-v1-b24".
/// Widths grow roughly geometrically from 4 lines to 48 lines.
const BandLayout& default_band_layout();

}  // namespace ipsc
