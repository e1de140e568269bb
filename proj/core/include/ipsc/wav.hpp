#pragma once

#include <string>

#include "ipsc/audio.hpp"

namespace ipsc {

/// Reads a 16-bit PCM mono WAV file. Throws InvalidInput for anything else
/// (missing file, other codecs, multichannel).
AudioSignal read_wav(const std::string& path);

/// Writes 16-bit PCM mono. Samples are clipped to [-1, 1] before rounding.
void write_wav(const std::string& path, const AudioSignal& signal);

}  // namespace ipsc
