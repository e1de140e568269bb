#include "ipsc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "ipsc/errors.hpp"

namespace ipsc {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
    v.push_back((x >> 16) & 0xff);
    v.push_back((x >> 24) & 0xff);
}

void put_u16(std::vector<unsigned char>& v, std::uint16_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
}

}  // namespace

AudioSignal read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open WAV file: " + path);
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (data.size() < 44 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
        std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
        throw InvalidInput("not a RIFF/WAVE file: " + path);
    }

    std::size_t pos = 12;
    int channels = 0;
    int bits = 0;
    std::uint32_t rate = 0;
    std::uint16_t format = 0;
    const unsigned char* pcm = nullptr;
    std::size_t pcm_bytes = 0;
    while (pos + 8 <= data.size()) {
        const unsigned char* hdr = data.data() + pos;
        std::uint32_t chunk_size = read_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (body + chunk_size > data.size()) chunk_size = static_cast<std::uint32_t>(data.size() - body);
        if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_size >= 16) {
            format = read_u16(data.data() + body);
            channels = read_u16(data.data() + body + 2);
            rate = read_u32(data.data() + body + 4);
            bits = read_u16(data.data() + body + 14);
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            pcm = data.data() + body;
            pcm_bytes = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1);
    }

    if (!pcm || rate == 0) throw InvalidInput("WAV missing fmt/data chunk: " + path);
    if (format != 1 || bits != 16) throw InvalidInput("WAV must be 16-bit PCM: " + path);
    if (channels != 1) throw InvalidInput("WAV must be mono: " + path);

    AudioSignal out;
    out.sample_rate = static_cast<int>(rate);
    std::size_t n = pcm_bytes / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int16_t s = static_cast<std::int16_t>(pcm[2 * i] | (pcm[2 * i + 1] << 8));
        out.samples[i] = static_cast<double>(s) / 32768.0;
    }
    return out;
}

void write_wav(const std::string& path, const AudioSignal& signal) {
    std::vector<unsigned char> out;
    std::uint32_t n = static_cast<std::uint32_t>(signal.samples.size());
    std::uint32_t data_bytes = n * 2;
    out.reserve(44 + data_bytes);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_bytes);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<std::uint32_t>(signal.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(signal.sample_rate) * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_bytes);
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::clamp(signal.samples[i], -1.0, 1.0);
        auto s = static_cast<std::int16_t>(std::lrint(v * 32767.0));
        out.push_back(static_cast<unsigned char>(s & 0xff));
        out.push_back(static_cast<unsigned char>((s >> 8) & 0xff));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write WAV file: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

}  // namespace ipsc
