#include "ipsc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "ipsc/bitstream.hpp"
#include "ipsc/errors.hpp"
#include "ipsc/quant.hpp"
#include "ipsc/rng.hpp"

namespace ipsc {

namespace {

constexpr char kMagic[4] = {'I', 'P', 'S', 'C'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kZeroRunEscape = 8;

// Quantize one frame's lines into bins at a given allocation level.
// Silent bands get zero placeholders.
void quantize_frame(std::span<const double> coeffs, std::span<const std::int32_t> env_idx,
                    const BandLayout& layout, std::int32_t alloc, std::span<std::int32_t> out) {
    for (int b = 0; b < layout.bands(); ++b) {
        const double mid = env_midpoint(env_idx[b]);
        if (mid == 0.0) {
            for (int k = layout.begin(b); k < layout.end(b); ++k) out[k] = 0;
            continue;
        }
        const double delta = line_step(mid, alloc);
        for (int k = layout.begin(b); k < layout.end(b); ++k) {
            out[k] = static_cast<std::int32_t>(std::floor(coeffs[k] / delta + 0.5));
        }
    }
}

template <class Sink>
void code_bins(Sink& sink, std::span<const std::int32_t> bins) {
    std::size_t i = 0;
    const std::size_t n = bins.size();
    while (i < n) {
        if (bins[i] == 0) {
            std::size_t run = 1;
            while (i + run < n && bins[i + run] == 0) ++run;
            std::size_t head = std::min(run, kZeroRunEscape);
            for (std::size_t j = 0; j < head; ++j) sink.put_seg(0);
            if (run >= kZeroRunEscape) sink.put_ueg(run - kZeroRunEscape);
            i += run;
        } else {
            sink.put_seg(bins[i]);
            ++i;
        }
    }
}

void decode_bins(BitReader& reader, std::span<std::int32_t> out) {
    std::size_t i = 0;
    std::size_t zrun = 0;
    while (i < out.size()) {
        std::int64_t v = reader.get_seg();
        if (v < INT32_MIN || v > INT32_MAX) {
            throw DecodeError("bin index out of range", reader.byte_offset());
        }
        out[i++] = static_cast<std::int32_t>(v);
        if (v == 0) {
            if (++zrun == kZeroRunEscape) {
                std::uint64_t extra = reader.get_ueg();
                if (i + extra > out.size()) {
                    throw DecodeError("zero run overflows frame", reader.byte_offset());
                }
                for (std::uint64_t j = 0; j < extra; ++j) out[i++] = 0;
                zrun = 0;
            }
        } else {
            zrun = 0;
        }
    }
}

template <class Sink>
void code_frame(Sink& sink, bool overflow, std::int32_t alloc, std::int32_t prev_alloc,
                std::span<const std::int32_t> env_idx, std::int32_t prev_first_env,
                std::span<const std::int32_t> bins) {
    sink.put_bit(overflow ? 1 : 0);
    sink.put_seg(static_cast<std::int64_t>(alloc) - prev_alloc);
    std::int32_t prev = prev_first_env;
    for (std::size_t b = 0; b < env_idx.size(); ++b) {
        sink.put_seg(static_cast<std::int64_t>(env_idx[b]) - prev);
        prev = env_idx[b];
    }
    code_bins(sink, bins);
}

// Byte-aligned cost of a frame at a candidate allocation level.
std::int64_t frame_cost_bits(std::span<const std::int32_t> bins, std::int32_t alloc,
                             std::int32_t prev_alloc, std::span<const std::int32_t> env_idx,
                             std::int32_t prev_first_env, bool overflow) {
    BitCounter counter;
    code_frame(counter, overflow, alloc, prev_alloc, env_idx, prev_first_env, bins);
    return (counter.bits() + 7) / 8 * 8;
}

bool frame_all_silent(std::span<const std::int32_t> env_idx) {
    return std::all_of(env_idx.begin(), env_idx.end(),
                       [](std::int32_t i) { return i == kSilentEnvIndex; });
}

}  // namespace

Measurement make_empty_measurement(std::size_t frames, const BandLayout& layout) {
    Measurement m{frames,
                  std::vector<std::int32_t>(frames * layout.bands(), kSilentEnvIndex),
                  std::vector<std::int32_t>(frames * kStride, 0),
                  std::vector<std::int32_t>(frames, 0),
                  std::vector<std::uint8_t>(frames, 0),
                  layout};
    return m;
}

void validate_measurement(const Measurement& m) {
    const int bands = m.layout.bands();
    if (m.frames == 0) throw InvalidInput("measurement: no frames");
    if (m.env_indices.size() != m.frames * bands ||
        m.bin_indices.size() != m.frames * kStride ||
        m.alloc_levels.size() != m.frames || m.overflow.size() != m.frames) {
        throw InvalidInput("measurement: inconsistent dimensions");
    }
    for (std::size_t f = 0; f < m.frames; ++f) {
        if (m.alloc_levels[f] < kAllocMin || m.alloc_levels[f] > kAllocMax) {
            throw InvalidInput("measurement: allocation level out of range");
        }
        for (int b = 0; b < bands; ++b) {
            if (m.env(f, b) != kSilentEnvIndex && m.env(f, b) != kUncodedEnvIndex) continue;
            auto bins = m.bins(f);
            for (int k = m.layout.begin(b); k < m.layout.end(b); ++k) {
                if (bins[k] != 0) {
                    throw InvalidInput("measurement: silent band carries nonzero bins");
                }
            }
        }
    }
}

std::vector<std::uint8_t> encode_measurement(const Measurement& m, const StreamInfo& info) {
    validate_measurement(m);
    for (auto idx : m.env_indices) {
        if (idx == kUncodedEnvIndex) {
            throw InvalidInput("unconstrained envelope bands cannot be serialized");
        }
    }
    BitWriter w;
    for (char c : kMagic) w.put_byte(static_cast<std::uint8_t>(c));
    w.put_byte(kVersion);
    w.put_u32(static_cast<std::uint32_t>(info.sample_rate));
    w.put_u16(static_cast<std::uint16_t>(kStride));
    w.put_u32(static_cast<std::uint32_t>(m.frames));
    const std::string& id = m.layout.id();
    w.put_byte(static_cast<std::uint8_t>(id.size()));
    for (char c : id) w.put_byte(static_cast<std::uint8_t>(c));
    w.put_u16(static_cast<std::uint16_t>(std::lround(info.target_kbps * 10.0)));

    std::int32_t prev_alloc = 0;
    std::int32_t prev_first_env = 0;
    for (std::size_t f = 0; f < m.frames; ++f) {
        std::span<const std::int32_t> env_row{m.env_indices.data() + f * m.layout.bands(),
                                              static_cast<std::size_t>(m.layout.bands())};
        code_frame(w, m.overflow[f] != 0, m.alloc_levels[f], prev_alloc, env_row,
                   prev_first_env, m.bins(f));
        w.align_byte();
        prev_alloc = m.alloc_levels[f];
        prev_first_env = env_row[0];
    }
    return w.take();
}

DecodedStream decode_measurement(std::span<const std::uint8_t> bytes) {
    BitReader r(bytes);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.get_byte());
    if (std::memcmp(magic, kMagic, 4) != 0) throw DecodeError("bad magic", 0);
    std::uint8_t version = r.get_byte();
    if (version != kVersion) throw DecodeError("unsupported version", r.byte_offset());
    StreamInfo info;
    info.sample_rate = static_cast<int>(r.get_u32());
    if (info.sample_rate <= 0) throw DecodeError("bad sample rate", r.byte_offset());
    std::uint16_t stride = r.get_u16();
    if (stride != kStride) throw DecodeError("unsupported stride", r.byte_offset());
    std::uint32_t frames = r.get_u32();
    if (frames == 0) throw DecodeError("empty stream", r.byte_offset());
    std::uint8_t id_len = r.get_byte();
    std::string id(id_len, '\0');
    for (char& c : id) c = static_cast<char>(r.get_byte());
    if (id != default_band_layout().id()) {
        throw DecodeError("unknown band layout id '" + id + "'", r.byte_offset());
    }
    info.target_kbps = r.get_u16() / 10.0;

    Measurement m = make_empty_measurement(frames, default_band_layout());
    const int bands = m.layout.bands();
    std::int32_t prev_alloc = 0;
    std::int32_t prev_first_env = 0;
    for (std::uint32_t f = 0; f < frames; ++f) {
        m.overflow[f] = static_cast<std::uint8_t>(r.get_bit());
        std::int64_t alloc = prev_alloc + r.get_seg();
        if (alloc < kAllocMin || alloc > kAllocMax) {
            throw DecodeError("allocation level out of range", r.byte_offset());
        }
        m.alloc_levels[f] = static_cast<std::int32_t>(alloc);
        std::int64_t prev = prev_first_env;
        for (int b = 0; b < bands; ++b) {
            prev += r.get_seg();
            if (prev < kSilentEnvIndex || prev > 1000) {
                throw DecodeError("envelope index out of range", r.byte_offset());
            }
            m.env(f, b) = static_cast<std::int32_t>(prev);
            if (b == 0) prev_first_env = static_cast<std::int32_t>(prev);
        }
        decode_bins(r, m.bins(f));
        r.align_byte();
        prev_alloc = m.alloc_levels[f];
    }
    if (!r.exhausted()) throw DecodeError("trailing data after last frame", r.byte_offset());
    try {
        validate_measurement(m);
    } catch (const InvalidInput& e) {
        throw DecodeError(e.what(), r.byte_offset());
    }
    return {std::move(m), info};
}

std::int64_t frame_line_bits(std::span<const double> frame_coeffs,
                             std::span<const std::int32_t> frame_env_indices,
                             const BandLayout& layout, std::int32_t alloc) {
    std::vector<std::int32_t> bins(kStride, 0);
    quantize_frame(frame_coeffs, frame_env_indices, layout, alloc, bins);
    BitCounter counter;
    code_bins(counter, std::span<const std::int32_t>(bins));
    return counter.bits();
}

RateChoice rate_loop(std::span<const double> frame_coeffs,
                     std::span<const std::int32_t> frame_env_indices,
                     const BandLayout& layout, std::int32_t prev_alloc,
                     std::int32_t prev_first_env, std::int64_t budget_bits) {
    std::vector<std::int32_t> bins(kStride, 0);
    for (std::int32_t a = kAllocMin; a <= kAllocMax; ++a) {
        quantize_frame(frame_coeffs, frame_env_indices, layout, a, bins);
        std::int64_t cost = frame_cost_bits(bins, a, prev_alloc, frame_env_indices,
                                            prev_first_env, false);
        if (cost <= budget_bits) return {a, false, cost};
    }
    quantize_frame(frame_coeffs, frame_env_indices, layout, kAllocMax, bins);
    std::int64_t cost = frame_cost_bits(bins, kAllocMax, prev_alloc, frame_env_indices,
                                        prev_first_env, true);
    return {kAllocMax, true, cost};
}

EncodeResult encode(const AudioSignal& signal, double kbps) {
    if (signal.sample_rate != kSampleRate) {
        throw InvalidInput("unsupported sample rate " + std::to_string(signal.sample_rate) +
                           " (expected " + std::to_string(kSampleRate) + ")");
    }
    if (!(kbps > 0.0) || !std::isfinite(kbps)) throw InvalidInput("bitrate must be positive");
    if (!all_finite(signal)) throw InvalidInput("signal has non-finite samples");

    const AudioSignal padded = pad_to_stride(signal);
    const MdctSpectrum spec = mdct().analyze(padded);
    const BandLayout& layout = spec.layout;
    const int bands = layout.bands();
    const std::size_t frames = spec.frames;

    Measurement m = make_empty_measurement(frames, layout);
    const std::vector<double> env = envelope(spec);
    for (std::size_t f = 0; f < frames; ++f) {
        for (int b = 0; b < bands; ++b) m.env(f, b) = quantize_envelope(env[f * bands + b]);
    }

    const double duration = static_cast<double>(padded.size()) / kSampleRate;
    const auto total_budget = static_cast<std::int64_t>(std::floor(kbps * 1000.0 * duration));

    StreamInfo info{kSampleRate, kbps};

    // Fixed header size, charged against the budget up front.
    const std::int64_t header_bits = 8 * (4 + 1 + 4 + 2 + 4 + 1 +
                                          static_cast<std::int64_t>(layout.id().size()) + 2);

    std::int64_t spent = header_bits;
    std::int32_t prev_alloc = 0;
    std::int32_t prev_first_env = 0;
    std::vector<std::int32_t> bins(kStride);
    for (std::size_t f = 0; f < frames; ++f) {
        std::span<const std::int32_t> env_row{m.env_indices.data() + f * bands,
                                              static_cast<std::size_t>(bands)};
        const std::int64_t budget =
            total_budget * static_cast<std::int64_t>(f + 1) / static_cast<std::int64_t>(frames) -
            spent;
        RateChoice choice;
        if (frame_all_silent(env_row)) {
            // Nothing to code; keep the previous level for a 1-bit delta.
            std::fill(bins.begin(), bins.end(), 0);
            choice.alloc = prev_alloc;
            choice.overflow = false;
            choice.bits = frame_cost_bits(bins, prev_alloc, prev_alloc, env_row,
                                          prev_first_env, false);
        } else {
            choice = rate_loop(spec.row(f), env_row, layout, prev_alloc, prev_first_env, budget);
            quantize_frame(spec.row(f), env_row, layout, choice.alloc, bins);
        }
        m.alloc_levels[f] = choice.alloc;
        m.overflow[f] = choice.overflow ? 1 : 0;
        std::copy(bins.begin(), bins.end(), m.bins(f).begin());
        spent += choice.bits;
        prev_alloc = choice.alloc;
        prev_first_env = env_row[0];
    }

    EncodeResult result;
    result.bytes = encode_measurement(m, info);
    result.measurement = std::move(m);
    result.realized_kbps = static_cast<double>(result.bytes.size()) * 8.0 / duration / 1000.0;
    return result;
}

MdctSpectrum reconstruct_midpoints(const Measurement& m) {
    const BandLayout& layout = m.layout;
    MdctSpectrum spec{m.frames, std::vector<double>(m.frames * kStride, 0.0), layout};
    for (std::size_t f = 0; f < m.frames; ++f) {
        auto bins = m.bins(f);
        auto row = spec.row(f);
        for (int b = 0; b < layout.bands(); ++b) {
            const double mid = env_midpoint(m.env(f, b));
            if (mid == 0.0) continue;
            const double delta = line_step(mid, m.alloc_levels[f]);
            for (int k = layout.begin(b); k < layout.end(b); ++k) {
                row[k] = bins[k] * delta;
            }
        }
    }
    return spec;
}

AudioSignal decode_legacy(std::span<const std::uint8_t> bytes, std::uint64_t noise_seed,
                          bool noise_fill) {
    DecodedStream stream = decode_measurement(bytes);
    const Measurement& m = stream.measurement;
    const BandLayout& layout = m.layout;
    MdctSpectrum spec = reconstruct_midpoints(m);

    if (noise_fill) {
        const std::int32_t a_hi =
            *std::max_element(m.alloc_levels.begin(), m.alloc_levels.end());
        Rng rng(noise_seed);
        for (std::size_t f = 0; f < m.frames; ++f) {
            if (m.alloc_levels[f] < a_hi - 2) continue;
            auto bins = m.bins(f);
            auto row = spec.row(f);
            for (int b = 0; b < layout.bands(); ++b) {
                const double mid = env_midpoint(m.env(f, b));
                if (mid == 0.0) continue;
                bool all_zero = true;
                for (int k = layout.begin(b); k < layout.end(b) && all_zero; ++k) {
                    all_zero = bins[k] == 0;
                }
                if (!all_zero) continue;
                const double scale = std::sqrt(mid);
                for (int k = layout.begin(b); k < layout.end(b); ++k) {
                    row[k] = scale * rng.normal();
                }
            }
        }
    }

    AudioSignal out = mdct().synthesize(spec);
    out.sample_rate = stream.info.sample_rate;
    return out;
}

}  // namespace ipsc
