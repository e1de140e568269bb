#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipsc/errors.hpp"

namespace ipsc {

/// MSB-first bit writer.
class BitWriter {
public:
    void put_bit(int bit) {
        if (fill_ == 0) bytes_.push_back(0);
        if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - fill_));
        fill_ = (fill_ + 1) & 7;
    }

    void put_bits(std::uint64_t value, int count) {
        for (int i = count - 1; i >= 0; --i) put_bit(static_cast<int>((value >> i) & 1u));
    }

    /// Exp-Golomb(k=0) for unsigned values: n-1 zeros, then value+1 in n bits.
    void put_ueg(std::uint64_t value) {
        std::uint64_t v = value + 1;
        int n = 64 - __builtin_clzll(v);
        for (int i = 0; i < n - 1; ++i) put_bit(0);
        put_bits(v, n);
    }

    /// Signed mapping: s>0 -> 2s-1, s<=0 -> -2s.
    void put_seg(std::int64_t value) {
        put_ueg(value > 0 ? 2 * static_cast<std::uint64_t>(value) - 1
                          : 2 * static_cast<std::uint64_t>(-value));
    }

    void put_byte(std::uint8_t b) { put_bits(b, 8); }
    void put_u16(std::uint16_t v) { put_byte(v & 0xff); put_byte(v >> 8); }
    void put_u32(std::uint32_t v) { put_u16(v & 0xffff); put_u16(v >> 16); }

    void align_byte() { fill_ = 0; }

    std::size_t bit_count() const { return bytes_.size() * 8 - (fill_ ? 8 - fill_ : 0); }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t> take() { fill_ = 0; return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    int fill_ = 0;  // bits used in the last byte, 0 = byte-aligned
};

/// Pure bit counter with the BitWriter interface; used by the rate loop.
class BitCounter {
public:
    void put_bit(int) { ++bits_; }
    void put_bits(std::uint64_t, int count) { bits_ += count; }
    void put_ueg(std::uint64_t value) {
        std::uint64_t v = value + 1;
        bits_ += 2 * (64 - __builtin_clzll(v)) - 1;
    }
    void put_seg(std::int64_t value) {
        put_ueg(value > 0 ? 2 * static_cast<std::uint64_t>(value) - 1
                          : 2 * static_cast<std::uint64_t>(-value));
    }
    std::int64_t bits() const { return bits_; }

private:
    std::int64_t bits_ = 0;
};

/// MSB-first bit reader over a byte buffer. Out-of-range reads throw
/// DecodeError carrying the current byte offset.
class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    int get_bit() {
        if (pos_ >= bytes_.size() * 8) throw DecodeError("bitstream truncated", byte_offset());
        int bit = (bytes_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
        ++pos_;
        return bit;
    }

    std::uint64_t get_bits(int count) {
        std::uint64_t v = 0;
        for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
        return v;
    }

    std::uint64_t get_ueg() {
        int zeros = 0;
        while (get_bit() == 0) {
            if (++zeros > 63) throw DecodeError("exp-golomb code too long", byte_offset());
        }
        std::uint64_t v = 1;
        for (int i = 0; i < zeros; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
        return v - 1;
    }

    std::int64_t get_seg() {
        std::uint64_t u = get_ueg();
        return (u & 1) ? static_cast<std::int64_t>((u + 1) / 2)
                       : -static_cast<std::int64_t>(u / 2);
    }

    std::uint8_t get_byte() { return static_cast<std::uint8_t>(get_bits(8)); }
    std::uint16_t get_u16() {
        std::uint16_t lo = get_byte();
        return static_cast<std::uint16_t>(lo | (get_byte() << 8));
    }
    std::uint32_t get_u32() {
        std::uint32_t lo = get_u16();
        return lo | (static_cast<std::uint32_t>(get_u16()) << 16);
    }

    void align_byte() { pos_ = (pos_ + 7) & ~std::size_t{7}; }
    std::size_t byte_offset() const { return pos_ / 8; }
    bool exhausted() const { return pos_ >= bytes_.size() * 8; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;  // bit position
};

}  // namespace ipsc
