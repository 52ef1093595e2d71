#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include "osl/errors.hpp"

namespace osl::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
concept Wire = std::is_arithmetic_v<T> && (sizeof(T) == 1 || sizeof(T) == 2 || sizeof(T) == 4 || sizeof(T) == 8);

template <Wire T>
std::array<char, sizeof(T)> to_le_bytes(T value) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return bytes;
}

template <Wire T>
T from_le_bytes(std::array<char, sizeof(T)> bytes) {
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

/// Little-endian writer over an ostream.
class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    template <Wire T>
    void put(T value) {
        const auto bytes = to_le_bytes(value);
        os_.write(bytes.data(), bytes.size());
    }

    void put_bytes(std::string_view bytes) { os_.write(bytes.data(), static_cast<std::streamsize>(bytes.size())); }

    template <Wire T>
    void put_all(std::span<const T> values) {
        for (T v : values) put(v);
    }

    bool ok() const { return static_cast<bool>(os_); }

private:
    std::ostream& os_;
};

/// Little-endian reader; any short read raises FormatError.
class Reader {
public:
    Reader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

    template <Wire T>
    T get() {
        std::array<char, sizeof(T)> bytes{};
        read(bytes.data(), bytes.size());
        return from_le_bytes<T>(bytes);
    }

    std::string get_bytes(std::size_t n) {
        std::string s(n, '\0');
        read(s.data(), n);
        return s;
    }

    template <Wire T>
    void get_all(std::span<T> out) {
        for (T& v : out) v = get<T>();
    }

    /// True when the stream has no bytes left.
    bool at_end() { return is_.peek() == std::char_traits<char>::eof(); }

private:
    void read(char* dst, std::size_t n) {
        is_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n) throw FormatError(what_ + ": truncated file");
    }

    std::istream& is_;
    std::string what_;
};

}  // namespace osl::io
