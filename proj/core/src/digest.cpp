// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "snapens/digest.hpp"

namespace snapens {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr u128 make_u128(std::uint64_t hi, std::uint64_t lo) {
  return (static_cast<u128>(hi) << 64) | lo;
}

constexpr u128 kOffsetBasis = make_u128(0x6c62272e07bb0142ULL, 0x62b821756295c58dULL);
constexpr u128 kPrime = make_u128(0x0000000001000000ULL, 0x000000000000013bULL);

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Digest Digest::of(std::string_view data) {
  u128 h = kOffsetBasis;
  for (unsigned char c : data) {
    h ^= c;
    h *= kPrime;
  }
  Digest d;
  for (int i = 15; i >= 0; --i) {
    d.bytes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(h & 0xff);
    h >>= 8;
  }
  return d;
}

std::optional<Digest> Digest::from_hex(std::string_view hex) {
  if (hex.size() != 32) return std::nullopt;
  Digest d;
  for (std::size_t i = 0; i < 16; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    d.bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return d;
}

std::string Digest::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (std::uint8_t b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xf];
  }
  return out;
}

}  // namespace snapens
