// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace snapens {

// 128-bit FNV-1a hash, rendered as 32 lowercase hex digits.
struct Digest {
  std::array<std::uint8_t, 16> bytes{};

  static Digest of(std::string_view data);
  static std::optional<Digest> from_hex(std::string_view hex);
  std::string hex() const;

  bool operator==(const Digest&) const = default;
};

}  // namespace snapens
