// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "attrforge/grid.hpp"

namespace attrforge {

/// Deterministic random stream identified by (seed, stream id).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; uniform and normal variates are derived here rather than through
/// <random> distributions so draws are identical across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t NextU64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double Uniform();
  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  /// Standard normal via the polar Box-Muller method.
  double Normal();
  /// A grid of the given shape filled with standard normal draws.
  ImageGrid NormalLike(const ImageGrid& shape);

  /// Child stream keyed by a label; independent of this stream's position.
  RngStream Derive(std::string_view label) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// 64-bit FNV-1a, used to turn labels into stream ids.
std::uint64_t Fnv1a64(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// SplitMix64 finalizer; mixes (seed, stream) pairs into well-spread words.
std::uint64_t Mix64(std::uint64_t x);

}  // namespace attrforge
