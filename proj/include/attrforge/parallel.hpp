// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace attrforge {

/// Thread count: ATTRFORGE_THREADS when set and positive, else `configured`,
/// else the hardware concurrency. Never less than 1.
int ResolveThreads(int configured);

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Indices are handed
/// out dynamically. The first exception thrown by any call is rethrown after
/// all workers stop.
void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace attrforge
