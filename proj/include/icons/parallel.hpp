/*
 * Copyright 2026 The ICONS Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <functional>

namespace icons {

/// Number of workers used by row-parallel kernels. Initialized from the
/// ICONS_THREADS environment variable (falling back to the hardware
/// concurrency). Results never depend on this value; it only caps speed.
std::size_t worker_count();

/// Overrides the worker count for this process. 0 restores the default.
void set_worker_count(std::size_t n);

/// Runs fn(begin, end) over a static contiguous partition of [0, n).
/// Each range is disjoint, so writing to per-row outputs is race-free and
/// the result is identical for every worker count.
void parallel_for_rows(std::size_t n,
                       const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace icons
