// SPDX-License-Identifier: Apache-2.0
//
// sitebeam: site-specific probing codebooks and generative beam refinement
// Copyright (C) 2026 The sitebeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SITEBEAM_PARALLEL_HPP
#define SITEBEAM_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sitebeam
{
    // Runs fn(i) for i in [0, n) on up to `threads` workers with a static
    // contiguous partition. Each index must write only its own output slot.
    // The first exception thrown by any worker is rethrown.
    template <typename Fn> void parallel_for(std::size_t n, std::size_t threads, Fn &&fn)
    {
        threads = std::max<std::size_t>(1, std::min(threads, n));
        if (threads == 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::exception_ptr error;
        std::mutex mutex;
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t)
        {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            pool.emplace_back([&, lo, hi] {
                try
                {
                    for (std::size_t i = lo; i < hi; ++i)
                        fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(mutex);
                    if (!error)
                        error = std::current_exception();
                }
            });
        }
        for (auto &th : pool)
            th.join();
        if (error)
            std::rethrow_exception(error);
    }
}

#endif
