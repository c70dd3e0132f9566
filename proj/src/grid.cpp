/**
 * Copyright 2026, the coalmap authors
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
 */

#include "coalmap/grid.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace coalmap {

void for_each_row_block(Eigen::Index rows, int threads,
                        const std::function<void(Eigen::Index, Eigen::Index)>& fn) {
    if (rows <= 0) return;
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    const Eigen::Index n = std::min<Eigen::Index>(threads, rows);
    if (n <= 1) {
        fn(0, rows);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n));
    const Eigen::Index chunk = (rows + n - 1) / n;
    for (Eigen::Index begin = 0; begin < rows; begin += chunk) {
        const Eigen::Index end = std::min(begin + chunk, rows);
        pool.emplace_back(fn, begin, end);
    }
    for (auto& t : pool) t.join();
}

}  // namespace coalmap
