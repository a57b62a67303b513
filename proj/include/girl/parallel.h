// Copyright 2026 The psro-girl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GIRL_PARALLEL_H_
#define GIRL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace girl {

// Worker count used by parallel_for when jobs <= 0. Defaults to the number
// of hardware threads; the CLI sets it from --jobs.
int default_jobs();
void set_default_jobs(int jobs);

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index must write
// only to its own output slot; callers reduce in index order afterwards, so
// results do not depend on the worker count. The first exception thrown by
// any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int jobs = 0);

}  // namespace girl

#endif  // GIRL_PARALLEL_H_
