// Copyright 2026 The tsv-lab Authors
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

// Compares the serial and OpenMP sector sweeps on a protected run and
// checks that both produce bitwise-identical records.

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tsvlab/protection.hpp"

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

struct RunResult {
  tsvlab::ProtectedRunRecord record;
  double seconds;
};

RunResult timed_run(const tsvlab::ProtectionSetup& setup, int steps,
                    int threads) {
#ifdef _OPENMP
  omp_set_num_threads(threads);
#else
  (void)threads;
#endif
  double t0 = now_seconds();
  tsvlab::ProtectedRunRecord record = tsvlab::protected_run(setup, steps);
  return RunResult{record, now_seconds() - t0};
}

}  // namespace

int main(int argc, char** argv) {
  double n = 16.0;
  int steps = 200;
  if (argc > 1) n = std::atof(argv[1]);
  if (argc > 2) steps = std::atoi(argv[2]);

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  std::printf("protected run benchmark: n=%g steps=%d (max threads %d)\n", n,
              steps, max_threads);

  tsvlab::ProtectionSetup setup =
      tsvlab::standard_setup(n, 2.0, tsvlab::dir_y(), 1.0);

  RunResult serial = timed_run(setup, steps, 1);
  std::printf("  serial   : %8.3f s   q=%.17g\n", serial.seconds,
              serial.record.record.q_shift_mean);

  RunResult parallel = timed_run(setup, steps, max_threads);
  std::printf("  parallel : %8.3f s   q=%.17g   speedup %.2fx\n",
              parallel.seconds, parallel.record.record.q_shift_mean,
              serial.seconds / parallel.seconds);

  bool identical =
      std::memcmp(&serial.record.record.q_shift_mean,
                  &parallel.record.record.q_shift_mean, sizeof(double)) == 0 &&
      std::memcmp(&serial.record.record.p_shift_mean,
                  &parallel.record.record.p_shift_mean, sizeof(double)) == 0 &&
      std::memcmp(&serial.record.record.postselect_prob,
                  &parallel.record.record.postselect_prob,
                  sizeof(double)) == 0 &&
      std::memcmp(&serial.record.disturbance, &parallel.record.disturbance,
                  sizeof(double)) == 0;
  std::printf("  bitwise identical records: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
