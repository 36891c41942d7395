// SPDX-License-Identifier: Apache-2.0
//
// Compares the serial and OpenMP trial runners on the default scenario and
// verifies that both produce identical result bytes.
#include <chrono>
#include <cstdlib>
#include <iostream>

#include <omp.h>

#include "fdmimo/experiment.hpp"

int main(int argc, char** argv) {
  int trials = 32;
  if (argc > 1) trials = std::atoi(argv[1]);
  if (trials < 1) {
    std::cerr << "usage: fdmimo_bench [trials]\n";
    return 1;
  }

  fdmimo::ExperimentSpec spec;
  spec.trials = trials;
  spec.solvers = {fdmimo::Algorithm::kMm, fdmimo::Algorithm::kAiwf};

  using Clock = std::chrono::steady_clock;

  spec.exec = fdmimo::ExecutionMode::kSerial;
  auto t0 = Clock::now();
  fdmimo::ExperimentResult serial = fdmimo::run_experiment(spec);
  auto t1 = Clock::now();
  double serial_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();

  spec.exec = fdmimo::ExecutionMode::kParallel;
  t0 = Clock::now();
  fdmimo::ExperimentResult parallel = fdmimo::run_experiment(spec);
  t1 = Clock::now();
  double parallel_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();

  bool identical = fdmimo::results_csv(serial.records) ==
                   fdmimo::results_csv(parallel.records);

  std::cout << "trials:          " << trials << "\n";
  std::cout << "threads:         " << omp_get_max_threads() << "\n";
  std::cout << "serial:          " << serial_ms << " ms\n";
  std::cout << "parallel:        " << parallel_ms << " ms\n";
  std::cout << "speedup:         " << serial_ms / parallel_ms << "x\n";
  std::cout << "records match:   " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
