// Benchmark comparing the serial reference trial runner against the
// OpenMP path on the audit workloads, plus a falsification sweep.

#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dynth/lifting.hpp"
#include "dynth/oracle.hpp"
#include "dynth/parser.hpp"

using namespace dynth;

namespace {

double msSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

template <typename Fn>
double timed(Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return msSince(t0);
}

}  // namespace

int main(int argc, char** argv) {
  int trials = argc > 1 ? std::atoi(argv[1]) : 200;
  std::uint64_t seed = 7;
#ifdef _OPENMP
  std::cout << "openmp: " << omp_get_max_threads() << " threads\n";
#else
  std::cout << "openmp: unavailable (serial build)\n";
#endif

  TheoryPtr sem = liftRegular(liftHavoc(semiringTheory(Carrier::Int, {-20, 20})));

  std::string coincidenceSerial, coincidenceParallel;
  double tSerial = timed([&] {
    coincidenceSerial = testCoincidence(sem, trials, seed, false).str();
  });
  double tParallel = timed([&] {
    coincidenceParallel = testCoincidence(sem, trials, seed, true).str();
  });
  std::cout << "coincidence suite  (" << trials << " trials):  serial "
            << tSerial << " ms,  openmp " << tParallel << " ms,  speedup "
            << (tParallel > 0 ? tSerial / tParallel : 0) << "x\n";
  if (coincidenceSerial != coincidenceParallel) {
    std::cout << "MISMATCH between serial and parallel reports\n";
    return 1;
  }

  double sSerial = timed([&] { validateAxiomSchemas(trials / 4, seed, false); });
  double sParallel = timed([&] { validateAxiomSchemas(trials / 4, seed, true); });
  std::cout << "axiom schema audit (" << trials / 4 << " trials):  serial "
            << sSerial << " ms,  openmp " << sParallel << " ms,  speedup "
            << (sParallel > 0 ? sSerial / sParallel : 0) << "x\n";

  Formula f = parseFormula("0 <= v -> [w := v + 1] 1 <= w", *sem);
  EvalBudget wide = EvalBudget::withWindow(-300, 300);
  double fTime = timed([&] { falsify(*sem, f, wide); });
  std::cout << "falsify sweep (601^2 states): " << fTime << " ms\n";
  return 0;
}
