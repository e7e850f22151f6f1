// Wall-clock comparison of the OpenMP assemblies against their serial references.
// --quick runs a small configuration so the binary can double as a smoke test.

#include <chrono>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <random>

#include "flatgp/doftools.hpp"
#include "flatgp/kernels.hpp"
#include "flatgp/numerics.hpp"
#include "flatgp/parallel.hpp"

using namespace flatgp;

namespace {

template <class Fn>
double best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

Design random_design(int n, int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u;
  PointMatrix P(n, d);
  for (Eigen::Index i = 0; i < P.size(); ++i) P.data()[i] = u(rng);
  return Design(std::move(P));
}

void report(const char* name, double serial_s, double parallel_s, double max_diff) {
  std::cout << std::left << std::setw(28) << name << std::right << std::setw(12) << std::scientific
            << std::setprecision(3) << serial_s << std::setw(12) << parallel_s << std::setw(10)
            << std::fixed << std::setprecision(2) << serial_s / parallel_s << std::setw(12)
            << std::scientific << std::setprecision(1) << max_diff << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int n = quick ? 200 : 2000;
  const int reps = quick ? 1 : 5;
  std::cout << "threads " << max_threads() << ", n = " << n << "\n";
  std::cout << std::left << std::setw(28) << "task" << std::right << std::setw(12) << "serial[s]"
            << std::setw(12) << "omp[s]" << std::setw(10) << "speedup" << std::setw(12) << "max|diff|"
            << "\n";

  Design X = random_design(n, 3, 1);
  for (const Kernel& k : {Kernel::gaussian(2.0), Kernel::matern(2.5, 2.0)}) {
    Eigen::MatrixXd a, b;
    double ts = best_of(reps, [&] { a = serial::kernel_matrix(k, X); });
    double tp = best_of(reps, [&] { b = kernel_matrix(k, X); });
    report(k.family() == KernelFamily::Gaussian ? "kernel_matrix gaussian" : "kernel_matrix matern",
           ts, tp, (a - b).cwiseAbs().maxCoeff());
  }

  Design small = random_design(quick ? 20 : 60, 1, 2);
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(small.size(), -1.0, 1.0);
  auto eps = logspace(0.05, 2.0, quick ? 4 : 32);
  auto gam = logspace(1e-2, 1e6, quick ? 4 : 32);
  std::vector<GridCell> ga, gb;
  Kernel g = Kernel::gaussian();
  double ts = best_of(reps, [&] { ga = serial::evaluate_grid(g, small, y, 0.01, eps, gam); });
  double tp = best_of(reps, [&] { gb = evaluate_grid(g, small, y, 0.01, eps, gam); });
  double diff = 0.0;
  for (size_t i = 0; i < ga.size(); ++i) diff = std::max(diff, std::abs(ga[i].dof - gb[i].dof));
  report("criteria grid", ts, tp, diff);

  for (size_t i = 0; i < ga.size(); ++i)
    if (ga[i].ok != gb[i].ok || ga[i].dof != gb[i].dof) {
      std::cerr << "serial and parallel grids disagree at cell " << i << "\n";
      return 1;
    }
  return 0;
}
