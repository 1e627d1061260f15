#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "frontforge/tw_solver.hpp"

using namespace frontforge;

// Dense Jacobian of the operator plus one LU factorization: the cost of a Newton step.
static void BM_JacobianLu(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DiscreteOperator op(Measure::fractional(0.75), Grid(40.0, n + 1));
  for (auto _ : state) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 2, n + 2);
    op.add_to(jac);
    jac.diagonal().array() -= 0.5;
    jac(n + 1, n / 2) = 1.0;
    jac(n / 2, n + 1) = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    benchmark::DoNotOptimize(lu.matrixLU().data());
  }
}
BENCHMARK(BM_JacobianLu)->Arg(400)->Arg(800)->Arg(1600)->Unit(benchmark::kMillisecond);

static void BM_NewtonUniform(benchmark::State& state) {
  const Grid g(40.0, static_cast<int>(state.range(0)) + 1);
  const Measure m = Measure::uniform(1.0);
  const Nonlinearity f = Nonlinearity::cubic(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(newton_solve(m, f, g).speed);
}
BENCHMARK(BM_NewtonUniform)->Arg(400)->Arg(800)->Arg(1600)->Unit(benchmark::kMillisecond);
