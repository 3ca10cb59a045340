#include "fnls/krylov.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fnls/operators.hpp"
#include "oracles.hpp"

using namespace fnls;

namespace {

using Solver = SolveResult (*)(const LinearMap&, std::span<const Complex>, std::span<const Complex>, const LinearMap&,
                               const SolverConfig&, const IterationObserver&);

struct Named {
  const char* name;
  Solver fn;
  int matvecs_per_iter;
};

const Named kSolvers[] = {{"cocg", &cocg, 1}, {"cocr", &cocr, 1}, {"bicgstab", &bicgstab, 2}};

LinearMap dense_map(const oracle::Mat& a, int* counter = nullptr) {
  return [a, counter](std::span<const Complex> in, std::span<Complex> out) {
    const oracle::Vec y = a * Eigen::Map<const oracle::Vec>(in.data(), static_cast<Eigen::Index>(in.size()));
    std::copy(y.data(), y.data() + y.size(), out.begin());
    if (counter) ++*counter;
  };
}

double true_residual(const oracle::Mat& a, const std::vector<Complex>& x, const std::vector<Complex>& b) {
  const oracle::Vec bb = oracle::to_eigen(b);
  return (bb - a * oracle::to_eigen(x)).norm() / bb.norm();
}

// Complex symmetric I + i h (Lambda - D) of a random problem.
oracle::Mat random_step_matrix(std::mt19937_64& rng, std::size_t n, double alpha, double h) {
  return oracle::step_matrix(oracle::fractional_matrix(20.0, n, alpha), h, oracle::random_density(rng, n, 4.0));
}

SolverConfig tight() {
  SolverConfig c;
  c.rel_tol = 1e-12;
  return c;
}

}  // namespace

TEST(Krylov, AllMethodsMatchDenseLu) {
  std::mt19937_64 rng(1);
  for (const auto& s : kSolvers) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = random_step_matrix(rng, 31, 1.6, 0.05);
      const auto b = oracle::random_vector(rng, 31);
      const auto ref = oracle::lu_solve(a, oracle::to_eigen(b));
      const auto res = s.fn(dense_map(a), b, std::vector<Complex>(31), {}, tight(), {});
      ASSERT_TRUE(res.report.converged) << s.name;
      EXPECT_LT(oracle::rel_error(oracle::to_eigen(res.x), ref), 1e-9) << s.name;
    }
  }
}

TEST(Krylov, ReportedResidualIsTrueResidual) {
  std::mt19937_64 rng(2);
  for (const auto& s : kSolvers) {
    const auto a = random_step_matrix(rng, 31, 2.0, 0.1);
    const auto b = oracle::random_vector(rng, 31);
    SolverConfig cfg;
    cfg.rel_tol = 1e-10;
    const auto res = s.fn(dense_map(a), b, oracle::random_vector(rng, 31), {}, cfg, {});
    ASSERT_TRUE(res.report.converged);
    EXPECT_LE(res.report.final_residual(), cfg.rel_tol);
    EXPECT_NEAR(true_residual(a, res.x, b), res.report.final_residual(), 1e-12) << s.name;
  }
}

TEST(Krylov, MatvecBookkeeping) {
  std::mt19937_64 rng(3);
  for (const auto& s : kSolvers) {
    const auto a = random_step_matrix(rng, 15, 1.6, 0.05);
    const auto b = oracle::random_vector(rng, 15);
    int calls = 0;
    const auto res = s.fn(dense_map(a, &calls), b, std::vector<Complex>(15), {}, tight(), {});
    // One extra call forms the initial residual.
    EXPECT_EQ(calls, res.report.matvec_count + 1) << s.name;
    EXPECT_EQ(res.report.matvec_count, s.matvecs_per_iter * res.report.iterations) << s.name;
    EXPECT_EQ(res.report.residual_history.size(), static_cast<std::size_t>(res.report.iterations) + 1);
  }
}

TEST(Krylov, ObserverSeesEveryIterate) {
  std::mt19937_64 rng(4);
  for (const auto& s : kSolvers) {
    const auto a = random_step_matrix(rng, 15, 1.2, 0.05);
    const auto b = oracle::random_vector(rng, 15);
    std::vector<int> seen;
    std::vector<double> residuals;
    const auto res = s.fn(dense_map(a), b, std::vector<Complex>(15), {}, tight(),
                          [&](int it, std::span<const Complex> x) {
                            seen.push_back(it);
                            residuals.push_back(true_residual(a, {x.begin(), x.end()}, b));
                          });
    ASSERT_EQ(seen.size(), static_cast<std::size_t>(res.report.iterations));
    for (std::size_t i = 0; i < seen.size(); ++i) {
      EXPECT_EQ(seen[i], static_cast<int>(i) + 1);
      EXPECT_NEAR(residuals[i], res.report.residual_history[i + 1], 1e-10) << s.name << " iter " << i + 1;
    }
  }
}

TEST(Krylov, IdentityPreconditionerIsNoPreconditioner) {
  std::mt19937_64 rng(5);
  const LinearMap identity = [](std::span<const Complex> in, std::span<Complex> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  for (const auto& s : kSolvers) {
    const auto a = random_step_matrix(rng, 15, 1.6, 0.05);
    const auto b = oracle::random_vector(rng, 15);
    const auto plain = s.fn(dense_map(a), b, std::vector<Complex>(15), {}, tight(), {});
    const auto with_m = s.fn(dense_map(a), b, std::vector<Complex>(15), identity, tight(), {});
    EXPECT_EQ(plain.x, with_m.x) << s.name;
    EXPECT_EQ(plain.report.iterations, with_m.report.iterations);
  }
}

TEST(Krylov, ExactPreconditionerConvergesInOneStep) {
  // M = A for a diagonal complex symmetric A.
  const std::size_t n = 9;
  oracle::Mat a = oracle::Mat::Zero(n, n);
  std::vector<Complex> diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    diag[k] = Complex(1.0, 0.3 * static_cast<double>(k));
    a(k, k) = diag[k];
  }
  const LinearMap m = [diag](std::span<const Complex> in, std::span<Complex> out) {
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] / diag[k];
  };
  std::mt19937_64 rng(6);
  const auto b = oracle::random_vector(rng, n);
  for (const auto& s : kSolvers) {
    const auto res = s.fn(dense_map(a), b, std::vector<Complex>(n), m, tight(), {});
    EXPECT_TRUE(res.report.converged) << s.name;
    EXPECT_EQ(res.report.iterations, 1) << s.name;
  }
}

TEST(Krylov, DiagonalFourierPreconditionerHelps) {
  std::mt19937_64 rng(7);
  const std::size_t n = 101;
  const Grid g(20.0, n);
  const auto sym = build_symbol(g, 2.0);
  const TransformedOperator top(StepOperator(sym, 0.02, oracle::random_density(rng, n, 4.0)));
  const DiagonalPreconditioner m(sym, 0.02);
  const LinearMap a = [&](std::span<const Complex> in, std::span<Complex> out) { top.apply(in, out); };
  const LinearMap pm = [&](std::span<const Complex> in, std::span<Complex> out) { m.solve(in, out); };
  const auto b = oracle::random_vector(rng, n);
  const auto plain = bicgstab(a, b, std::vector<Complex>(n), {}, tight(), {});
  const auto pre = bicgstab(a, b, std::vector<Complex>(n), pm, tight(), {});
  ASSERT_TRUE(pre.report.converged);
  EXPECT_LT(pre.report.iterations, plain.report.iterations);
}

TEST(Krylov, ZeroRightHandSideGivesZero) {
  const oracle::Mat a = oracle::Mat::Identity(5, 5);
  for (const auto& s : kSolvers) {
    const auto res = s.fn(dense_map(a), std::vector<Complex>(5), std::vector<Complex>(5, Complex(1.0)), {}, tight(), {});
    EXPECT_TRUE(res.report.converged);
    EXPECT_EQ(res.report.iterations, 0);
    EXPECT_EQ(res.x, std::vector<Complex>(5));
  }
}

TEST(Krylov, ExactInitialGuessTakesNoIterations) {
  std::mt19937_64 rng(8);
  const oracle::Mat a = oracle::Mat::Identity(5, 5);
  const auto b = oracle::random_vector(rng, 5);
  for (const auto& s : kSolvers) {
    const auto res = s.fn(dense_map(a), b, b, {}, tight(), {});
    EXPECT_TRUE(res.report.converged);
    EXPECT_EQ(res.report.iterations, 0);
    EXPECT_EQ(res.report.matvec_count, 0);
  }
}

TEST(Krylov, CocgBreaksDownOnIsotropicResidual) {
  // With A = I and b = (1, i), the bilinear form <r, r> = 1 + i^2 = 0.
  const oracle::Mat a = oracle::Mat::Identity(2, 2);
  const std::vector<Complex> b{Complex(1.0), Complex(0.0, 1.0)};
  EXPECT_THROW(cocg(dense_map(a), b, std::vector<Complex>(2), {}, tight(), {}), BreakdownError);
  EXPECT_THROW(cocr(dense_map(a), b, std::vector<Complex>(2), {}, tight(), {}), BreakdownError);
  // The Hermitian product in Bi-CGSTAB does not vanish here.
  EXPECT_TRUE(bicgstab(dense_map(a), b, std::vector<Complex>(2), {}, tight(), {}).report.converged);
}

TEST(Krylov, IterationCapReportsNonConvergence) {
  std::mt19937_64 rng(9);
  const auto a = random_step_matrix(rng, 31, 2.0, 1.0);
  const auto b = oracle::random_vector(rng, 31);
  SolverConfig cfg = tight();
  cfg.max_iters = 2;
  for (const auto& s : kSolvers) {
    const auto res = s.fn(dense_map(a), b, std::vector<Complex>(31), {}, cfg, {});
    EXPECT_FALSE(res.report.converged) << s.name;
    EXPECT_EQ(res.report.iterations, 2) << s.name;
  }
}

TEST(Krylov, ConfigValidation) {
  SolverConfig c;
  c.rel_tol = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c.rel_tol = 1e-10;
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), DomainError);
  const oracle::Mat a = oracle::Mat::Identity(2, 2);
  EXPECT_THROW(cocg(dense_map(a), std::vector<Complex>(2, 1.0), std::vector<Complex>(3), {}, SolverConfig{}, {}),
               DimensionError);
}

TEST(Krylov, DispatchHonoursPreconditionedFlag) {
  std::mt19937_64 rng(10);
  const auto a = random_step_matrix(rng, 15, 1.6, 0.05);
  const auto b = oracle::random_vector(rng, 15);
  int m_calls = 0;
  const LinearMap m = [&](std::span<const Complex> in, std::span<Complex> out) {
    ++m_calls;
    std::copy(in.begin(), in.end(), out.begin());
  };
  SolverConfig cfg = tight();
  cfg.method = KrylovMethod::BiCgStab;
  krylov_solve(dense_map(a), b, std::vector<Complex>(15), m, cfg, {});
  EXPECT_EQ(m_calls, 0);
  cfg.preconditioned = true;
  krylov_solve(dense_map(a), b, std::vector<Complex>(15), m, cfg, {});
  EXPECT_GT(m_calls, 0);
}

TEST(Krylov, MethodNamesRoundTrip) {
  for (auto m : {KrylovMethod::Cocg, KrylovMethod::Cocr, KrylovMethod::BiCgStab}) {
    EXPECT_EQ(parse_krylov_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_krylov_method("gmres"), DomainError);
}
