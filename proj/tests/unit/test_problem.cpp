#include <gtest/gtest.h>

#include "ippmm/generators.hpp"
#include "ippmm/sdpa.hpp"
#include "support/reference.hpp"

using namespace ippmm;

namespace {

SdpProblem scalar_instance() {
  return SdpProblem({SymMatrix(Matrix{{2.0}})}, Vector::Constant(1, 4.0), SymMatrix(Matrix{{3.0}}));
}

const char* kScalarText = "1\n1\n1\n4.0\n0 1 1 1 3.0\n1 1 1 1 2.0\n";

template <class Ex = Error>
Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Ex& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::InvalidArgument;
}

void expect_same_problem(const SdpProblem& a, const SdpProblem& b, double rel) {
  ASSERT_EQ(a.n(), b.n());
  ASSERT_EQ(a.m(), b.m());
  EXPECT_LE(ref::rel_err(a.cost().dense(), b.cost().dense()), rel);
  EXPECT_LE(ref::rel_err(Matrix(a.rhs()), Matrix(b.rhs())), rel);
  for (int i = 0; i < a.m(); ++i)
    EXPECT_LE(ref::rel_err(a.constraint(i).dense(), b.constraint(i).dense()), rel);
}

}  // namespace

TEST(SdpProblem, ValidatesShapes) {
  EXPECT_EQ(code_of([] { SdpProblem({}, Vector(0), SymMatrix::identity(2)); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { SdpProblem({SymMatrix::identity(2)}, Vector::Zero(2), SymMatrix::identity(2)); }),
            Errc::DimensionMismatch);
  EXPECT_EQ(code_of([] { SdpProblem({SymMatrix::identity(3)}, Vector::Zero(1), SymMatrix::identity(2)); }),
            Errc::DimensionMismatch);
}

TEST(ApplyA, WorkedExamples) {
  const SdpProblem p({SymMatrix::identity(2)}, Vector::Zero(1), SymMatrix::zero(2));
  EXPECT_DOUBLE_EQ(apply_A(p, SymMatrix::diagonal(Vector{{1, 3}}))(0), 4.0);
  EXPECT_EQ(apply_A(p, SymMatrix::zero(2)), Vector::Zero(1));
  EXPECT_EQ(code_of([&] { (void)apply_A(p, SymMatrix::identity(3)); }), Errc::DimensionMismatch);
}

TEST(ApplyA, MatchesVectorizedProduct) {
  ref::Rng rng(17);
  const SdpProblem p = rng.problem(5, 4);
  const SymMatrix x = rng.sym(5);
  EXPECT_LE((apply_A(p, x) - ref::vectorized_A(p) * ref::vec_loop(x.dense())).norm(), 1e-12);
}

TEST(ApplyAstar, WorkedExamplesAndAdjoint) {
  ref::Rng rng(23);
  const SdpProblem p = rng.problem(4, 3);
  EXPECT_EQ(apply_Astar(p, Vector::Unit(3, 1)), p.constraint(1));
  EXPECT_EQ(apply_Astar(p, Vector::Zero(3)), SymMatrix::zero(4));
  EXPECT_EQ(code_of([&] { (void)apply_Astar(p, Vector::Zero(2)); }), Errc::DimensionMismatch);
  for (int t = 0; t < 100; ++t) {
    const Vector y = rng.vector(3);
    const SymMatrix x = rng.sym(4);
    const double lhs = y.dot(apply_A(p, x)), rhs = frob_inner(apply_Astar(p, y), x);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(KktResiduals, WorkedExamples) {
  const SdpProblem p = scalar_instance();
  const KktResiduals r = kkt_residuals(p, SymMatrix(Matrix{{2.0}}), Vector::Constant(1, 1.5), SymMatrix::zero(1));
  EXPECT_EQ(r.primal_res, 0.0);
  EXPECT_EQ(r.dual_res, 0.0);
  EXPECT_EQ(r.gap, 0.0);

  ref::Rng rng(1);
  const SdpProblem q({rng.sym(3), rng.sym(3)}, rng.vector(2), SymMatrix::identity(3));
  EXPECT_EQ(kkt_residuals(q, SymMatrix::identity(3), Vector::Zero(2), SymMatrix::identity(3)).dual_res, 0.0);
}

TEST(KktResiduals, MatchesVectorizedRecomputation) {
  ref::Rng rng(31);
  const SdpProblem p = rng.problem(4, 3);
  const SymMatrix x = rng.spd(4), z = rng.spd(4);
  const Vector y = rng.vector(3);
  const KktResiduals r = kkt_residuals(p, x, y, z);
  const Matrix a = ref::vectorized_A(p);
  EXPECT_NEAR(r.primal_res, (a * ref::vec_loop(x.dense()) - p.rhs()).norm(), 1e-12);
  EXPECT_NEAR(r.dual_res,
              (ref::vec_loop(p.cost().dense()) - a.transpose() * y - ref::vec_loop(z.dense())).norm(), 1e-12);
  EXPECT_NEAR(r.gap, (x.dense() * z.dense()).trace() / 4.0, 1e-12);
}

TEST(ValidateRank, DetectsDependentRows) {
  const SdpProblem dup({SymMatrix::identity(2), SymMatrix::identity(2)}, Vector::Zero(2), SymMatrix::zero(2));
  EXPECT_EQ(validate_rank(dup).rank, 1);
  EXPECT_FALSE(validate_rank(dup).full_row_rank);
  ref::Rng rng(3);
  EXPECT_TRUE(validate_rank(rng.problem(4, 6)).full_row_rank);
  const SdpProblem zero({SymMatrix::zero(2)}, Vector::Zero(1), SymMatrix::zero(2));
  EXPECT_EQ(validate_rank(zero).rank, 0);
}

TEST(ParseSdpa, ScalarHandTrace) {
  const SdpProblem p = parse_sdpa(std::string_view(kScalarText));
  expect_same_problem(p, scalar_instance(), 0.0);
}

TEST(ParseSdpa, CommentsPunctuationAndBlankLines) {
  const SdpProblem p = parse_sdpa(std::string_view(
      "\"a comment\n* another\n1 = mDIM\n1 = nBLOCK\n{1}\n{4.0}\n\n0 1 1 1 3.0\n1 1 1 1 2.0\n"));
  expect_same_problem(p, scalar_instance(), 0.0);
}

TEST(ParseSdpa, MirrorsUpperTriangle) {
  const SdpProblem p = parse_sdpa(std::string_view("1\n1\n2\n1\n0 1 1 2 5\n1 1 1 1 1\n1 1 2 2 1\n"));
  EXPECT_EQ(p.cost()(0, 1), 5.0);
  EXPECT_EQ(p.cost()(1, 0), 5.0);
}

TEST(ParseSdpa, FlattensBlocks) {
  const SdpProblem p =
      parse_sdpa(std::string_view("1\n2\n2 -2\n1\n0 1 1 2 1\n0 2 2 2 7\n1 1 1 1 1\n1 2 1 1 1\n"));
  ASSERT_EQ(p.n(), 4);
  EXPECT_EQ(p.cost()(0, 1), 1.0);
  EXPECT_EQ(p.cost()(3, 3), 7.0);
  EXPECT_EQ(p.constraint(0)(2, 2), 1.0);
  EXPECT_EQ(p.constraint(0)(0, 0), 1.0);
}

TEST(ParseSdpa, Errors) {
  try {
    parse_sdpa(std::string_view(""));
    ADD_FAILURE();
  } catch (const SyntaxError&) {
  }
  try {
    parse_sdpa(std::string_view("1\n1\n2\n1\n0 1 2 1 5\n"));
    ADD_FAILURE();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.reason(), "lower-triangle entry");
    EXPECT_EQ(e.line(), 5);
  }
  EXPECT_EQ(code_of([] { parse_sdpa(std::string_view("1\n1\n2\n1\n0 1 1 1 5\n0 1 1 1 6\n")); }),
            Errc::DuplicateEntry);
  EXPECT_EQ(code_of([] { parse_sdpa(std::string_view("1\n1\n2\n1\n2 1 1 1 5\n")); }), Errc::IndexOutOfRange);
  EXPECT_EQ(code_of([] { parse_sdpa(std::string_view("1\n1\n2\n1\n0 1 1 3 5\n")); }), Errc::IndexOutOfRange);
  EXPECT_EQ(code_of([] { parse_sdpa(std::string_view("1\n1\n2\n1\n0 1 1 x 5\n")); }), Errc::SyntaxError);
  EXPECT_EQ(code_of([] { (void)read_sdpa_file("/nonexistent/file.dat-s"); }), Errc::IoError);
}

TEST(WriteSdpa, RoundTrips) {
  expect_same_problem(parse_sdpa(write_sdpa(scalar_instance())), scalar_instance(), 0.0);
  ref::Rng rng(77);
  const SdpProblem p = rng.problem(5, 3);
  expect_same_problem(parse_sdpa(write_sdpa(p)), p, 1e-15);
}

TEST(WriteSdpa, ZeroCostOmitsItsLines) {
  const SdpProblem p({SymMatrix::identity(2)}, Vector::Constant(1, 1.0), SymMatrix::zero(2));
  const std::string text = write_sdpa(p);
  EXPECT_EQ(text.find("\n0 "), std::string::npos);
  expect_same_problem(parse_sdpa(text), p, 0.0);
}

TEST(GenFeasible, KnownSolutionIsKkt) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);
    const int m = std::min(1 + static_cast<int>(seed % 9), n * (n + 1) / 2);
    const FeasibleInstance f = gen_feasible(n, m, 1 + static_cast<int>(seed % (n - 1)), seed);
    const KktResiduals r = kkt_residuals(f.problem, f.X, f.y, f.Z);
    EXPECT_LE(r.primal_res, 1e-12);
    EXPECT_LE(r.dual_res, 1e-12);
    EXPECT_LE(frob_inner(f.X, f.Z), 1e-12 * n);
    EXPECT_GE(ref::min_eig(f.X), -1e-12);
    EXPECT_GE(ref::min_eig(f.Z), -1e-12);
  }
}

TEST(GenFeasible, RankStructure) {
  const FeasibleInstance f = gen_feasible(4, 3, 2, 7);
  EXPECT_FALSE(is_pd(f.X));
  const Vector ev = sym_eig(f.X).eigenvalues;
  EXPECT_LE(std::abs(ev(0)), 1e-12);
  EXPECT_LE(std::abs(ev(1)), 1e-12);
  EXPECT_GT(ev(2), 0.4);
}

TEST(GenFeasible, Preconditions) {
  EXPECT_EQ(code_of([] { (void)gen_feasible(4, 3, 4, 1); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { (void)gen_feasible(4, 3, 0, 1); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { (void)gen_feasible(3, 7, 1, 1); }), Errc::InvalidArgument);
}

TEST(GenFeasible, DeterministicPerSeed) {
  const FeasibleInstance a = gen_feasible(5, 4, 2, 42), b = gen_feasible(5, 4, 2, 42);
  EXPECT_EQ(write_sdpa(a.problem), write_sdpa(b.problem));
}

TEST(GenInfeasibleTrace, WrittenOut) {
  const SdpProblem p = gen_infeasible_trace(1);
  EXPECT_EQ(p.constraint(0)(0, 0), 1.0);
  EXPECT_EQ(p.rhs()(0), -1.0);
  EXPECT_EQ(p.cost()(0, 0), 1.0);
  const SdpProblem q = gen_infeasible_trace(3);
  EXPECT_EQ(q.constraint(0), SymMatrix::identity(3));
  EXPECT_EQ(code_of([] { (void)gen_infeasible_trace(0); }), Errc::InvalidArgument);
}
