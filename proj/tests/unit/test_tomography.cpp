#include "obsent/tomography.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "obsent/entropy.hpp"
#include "obsent/errors.hpp"
#include "obsent/indirect.hpp"
#include "random_quantum.hpp"

namespace tomo = obsent::tomography;
using obsent::CoarseGraining;
using obsent::CoarseGrainingVector;
using obsent::DensityMatrix;
using obsent::linalg::ComplexMatrix;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

tomo::InferenceInput input_for(const CoarseGrainingVector& v, const DensityMatrix& rho) {
  tomo::InferenceInput in;
  in.povm = obsent::povm(v);
  for (const auto& e : in.povm) in.probabilities.push_back((e.matrix * rho.matrix()).trace().real());
  return in;
}

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

}  // namespace

TEST(InferState, DiagonalQubit) {
  tomo::InferenceInput in;
  in.povm = {{{0}, diag2(1, 0)}, {{1}, diag2(0, 1)}};
  in.probabilities = {0.7, 0.3};
  const auto result = tomo::infer_state(in);
  EXPECT_LT((result.rho.matrix() - diag2(0.7, 0.3)).norm(), 1e-15);
  ASSERT_EQ(result.eigenspaces.size(), 2u);
  EXPECT_DOUBLE_EQ(result.eigenspaces[0].eigenvalue, 0.7);
}

TEST(InferState, MaximallyMixedKeepsDisjointSupportsApart) {
  tomo::InferenceInput in;
  in.povm = {{{0}, diag2(1, 0)}, {{1}, diag2(0, 1)}};
  in.probabilities = {0.5, 0.5};
  const auto result = tomo::infer_state(in);
  EXPECT_EQ(result.eigenspaces.size(), 2u);
  EXPECT_LT((result.rho.matrix() - diag2(0.5, 0.5)).norm(), 1e-15);
}

TEST(InferState, OverlappingElementsMergeIntoOneEigenspace) {
  // Frame {|0>, |1>, |+>, |->} / 2 inside the degenerate eigenspace span{e0, e1} of a qutrit.
  obsent::testing::Rng rng(11);
  const ComplexMatrix u = obsent::testing::random_unitary(rng, 3);
  Eigen::VectorXcd e0 = u.col(0), e1 = u.col(1), e2 = u.col(2);
  const ComplexMatrix rho = 0.4 * (e0 * e0.adjoint() + e1 * e1.adjoint()) + 0.2 * e2 * e2.adjoint();
  tomo::InferenceInput in;
  const Eigen::VectorXcd frame[4] = {e0, e1, (e0 + e1) / std::sqrt(2.0), (e0 - e1) / std::sqrt(2.0)};
  for (std::size_t k = 0; k < 4; ++k) in.povm.push_back({{k}, 0.5 * frame[k] * frame[k].adjoint()});
  in.povm.push_back({{4}, e2 * e2.adjoint()});
  for (const auto& e : in.povm) in.probabilities.push_back((e.matrix * rho).trace().real());
  const auto result = tomo::infer_state(in);
  ASSERT_EQ(result.eigenspaces.size(), 2u);
  EXPECT_EQ(result.eigenspaces[0].index_set.size(), 4u);
  EXPECT_NEAR(result.eigenspaces[0].eigenvalue, 0.4, 1e-12);
  EXPECT_LT(tomo::trace_distance(result.rho.matrix(), rho), 1e-12);
}

TEST(InferState, RoundTripRandomSaturating) {
  obsent::testing::Rng rng(2024);
  for (int t = 0; t < 50; ++t) {
    const std::size_t dim = 2 + t % 4;
    const auto rho = obsent::testing::random_density(rng, dim);
    const auto eig = obsent::linalg::herm_eigen(rho.matrix());
    CoarseGrainingVector v(obsent::basis_cg(eig.eigenvectors));
    if (t % 2) v = v.appended(obsent::testing::random_cg(rng, dim, 2, 2));
    ASSERT_TRUE(tomo::check_saturation(v, rho, 1e-9));
    auto in = input_for(v, rho);
    in.known_von_neumann = obsent::von_neumann(rho).nats();
    const auto result = tomo::infer_state(in);
    EXPECT_LT(tomo::trace_distance(result.rho.matrix(), rho.matrix()), 1e-7) << t;
  }
}

TEST(InferState, OrderOfElementsDoesNotMatter) {
  obsent::testing::Rng rng(5);
  const auto rho = obsent::testing::random_density(rng, 4);
  const auto eig = obsent::linalg::herm_eigen(rho.matrix());
  const auto in = input_for(CoarseGrainingVector(obsent::basis_cg(eig.eigenvectors)), rho);
  auto shuffled = in;
  std::reverse(shuffled.povm.begin(), shuffled.povm.end());
  std::reverse(shuffled.probabilities.begin(), shuffled.probabilities.end());
  const auto a = tomo::infer_state(in);
  const auto b = tomo::infer_state(shuffled);
  EXPECT_LT((a.rho.matrix() - b.rho.matrix()).norm(), 1e-14);
}

TEST(InferState, WrongBasisWithKnownEntropyIsRejected) {
  const DensityMatrix rho(diag2(0.7, 0.3));
  auto in = input_for(CoarseGrainingVector(obsent::basis_cg(hadamard())), rho);
  in.known_von_neumann = obsent::von_neumann(rho).nats();
  EXPECT_THROW(tomo::infer_state(in), obsent::SaturationError);
}

TEST(InferState, NonProjectorGroupIsRejected) {
  tomo::InferenceInput in;
  in.povm = {{{0}, diag2(0.99, 0.01)}, {{1}, diag2(0.01, 0.99)}};
  in.probabilities = {0.5, 0.5};
  in.tol_overlap = 0.5;
  EXPECT_THROW(tomo::infer_state(in), obsent::SaturationError);
}

TEST(InferState, RandomNonSaturatingWithKnownEntropyIsRejected) {
  obsent::testing::Rng rng(99);
  for (int t = 0; t < 30; ++t) {
    const std::size_t dim = 2 + t % 4;
    const auto rho = obsent::testing::random_density(rng, dim);
    CoarseGrainingVector v(obsent::testing::random_cg(rng, dim, 3, 2));
    auto in = input_for(v, rho);
    in.known_von_neumann = obsent::von_neumann(rho).nats();
    EXPECT_THROW(tomo::infer_state(in), obsent::SaturationError) << t;
  }
}

TEST(InferState, InconsistentProbabilities) {
  tomo::InferenceInput in;
  const ComplexMatrix half = 0.5 * obsent::linalg::identity(2);
  in.povm = {{{0}, half}, {{1}, half}};
  in.probabilities = {0.9, 0.1};
  EXPECT_THROW(tomo::infer_state(in), obsent::InconsistencyError);
}

TEST(InferState, InvalidInput) {
  tomo::InferenceInput in;
  in.povm = {{{0}, diag2(1, 0)}, {{1}, diag2(0, 0.5)}};
  in.probabilities = {0.5, 0.5};
  EXPECT_THROW(tomo::infer_state(in), obsent::ValidationError);
  in.povm[1].matrix = diag2(0, 1);
  in.probabilities = {0.7, 0.7};
  EXPECT_THROW(tomo::infer_state(in), obsent::ValidationError);
  in.probabilities = {1.0};
  EXPECT_THROW(tomo::infer_state(in), obsent::ShapeError);
}

TEST(InferState, OptimalProbePipeline) {
  obsent::testing::Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    const auto rho = obsent::testing::random_density(rng, 3, 2);
    const auto protocol = obsent::indirect::optimal_probe_protocol(rho, 3);
    const CoarseGrainingVector v(obsent::indirect::induced_cg(protocol));
    EXPECT_NEAR(obsent::indirect::optimal_probe_entropy(rho, 3).nats(), obsent::von_neumann(rho).nats(), 1e-9);
    auto in = input_for(v, rho);
    in.known_von_neumann = obsent::von_neumann(rho).nats();
    const auto result = tomo::infer_state(in);
    EXPECT_LT(tomo::trace_distance(result.rho.matrix(), rho.matrix()), 1e-7) << t;
  }
}

TEST(CheckSaturation, Examples) {
  const DensityMatrix rho(diag2(0.7, 0.3));
  EXPECT_TRUE(tomo::check_saturation(CoarseGrainingVector(obsent::projective_cg(rho.matrix())), rho, 1e-9));
  EXPECT_FALSE(tomo::check_saturation(CoarseGrainingVector(obsent::basis_cg(hadamard())), rho, 1e-2));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2);
  psi(0) = 1;
  EXPECT_FALSE(tomo::check_saturation(CoarseGrainingVector(CoarseGraining::trivial(2)), DensityMatrix::pure(psi), 1e-9));
}

TEST(TraceDistance, KnownValues) {
  EXPECT_NEAR(tomo::trace_distance(diag2(1, 0), diag2(0, 1)), 1.0, 1e-15);
  EXPECT_NEAR(tomo::trace_distance(diag2(0.7, 0.3), diag2(0.5, 0.5)), 0.2, 1e-15);
  EXPECT_THROW(tomo::trace_distance(diag2(1, 0), obsent::linalg::identity(3)), obsent::ShapeError);
}
