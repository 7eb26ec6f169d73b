#include <doctest.h>

#include <cmath>
#include <numbers>

#include "krausopt/errors.hpp"
#include "krausopt/matfun.hpp"
#include "test_support.hpp"

using namespace krausopt;
using krausopt::testing::random_hermitian;
using krausopt::testing::random_pd;
using krausopt::testing::random_unitary;

TEST_CASE("hermitian_part") {
  SUBCASE("fixed point on Hermitian input") {
    Rng rng(11);
    const ComplexMatrix h = random_hermitian(4, rng);
    CHECK((hermitian_part(h) - h).norm() == doctest::Approx(0.0));
  }
  SUBCASE("nilpotent 2x2") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 1) = 1.0;
    ComplexMatrix expected(2, 2);
    expected << 0.0, 0.5, 0.5, 0.0;
    CHECK((hermitian_part(a) - expected).norm() == 0.0);
  }
  SUBCASE("result is exactly Hermitian for random input") {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
      const ComplexMatrix h = hermitian_part(rng.complex_gaussian_matrix(5, 5));
      CHECK((h - h.adjoint()).norm() < 1e-15);
    }
  }
  SUBCASE("non-square rejected") {
    CHECK_THROWS_AS(hermitian_part(ComplexMatrix::Zero(2, 3)), ValidationError);
  }
}

TEST_CASE("eig_hermitian") {
  SUBCASE("identity") {
    const HermitianEig eig = eig_hermitian(ComplexMatrix::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(eig.values[i] == doctest::Approx(1.0));
  }
  SUBCASE("diagonal input yields the standard basis") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 0.75;
    a(1, 1) = 0.25;
    const HermitianEig eig = eig_hermitian(a);
    CHECK(eig.values[0] == doctest::Approx(0.25));
    CHECK(eig.values[1] == doctest::Approx(0.75));
    CHECK(std::abs(eig.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(eig.vectors(0, 1)) == doctest::Approx(1.0));
  }
  SUBCASE("construct-then-decompose") {
    Rng rng(13);
    for (int t = 0; t < 10; ++t) {
      const ComplexMatrix u = random_unitary(3, rng);
      RealVector d(3);
      d << 1.0, 2.0, 3.0;
      const ComplexMatrix a = u * d.cast<Complex>().asDiagonal() * u.adjoint();
      const HermitianEig eig = eig_hermitian(a);
      CHECK((eig.values - d).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("invariants: unitary eigenvectors and reconstruction") {
    Rng rng(14);
    for (int t = 0; t < 50; ++t) {
      const Eigen::Index dim = 1 + static_cast<Eigen::Index>(rng.next_u64() % 7);
      const double scale = std::pow(10.0, 3.0 * rng.uniform() - 1.0);
      ComplexMatrix a = random_hermitian(dim, rng);
      a *= std::min(scale, 1e3 / a.norm());
      const HermitianEig eig = eig_hermitian(a);
      const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
      CHECK((eig.vectors.adjoint() * eig.vectors - id).norm() < 1e-10);
      CHECK((eig.reconstruct() - a).norm() <= 1e-9 * a.norm());
      for (Eigen::Index i = 1; i < dim; ++i) CHECK(eig.values[i - 1] <= eig.values[i]);
    }
  }
  SUBCASE("non-Hermitian rejected") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(eig_hermitian(a), ValidationError);
  }
}

TEST_CASE("matrix_log") {
  SUBCASE("log of identity is zero") {
    CHECK(matrix_log(ComplexMatrix::Identity(4, 4), 2.0).norm() < 1e-15);
  }
  SUBCASE("diagonal scalars") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 4.0;
    const ComplexMatrix l = matrix_log(a, 2.0);
    CHECK(l(0, 0).real() == doctest::Approx(1.0));
    CHECK(l(1, 1).real() == doctest::Approx(2.0));
    CHECK(std::abs(l(0, 1)) < 1e-15);
  }
  SUBCASE("scalar through a rotated eigenbasis") {
    Rng rng(21);
    const ComplexMatrix u = random_unitary(2, rng);
    const ComplexMatrix a = u * (0.5 * ComplexMatrix::Identity(2, 2)) * u.adjoint();
    CHECK((matrix_log(a, 2.0) + ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
  }
  SUBCASE("change of base is a scalar factor") {
    Rng rng(22);
    for (int t = 0; t < 10; ++t) {
      const ComplexMatrix a = random_pd(4, rng);
      const ComplexMatrix diff = matrix_log(a, 2.0) - matrix_log_nat(a) / std::numbers::ln2;
      CHECK(diff.cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("unitary covariance") {
    Rng rng(23);
    for (int t = 0; t < 10; ++t) {
      const ComplexMatrix a = random_pd(3, rng);
      const ComplexMatrix u = random_unitary(3, rng);
      const ComplexMatrix lhs = matrix_log(u * a * u.adjoint(), 2.0);
      const ComplexMatrix rhs = u * matrix_log(a, 2.0) * u.adjoint();
      CHECK((lhs - rhs).norm() < 1e-9);
    }
  }
  SUBCASE("zero eigenvalues are clamped at the floor") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    const ComplexMatrix l = matrix_log_nat(a, 1e-12);
    CHECK(l(1, 1).real() == doctest::Approx(std::log(1e-12)));
    CHECK(l.allFinite());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(matrix_log(ComplexMatrix::Identity(2, 2), 1.0), ValidationError);
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(matrix_log(a, 2.0), ValidationError);
    CHECK_THROWS_AS(matrix_log(-ComplexMatrix::Identity(2, 2), 2.0), ValidationError);
  }
}

TEST_CASE("inv_sqrt_psd") {
  SUBCASE("identity maps to identity") {
    CHECK((inv_sqrt_psd(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() < 1e-15);
  }
  SUBCASE("diagonal scalars") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 4.0;
    a(1, 1) = 9.0;
    const ComplexMatrix b = inv_sqrt_psd(a);
    CHECK(b(0, 0).real() == doctest::Approx(0.5));
    CHECK(b(1, 1).real() == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("B A B = I for random positive definite A") {
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
      const ComplexMatrix a = random_pd(4, rng);
      const ComplexMatrix b = inv_sqrt_psd(a);
      CHECK((b * a * b - ComplexMatrix::Identity(4, 4)).norm() < 1e-8);
      CHECK((b - b.adjoint()).norm() < 1e-12);
    }
  }
  SUBCASE("non-Hermitian rejected") {
    ComplexMatrix a = ComplexMatrix::Identity(2, 2);
    a(0, 1) = 3.0;
    CHECK_THROWS_AS(inv_sqrt_psd(a), ValidationError);
  }
}
