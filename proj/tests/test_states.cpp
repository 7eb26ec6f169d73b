#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "krausopt/errors.hpp"
#include "krausopt/states.hpp"
#include "test_support.hpp"

using namespace krausopt;
using krausopt::testing::basis;
using krausopt::testing::random_density;
using krausopt::testing::random_pure;
using krausopt::testing::random_unitary;

TEST_CASE("pure_to_density") {
  SUBCASE("basis state") {
    const DensityMatrix rho = pure_to_density(PureState(basis(2, 0)));
    CHECK(rho.matrix()(0, 0).real() == 1.0);
    CHECK(std::abs(rho.matrix()(1, 1)) == 0.0);
  }
  SUBCASE("plus state") {
    ComplexVector x(2);
    x << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    const DensityMatrix rho = pure_to_density(PureState(x));
    CHECK((rho.matrix() - 0.5 * ComplexMatrix::Ones(2, 2)).norm() < 1e-15);
  }
  SUBCASE("random states are rank-one projectors") {
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
      const DensityMatrix rho = pure_to_density(random_pure(4, rng));
      const HermitianEig eig = eig_hermitian(rho.matrix());
      CHECK(eig.values[3] == doctest::Approx(1.0).epsilon(1e-10));
      for (int i = 0; i < 3; ++i) CHECK(std::abs(eig.values[i]) < 1e-10);
      CHECK(validate_density(rho.matrix(), 1e-10).ok());
    }
  }
  SUBCASE("unnormalized vector rejected") {
    ComplexVector x(2);
    x << 1.0, 1.0;
    CHECK_THROWS_AS(PureState{x}, ValidationError);
  }
}

TEST_CASE("mix") {
  SUBCASE("single member") {
    Rng rng(42);
    const DensityMatrix x = random_density(3, rng);
    const Ensemble e({1.0}, {x});
    CHECK((mix(e).matrix() - x.matrix()).norm() < 1e-15);
  }
  SUBCASE("diagonal mixture") {
    const Ensemble e = Ensemble::from_pure({0.5, 0.5}, {PureState(basis(2, 0)), PureState(basis(2, 1))});
    CHECK((mix(e).matrix() - 0.5 * ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
  }
  SUBCASE("trace is one for random ensembles") {
    Rng rng(43);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> p{rng.uniform(), rng.uniform(), rng.uniform()};
      const double s = p[0] + p[1] + p[2];
      for (auto& v : p) v /= s;
      const Ensemble e = Ensemble::from_pure(p, {random_pure(3, rng), random_pure(3, rng), random_pure(3, rng)});
      CHECK(std::abs(mix(e).matrix().trace() - Complex(1.0)) < 1e-12);
    }
  }
  SUBCASE("zero-probability members are allowed") {
    const Ensemble e = Ensemble::from_pure({1.0, 0.0}, {PureState(basis(2, 0)), PureState(basis(2, 1))});
    CHECK(mix(e).matrix()(1, 1).real() == 0.0);
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(Ensemble::from_pure({0.5, 0.5}, {PureState(basis(2, 0)), PureState(basis(3, 1))}),
                    ValidationError);
  }
  SUBCASE("probabilities must sum to one") {
    CHECK_THROWS_AS(Ensemble::from_pure({0.5, 0.4}, {PureState(basis(2, 0)), PureState(basis(2, 1))}),
                    ValidationError);
  }
}

TEST_CASE("von_neumann_entropy") {
  SUBCASE("pure state") {
    Rng rng(44);
    CHECK(std::abs(von_neumann_entropy(pure_to_density(random_pure(3, rng)))) < 1e-9);
  }
  SUBCASE("maximally mixed qubit") {
    CHECK(von_neumann_entropy(DensityMatrix(0.5 * ComplexMatrix::Identity(2, 2))) == doctest::Approx(1.0));
  }
  SUBCASE("diag(0.5, 0.25, 0.25)") {
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 0.5;
    d(1, 1) = 0.25;
    d(2, 2) = 0.25;
    // Shannon entropy of (1/2, 1/4, 1/4) is 1/2 + 2 * (1/4 * 2).
    CHECK(von_neumann_entropy(DensityMatrix(d)) == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("bounds, unitary invariance and concavity") {
    Rng rng(45);
    for (int t = 0; t < 50; ++t) {
      const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.next_u64() % 4);
      const DensityMatrix a = random_density(dim, rng);
      const DensityMatrix b = pure_to_density(random_pure(dim, rng));
      const double sa = von_neumann_entropy(a);
      CHECK(sa >= -1e-9);
      CHECK(sa <= std::log2(static_cast<double>(dim)) + 1e-9);

      const ComplexMatrix u = random_unitary(dim, rng);
      CHECK(std::abs(von_neumann_entropy(DensityMatrix(u * a.matrix() * u.adjoint(), kInternalTol)) - sa) < 1e-9);

      const double w = rng.uniform();
      const Ensemble e({w, 1.0 - w}, {a, b});
      CHECK(von_neumann_entropy(mix(e)) >= w * sa + (1.0 - w) * von_neumann_entropy(b) - 1e-9);
    }
  }
}

TEST_CASE("shannon_entropy") {
  CHECK(shannon_entropy(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(shannon_entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(shannon_entropy(std::vector<double>{0.7, 0.2, 0.1}) == doctest::Approx(1.1567796494470395).epsilon(1e-13));
  CHECK_THROWS_AS(shannon_entropy(std::vector<double>{1.1, -0.1}), ValidationError);
}

TEST_CASE("validate_density") {
  SUBCASE("maximally mixed passes") {
    CHECK(validate_density(0.5 * ComplexMatrix::Identity(2, 2)).ok());
  }
  SUBCASE("trace failure") {
    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 0) = 1.0;
    x(1, 1) = 0.1;
    const DensityReport r = validate_density(x);
    CHECK(r.hermitian);
    CHECK(r.psd);
    CHECK_FALSE(r.unit_trace);
    CHECK(r.trace_residual == doctest::Approx(0.1));
  }
  SUBCASE("PSD failure") {
    ComplexMatrix x(2, 2);
    x << 0.5, 0.6, 0.6, 0.5;
    const DensityReport r = validate_density(x);
    CHECK(r.hermitian);
    CHECK(r.unit_trace);
    CHECK_FALSE(r.psd);
    // Eigenvalues of [[a, b], [b, a]] are a +- b.
    CHECK(r.min_eigenvalue == doctest::Approx(-0.1).epsilon(1e-12));
  }
  SUBCASE("non-Hermitian flagged") {
    ComplexMatrix x = 0.5 * ComplexMatrix::Identity(2, 2);
    x(0, 1) = 0.2;
    CHECK_FALSE(validate_density(x).hermitian);
  }
  SUBCASE("non-square reports failure") {
    CHECK_FALSE(validate_density(ComplexMatrix::Zero(2, 3)).ok());
  }
}
