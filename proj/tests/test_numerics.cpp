// SPDX-License-Identifier: Apache-2.0
//
// irsnoma - IRS phase and NOMA power optimization from channel statistics
// Copyright (C) 2026 The irsnoma authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "irsnoma/numerics.hpp"
#include "irsnoma/random.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace irsnoma;
using irsnoma::testing::random_hermitian;
using irsnoma::testing::random_matrix;
using irsnoma::testing::random_psd;

TEST_CASE("hermitian_eig of the identity has unit eigenvalues", "[numerics]")
{
    const auto eig = hermitian_eig(HermitianMatrix::Identity(3, 3));
    CHECK((eig.values.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("hermitian_eig of diag(2, 0) returns the standard basis", "[numerics]")
{
    HermitianMatrix A = HermitianMatrix::Zero(2, 2);
    A(0, 0) = 2.0;
    const auto eig = hermitian_eig(A);
    CHECK(eig.values(0) == Catch::Approx(2.0));
    CHECK(std::abs(eig.values(1)) < 1e-15);
    CHECK(std::abs(eig.vectors(0, 0)) == Catch::Approx(1.0));
    CHECK(std::abs(eig.vectors(1, 1)) == Catch::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstructs random Hermitian matrices", "[numerics]")
{
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        const Eigen::Index n = 1 + trial % 9;
        const HermitianMatrix A = random_hermitian(n, rng);
        const auto eig = hermitian_eig(A);
        const ComplexMatrix V = eig.vectors;
        const ComplexMatrix recon = V * eig.values.cast<cdouble>().asDiagonal() * V.adjoint();
        CHECK(relative_frobenius_error(recon, A) <= 1e-9);
        CHECK((V.adjoint() * V - ComplexMatrix::Identity(n, n)).norm() <= 1e-9);
        for (Eigen::Index i = 0; i < n; ++i)
            CHECK((A * V.col(i) - eig.values(i) * V.col(i)).norm() <= 1e-9 * A.norm());
        for (Eigen::Index i = 1; i < n; ++i)
            CHECK(eig.values(i - 1) >= eig.values(i));
    }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input", "[numerics]")
{
    ComplexMatrix A = ComplexMatrix::Zero(2, 2);
    A(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eig(A), ContractViolation);
}

TEST_CASE("null_space_basis of the first basis vector in dimension 3", "[numerics]")
{
    ComplexMatrix A = ComplexMatrix::Zero(3, 1);
    A(0, 0) = 1.0;
    const ComplexMatrix B = null_space_basis(A);
    REQUIRE(B.cols() == 2);
    CHECK((A.adjoint() * B).norm() <= 1e-12);
    CHECK((B.adjoint() * B - ComplexMatrix::Identity(2, 2)).norm() <= 1e-9);
}

TEST_CASE("null_space_basis of a zero matrix spans everything", "[numerics]")
{
    const ComplexMatrix B = null_space_basis(ComplexMatrix::Zero(4, 2));
    REQUIRE(B.cols() == 4);
    CHECK((B * B.adjoint() - ComplexMatrix::Identity(4, 4)).norm() <= 1e-9);
}

TEST_CASE("null_space_basis of random tall matrices", "[numerics]")
{
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial)
    {
        const ComplexMatrix A = random_matrix(6, 2, rng);
        const ComplexMatrix B = null_space_basis(A);
        REQUIRE(B.cols() == 4);
        CHECK((A.adjoint() * B).norm() <= 1e-9 * A.norm());
        CHECK((B.adjoint() * B - ComplexMatrix::Identity(4, 4)).norm() <= 1e-9);
    }
}

TEST_CASE("null_space_basis of a rank-deficient matrix uses the numeric rank", "[numerics]")
{
    Rng rng(13);
    const ComplexMatrix X = random_matrix(7, 2, rng);
    const ComplexMatrix A = X * random_matrix(2, 5, rng); // rank 2
    const ComplexMatrix B = null_space_basis(A);
    CHECK(B.cols() == 5);
    CHECK((A.adjoint() * B).norm() <= 1e-9 * A.norm());
}

TEST_CASE("null_space_basis of a full-row-rank matrix is empty", "[numerics]")
{
    Rng rng(14);
    CHECK(null_space_basis(random_matrix(3, 5, rng)).cols() == 0);
}

TEST_CASE("linear_solve trivial systems", "[numerics]")
{
    ComplexVector b(3);
    b << cdouble(1, 2), cdouble(-1, 0), cdouble(0, 3);
    CHECK((linear_solve(ComplexMatrix::Identity(3, 3), b) - b).norm() < 1e-15);

    ComplexMatrix D = ComplexMatrix::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 4.0;
    ComplexVector rhs(2);
    rhs << 2.0, 4.0;
    const ComplexVector x = linear_solve(D, rhs);
    CHECK(std::abs(x(0) - 1.0) < 1e-15);
    CHECK(std::abs(x(1) - 1.0) < 1e-15);
}

TEST_CASE("linear_solve random well-conditioned systems", "[numerics]")
{
    Rng rng(15);
    for (int trial = 0; trial < 10; ++trial)
    {
        const ComplexMatrix A = random_matrix(8, 8, rng) + 8.0 * ComplexMatrix::Identity(8, 8);
        const ComplexVector b = irsnoma::testing::random_vector(8, rng);
        const ComplexVector x = linear_solve(A, b);
        CHECK((A * x - b).norm() <= 1e-9 * b.norm());
    }
}

TEST_CASE("linear_solve rejects singular systems", "[numerics]")
{
    ComplexMatrix A = ComplexMatrix::Ones(3, 3);
    CHECK_THROWS_AS(linear_solve(A, ComplexVector::Ones(3)), NumericError);
    RealMatrix R = RealMatrix::Zero(2, 2);
    R(0, 0) = 1.0;
    R(1, 1) = 1e-14;
    CHECK_THROWS_AS(linear_solve(R, RealVector::Ones(2)), NumericError);
}

TEST_CASE("hadamard identities", "[numerics]")
{
    Rng rng(16);
    const HermitianMatrix A = random_hermitian(4, rng);
    const HermitianMatrix D = hadamard(A, HermitianMatrix::Identity(4, 4));
    CHECK((D - HermitianMatrix(A.diagonal().asDiagonal())).norm() < 1e-15);
    CHECK(hadamard(A, HermitianMatrix::Zero(4, 4)).norm() == 0.0);
    CHECK_THROWS_AS(hadamard(A, HermitianMatrix::Identity(3, 3)), ContractViolation);
}

TEST_CASE("hadamard of PSD matrices stays PSD", "[numerics][property]")
{
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial)
    {
        const Eigen::Index n = 1 + trial % 6;
        const HermitianMatrix A = random_psd(n, 1 + trial % static_cast<int>(n), rng);
        const HermitianMatrix B = random_psd(n, n, rng);
        const HermitianMatrix C = hadamard(A, B);
        CHECK(min_eigenvalue(0.5 * (C + C.adjoint())) >= -1e-10 * C.trace().real());
    }
}

TEST_CASE("numeric_rank uses the relative cutoff", "[numerics]")
{
    Rng rng(18);
    const ComplexMatrix A = random_matrix(5, 2, rng) * random_matrix(2, 5, rng);
    CHECK(numeric_rank(A) == 2);
    CHECK(numeric_rank(ComplexMatrix::Zero(3, 3)) == 0);
}

TEST_CASE("derived seeds are decorrelated and stable", "[random]")
{
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    Rng a = make_stream(5, 3);
    Rng b = make_stream(5, 3);
    CHECK(a() == b());
}

TEST_CASE("complex_normal has unit variance", "[random]")
{
    Rng rng(19);
    double acc = 0.0;
    cdouble mean = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const cdouble z = complex_normal(rng);
        acc += std::norm(z);
        mean += z;
    }
    CHECK(acc / n == Catch::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(mean / static_cast<double>(n)) < 0.01);
}
