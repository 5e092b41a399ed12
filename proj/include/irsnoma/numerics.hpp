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

// Dense complex linear algebra used by every other module. Thin wrappers over
// Eigen that pin the tolerances and orderings the rest of the library relies on.

#pragma once

#include "irsnoma/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace irsnoma
{

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Hermitian by convention; checked where a routine depends on it.
using HermitianMatrix = Eigen::MatrixXcd;

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankCutoff = 1e-10;

inline bool all_finite(const ComplexMatrix &A)
{
    return A.allFinite();
}

inline bool is_hermitian(const ComplexMatrix &A, double rel_tol = 1e-12)
{
    if (A.rows() != A.cols())
        return false;
    const double scale = std::max(A.norm(), 1.0);
    return (A - A.adjoint()).norm() <= rel_tol * scale;
}

struct EigenDecomposition
{
    RealVector values;     ///< descending
    ComplexMatrix vectors; ///< column i pairs with values(i)
};

/// Full eigendecomposition of a Hermitian matrix, eigenvalues descending.
inline EigenDecomposition hermitian_eig(const HermitianMatrix &A)
{
    if (!is_hermitian(A))
        throw ContractViolation("hermitian_eig: input is not Hermitian");
    if (!all_finite(A))
        throw ContractViolation("hermitian_eig: input has non-finite entries");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(A);
    if (solver.info() != Eigen::Success)
        throw NumericError("hermitian_eig: eigensolver did not converge");

    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

/// Eigenvalues only, descending. Cheaper than the full decomposition.
inline RealVector hermitian_eigenvalues(const HermitianMatrix &A)
{
    if (!is_hermitian(A))
        throw ContractViolation("hermitian_eigenvalues: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(A, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("hermitian_eigenvalues: eigensolver did not converge");
    return solver.eigenvalues().reverse();
}

inline double max_eigenvalue(const HermitianMatrix &A)
{
    return hermitian_eigenvalues(A)(0);
}

inline double min_eigenvalue(const HermitianMatrix &A)
{
    const RealVector ev = hermitian_eigenvalues(A);
    return ev(ev.size() - 1);
}

inline RealVector singular_values(const ComplexMatrix &A)
{
    if (A.size() == 0)
        return RealVector();
    Eigen::BDCSVD<ComplexMatrix> svd(A);
    return svd.singularValues();
}

/// Number of singular values above kRankCutoff * sigma_max.
inline Eigen::Index numeric_rank(const ComplexMatrix &A, double rel_cutoff = kRankCutoff)
{
    const RealVector sv = singular_values(A);
    if (sv.size() == 0 || sv(0) == 0.0)
        return 0;
    const double thresh = rel_cutoff * sv(0);
    return (sv.array() > thresh).count();
}

/// Orthonormal basis B of the orthogonal complement of range(A), so A^H B = 0.
/// Full row rank yields a matrix with zero columns.
inline ComplexMatrix null_space_basis(const ComplexMatrix &A)
{
    const Eigen::Index rows = A.rows();
    if (rows == 0)
        return ComplexMatrix(0, 0);
    if (A.cols() == 0)
        return ComplexMatrix::Identity(rows, rows);

    Eigen::BDCSVD<ComplexMatrix> svd(A, Eigen::ComputeFullU);
    const RealVector &sv = svd.singularValues();
    Eigen::Index rank = 0;
    if (sv.size() > 0 && sv(0) > 0.0)
        rank = (sv.array() > kRankCutoff * sv(0)).count();
    return svd.matrixU().rightCols(rows - rank);
}

/// Solves A x = b. Throws NumericError when A is singular or its estimated
/// condition number exceeds 1e12.
inline ComplexVector linear_solve(const ComplexMatrix &A, const ComplexVector &b)
{
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw ContractViolation("linear_solve: dimension mismatch");
    if (A.rows() == 0)
        return ComplexVector();

    Eigen::PartialPivLU<ComplexMatrix> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw NumericError("linear_solve: singular system (rcond = " + std::to_string(rcond) + ")");
    return lu.solve(b);
}

/// Real-valued overload, used by the power allocation step.
inline RealVector linear_solve(const RealMatrix &A, const RealVector &b)
{
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw ContractViolation("linear_solve: dimension mismatch");
    if (A.rows() == 0)
        return RealVector();

    Eigen::PartialPivLU<RealMatrix> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw NumericError("linear_solve: singular system (rcond = " + std::to_string(rcond) + ")");
    return lu.solve(b);
}

/// Entrywise (Schur) product.
inline HermitianMatrix hadamard(const HermitianMatrix &A, const HermitianMatrix &B)
{
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw ContractViolation("hadamard: order mismatch");
    return A.cwiseProduct(B);
}

/// Real part of x^H A x for Hermitian A.
inline double quadratic_form(const HermitianMatrix &A, const ComplexVector &x)
{
    return x.dot(A * x).real();
}

inline double relative_frobenius_error(const ComplexMatrix &approx, const ComplexMatrix &exact)
{
    const double denom = exact.norm();
    const double diff = (approx - exact).norm();
    return denom > 0.0 ? diff / denom : diff;
}

} // namespace irsnoma
