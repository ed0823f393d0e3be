// Copyright 2026 The simgap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace simgap {

/// Pins the BLAS backend to one thread. Multi-threaded GEMM reorders float
/// accumulation and breaks bit reproducibility, so call this before training.
void blas_single_thread();

/// Lets the BLAS backend use n threads. Anything above 1 trades bit
/// reproducibility for speed; results stay correct to float tolerance.
void blas_set_threads(int n);

/// C = alpha * op(A) op(B) + beta * C, row-major.
/// A is M x K (or K x M when ta), B is K x N (or N x K when tb), C is M x N.
void gemm(bool ta, bool tb, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc);
void gemm(bool ta, bool tb, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc);

}  // namespace simgap
