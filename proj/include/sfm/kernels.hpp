#pragma once

#include <cstddef>
#include <string>

// Low-level vector kernels used by the dense eigensolver and SVD.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant is selected at runtime when the CPU supports it.  The two
// backends are equivalence-tested against each other.

namespace sfm::kern {

struct Ops {
  // sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a*x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  // plane rotation: (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rot)(double* x, double* y, double c, double s, std::size_t n);
  const char* name;
};

const Ops& scalar_ops();

#if defined(__x86_64__)
const Ops& avx2_ops();
#endif

// Backend in use; decided once per process (scalar unless AVX2 is present).
const Ops& active_ops();

// Override for tests: "scalar", "avx2", or "auto".  Throws on an
// unavailable backend.
void force_backend(const std::string& name);

}  // namespace sfm::kern
