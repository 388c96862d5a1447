#include "spdc/eigensolver.hpp"

#include <algorithm>
#include <cstdlib>
#include <vector>

#ifdef SPDC_HAVE_OPENBLAS
#include <dlfcn.h>
#endif

namespace spdc {

namespace {

template <typename Scalar>
SymmetricEigen<Scalar> eigen_backend(const Mat<Scalar>& a) {
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::data, "symmetric eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

#ifdef SPDC_HAVE_OPENBLAS

// Fortran LAPACK drivers; the trailing arguments are the hidden lengths of
// the two character arguments.
template <typename Scalar>
using Syevd = void(const char*, const char*, const int*, Scalar*, const int*, Scalar*, Scalar*,
                   const int*, int*, const int*, int*, std::size_t, std::size_t);

struct Lapack {
  Syevd<double>* dsyevd = nullptr;
  Syevd<float>* ssyevd = nullptr;
};

// OpenBLAS picks its kernels from OPENBLAS_CORETYPE when it is loaded. The
// Cooperlake kernels in 0.3.20 return non-orthogonal eigenvectors for
// n >= 256, so AVX-512 machines are pinned to the SkylakeX kernels unless the
// user chose a core type. Loading at runtime is what makes the pin possible.
const Lapack& lapack() {
  static const Lapack api = [] {
    Lapack out;
    if (std::getenv("OPENBLAS_CORETYPE") == nullptr && __builtin_cpu_supports("avx512f")) {
      setenv("OPENBLAS_CORETYPE", "SkylakeX", 0);
    }
    void* lib = dlopen("libopenblas.so.0", RTLD_NOW | RTLD_LOCAL);
    if (!lib) return out;
    out.dsyevd = reinterpret_cast<Syevd<double>*>(dlsym(lib, "dsyevd_"));
    out.ssyevd = reinterpret_cast<Syevd<float>*>(dlsym(lib, "ssyevd_"));
    if (!out.dsyevd || !out.ssyevd) out = {};
    return out;
  }();
  return api;
}

template <typename Scalar>
SymmetricEigen<Scalar> lapack_backend(Syevd<Scalar>* syevd, const Mat<Scalar>& a) {
  SymmetricEigen<Scalar> out{Vec<Scalar>(a.rows()), a};
  const int n = static_cast<int>(a.rows());
  if (n == 0) return out;
  int info = 0;
  int lwork = -1;
  int liwork = -1;
  Scalar work_size = 0;
  int iwork_size = 0;
  syevd("V", "L", &n, out.vectors.data(), &n, out.values.data(), &work_size, &lwork, &iwork_size,
        &liwork, &info, 1, 1);
  if (info != 0) throw Error(ErrorKind::data, "syevd workspace query failed with info " + std::to_string(info));
  lwork = std::max(1, static_cast<int>(work_size));
  liwork = std::max(1, iwork_size);
  std::vector<Scalar> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  syevd("V", "L", &n, out.vectors.data(), &n, out.values.data(), work.data(), &lwork, iwork.data(),
        &liwork, &info, 1, 1);
  if (info != 0) throw Error(ErrorKind::data, "syevd failed with info " + std::to_string(info));
  return out;
}

#endif

}  // namespace

template <>
SymmetricEigen<double> symmetric_eigen<double>(const Mat<double>& a) {
#ifdef SPDC_HAVE_OPENBLAS
  if (lapack().dsyevd) return lapack_backend(lapack().dsyevd, a);
#endif
  return eigen_backend(a);
}

template <>
SymmetricEigen<float> symmetric_eigen<float>(const Mat<float>& a) {
#ifdef SPDC_HAVE_OPENBLAS
  if (lapack().ssyevd) return lapack_backend(lapack().ssyevd, a);
#endif
  return eigen_backend(a);
}

const char* eigensolver_backend() {
#ifdef SPDC_HAVE_OPENBLAS
  if (lapack().dsyevd) return "openblas";
#endif
  return "eigen";
}

}  // namespace spdc
