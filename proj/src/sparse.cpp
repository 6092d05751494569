#include "opbench/sparse.hpp"

namespace opbench {

Scalar pair(const CoordFunctional& f, const SparseVector& x, ScalarKind kind) {
  const auto& fe = f.entries();
  const auto& xe = x.entries();
  Scalar sum = Scalar::zero(f.kind_or(x.kind_or(kind)));
  // Merge walk over the two sorted supports.
  auto fi = fe.begin();
  auto xi = xe.begin();
  while (fi != fe.end() && xi != xe.end()) {
    if (fi->first < xi->first) {
      ++fi;
    } else if (xi->first < fi->first) {
      ++xi;
    } else {
      sum += fi->second * xi->second;
      ++fi;
      ++xi;
    }
  }
  return sum;
}

CoordFunctional as_functional(const SparseVector& x) {
  CoordFunctional f;
  for (const auto& [i, v] : x.entries()) f.set(i, v);
  return f;
}

SparseVector as_vector(const CoordFunctional& f) {
  SparseVector x;
  for (const auto& [i, v] : f.entries()) x.set(i, v);
  return x;
}

IndexSet window(Index n) {
  IndexSet s;
  for (Index i = 1; i <= n; ++i) s.insert(i);
  return s;
}

}  // namespace opbench
