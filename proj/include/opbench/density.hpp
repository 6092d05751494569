#pragma once

#include <string>
#include <vector>

#include "opbench/spaces.hpp"

namespace opbench {

/// Finite stand-in for density: every target has an element of the set within
/// window-norm distance eps.
struct EpsilonNet {
  Index window = 0;
  std::vector<SparseVector> targets;
  Scalar eps;
};

struct Ball {
  SparseVector center;
  Scalar radius;
};

struct NetRow {
  std::size_t target;   // 0-based
  std::size_t nearest;  // 0-based index into the set
  Scalar distance;
};

/// Nearest element of `set` (first on ties) to every target, in `norm`.
std::vector<NetRow> net_rows(const std::vector<SparseVector>& set, const std::vector<SparseVector>& targets,
                             const SeminormSpec& norm);
bool is_net(const std::vector<SparseVector>& set, const EpsilonNet& net, const SeminormSpec& norm);

struct Extraction {
  std::vector<std::size_t> picked;   // 0-based positions in A, one per ball
  std::vector<SparseVector> items;
};

/// Greedy: for ball n pick the first a in A (not yet used) inside the ball
/// with a outside ker p + span(previous picks). Throws Exhausted.
Extraction extract_p_independent(const std::vector<SparseVector>& a, const SeminormSpec& p,
                                 const std::vector<Ball>& balls, const SeminormSpec& window_norm);

/// Disk K = closed absolutely convex hull of xs; p_K via minkowski.
DiskSpec null_sequence_disk(const std::vector<SparseVector>& xs);

struct ScheduleEntry {
  std::string role;   // "f-alpha", "f-beta", "gamma-x", "gamma-y"
  std::size_t m;      // 1-based
  std::size_t source; // target index for residuals, item index for gamma terms (0-based)
  Scalar scale;       // 2^m or gamma_m
  SparseVector item;  // the null-sequence element
};

struct CommonDisk {
  DiskSpec disk;                         // weight form
  std::vector<ScheduleEntry> schedule;   // the combined null enumeration
  std::vector<NetRow> net_a, net_b;      // p_D nearest rows per target
  Scalar eps_prime;                      // max p_D net radius over A and B
  Scalar bound;                          // C with p_window <= C p_D
  std::size_t rounds = 1;
};

/// Rescaling scheme with f a round-robin over the targets: generators
/// 2^m (f(m) - alpha(m)), 2^m (f(m) - beta(m)), gamma_m x_m, gamma_m y_m with
/// gamma_m = 2^-m / (1 + p_window(item)); weights d_i = N max_z |z_i| so every
/// generator has p_D <= 1. Throws NotANet when A or B misses a target by
/// more than eps.
CommonDisk common_disk(const std::vector<SparseVector>& a, const std::vector<SparseVector>& b, const EpsilonNet& net,
                       const SeminormSpec& window_norm, std::size_t rounds = 1);

struct BiorthogonalSystem {
  std::vector<SparseVector> u;      // u_n in y_n + span{y_j : j < n}
  std::vector<CoordFunctional> f;   // f_n(u_m) = delta_nm, supp f_n in active(p)
};

/// Gram-Schmidt-style sweep with separating_functional at every step.
/// Throws KernelCollision unless span(ys) meets ker p only in 0.
BiorthogonalSystem biorthogonal_system(const std::vector<SparseVector>& ys, const SeminormSpec& p);

/// Functionals biorthogonal to the given family itself (the sweep's output
/// mapped back through its unit-triangular change of basis).
std::vector<CoordFunctional> biorthogonalize(const std::vector<SparseVector>& us, const SeminormSpec& p);

}  // namespace opbench
