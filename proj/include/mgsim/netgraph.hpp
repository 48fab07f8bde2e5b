#pragma once

#include <array>
#include <optional>

#include "mgsim/common.hpp"

namespace mgsim {

// Directed communication topology among N follower inverters and two leader
// (reference) nodes. adjacency(i, j) is the weight of the edge j -> i, so row
// i lists what inverter i hears. The two pinning vectors hold the
// leader-to-follower gains; leaders are addressed by their node ids N+1 and
// N+2 to match the usual numbering (followers 1..N, leaders N+1, N+2).
class CommGraph {
 public:
  CommGraph(Mat adjacency, Vec pinning_first, Vec pinning_second);

  int n_followers() const { return n_; }
  const Mat& adjacency() const { return adjacency_; }
  const Vec& pinning(int leader_id) const;
  const std::array<Vec, 2>& pinning_vectors() const { return pinning_; }
  int first_leader_id() const { return n_ + 1; }
  int second_leader_id() const { return n_ + 2; }

 private:
  int n_ = 0;
  Mat adjacency_;
  std::array<Vec, 2> pinning_;
};

// Derived matrices of the containment algebra. phi_sum_inverse is only
// present when the pinned Laplacian is numerically nonsingular; the graph a
// simulation may legally use always has it.
struct ContainmentAlgebra {
  Mat laplacian;
  std::array<Mat, 2> phi;  // one matrix per leader
  Mat phi_sum;
  std::optional<Mat> phi_sum_inverse;
};

CommGraph build_graph(const Mat& adjacency, const Vec& pinning_first, const Vec& pinning_second);

// L = D - A with D the in-degree diagonal. Row sums are zero.
Mat laplacian(const CommGraph& g);

// Phi_k = L/2 + diag(g_ik) for leader_id in {N+1, N+2}.
Mat phi_matrix(const CommGraph& g, int leader_id);

ContainmentAlgebra containment_algebra(const CommGraph& g);

// True iff every follower can be reached from at least one leader through
// pinning edges followed by follower-to-follower edges.
bool check_reachability(const CommGraph& g);

// Solves (sum_k Phi_k) r = Phi_1 (x1 * 1) + Phi_2 (x2 * 1) for scalar leader
// values. Every entry of r lies in [min(x1,x2), max(x1,x2)].
Vec containment_reference(const CommGraph& g, double x_first, double x_second);

// Per-follower leader signal variant. Each follower compares against its own
// augmented leader value, so the signals enter only through the pinning
// weights (for uniform vectors this coincides with the scalar overload).
Vec containment_reference(const CommGraph& g, const Vec& w_first, const Vec& w_second);

// Inverse with an explicit singularity test: LU with partial pivoting, and
// the matrix is declared singular when the smallest pivot magnitude falls
// below 1e-10 times the largest.
Mat checked_inverse(const Mat& m);

// Factored solve with the same pivot test as checked_inverse.
Vec checked_solve(const Mat& m, const Vec& rhs);

struct SpectralReport {
  bool nonsingular = false;
  bool positive_real_parts = false;  // all eigenvalues of phi_sum
  bool symmetric = false;
  bool symmetric_part_pd = false;  // eigenvalues of (M + M^T)/2 all positive
  double min_real_part = 0.0;
  double min_symmetric_eig = 0.0;
};

// Numerical check that the pinned Laplacian sum is nonsingular with
// eigenvalues in the open right half plane; for symmetric graphs also checks
// positive definiteness of the symmetric part.
SpectralReport spectral_check(const CommGraph& g);

}  // namespace mgsim
