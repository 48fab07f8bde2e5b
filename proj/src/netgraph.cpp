#include "mgsim/netgraph.hpp"

#include <algorithm>
#include <queue>
#include <vector>

namespace mgsim {

namespace {

constexpr double kPivotRatio = 1e-10;

std::string ord(int i) { return std::to_string(i + 1); }  // 1-based in messages

}  // namespace

CommGraph::CommGraph(Mat adjacency, Vec pinning_first, Vec pinning_second)
    : adjacency_(std::move(adjacency)) {
  if (adjacency_.rows() != adjacency_.cols()) {
    throw ValidationError("adjacency must be square, got " + std::to_string(adjacency_.rows()) +
                          "x" + std::to_string(adjacency_.cols()));
  }
  n_ = static_cast<int>(adjacency_.rows());
  if (n_ < 1) throw ValidationError("graph needs at least one follower");
  for (int i = 0; i < n_; ++i) {
    if (adjacency_(i, i) != 0.0) {
      throw ValidationError("nonzero diagonal: a_" + ord(i) + ord(i) + " = " +
                            std::to_string(adjacency_(i, i)));
    }
    for (int j = 0; j < n_; ++j) {
      if (!(adjacency_(i, j) >= 0.0)) {  // also catches NaN
        throw ValidationError("negative weight: a_" + ord(i) + ord(j) + " = " +
                              std::to_string(adjacency_(i, j)));
      }
    }
  }
  pinning_ = {std::move(pinning_first), std::move(pinning_second)};
  for (int k = 0; k < 2; ++k) {
    const Vec& g = pinning_[k];
    const int leader = n_ + 1 + k;
    if (g.size() != n_) {
      throw ValidationError("pinning vector for leader " + std::to_string(leader) +
                            " has length " + std::to_string(g.size()) + ", expected " +
                            std::to_string(n_));
    }
    for (int i = 0; i < n_; ++i) {
      if (!(g(i) >= 0.0)) {
        throw ValidationError("negative pinning gain: g_" + ord(i) + "," +
                              std::to_string(leader) + " = " + std::to_string(g(i)));
      }
    }
  }
}

const Vec& CommGraph::pinning(int leader_id) const {
  if (leader_id == first_leader_id()) return pinning_[0];
  if (leader_id == second_leader_id()) return pinning_[1];
  throw IndexError("invalid leader index " + std::to_string(leader_id) + ", expected " +
                   std::to_string(first_leader_id()) + " or " +
                   std::to_string(second_leader_id()));
}

CommGraph build_graph(const Mat& adjacency, const Vec& pinning_first, const Vec& pinning_second) {
  return CommGraph(adjacency, pinning_first, pinning_second);
}

Mat laplacian(const CommGraph& g) {
  const Mat& a = g.adjacency();
  Mat l = -a;
  for (int i = 0; i < g.n_followers(); ++i) l(i, i) = a.row(i).sum();
  return l;
}

Mat phi_matrix(const CommGraph& g, int leader_id) {
  Mat m = 0.5 * laplacian(g);
  m.diagonal() += g.pinning(leader_id);
  return m;
}

ContainmentAlgebra containment_algebra(const CommGraph& g) {
  ContainmentAlgebra alg;
  alg.laplacian = laplacian(g);
  alg.phi[0] = phi_matrix(g, g.first_leader_id());
  alg.phi[1] = phi_matrix(g, g.second_leader_id());
  alg.phi_sum = alg.phi[0] + alg.phi[1];
  try {
    alg.phi_sum_inverse = checked_inverse(alg.phi_sum);
  } catch (const SingularityError&) {
    alg.phi_sum_inverse.reset();
  }
  return alg;
}

bool check_reachability(const CommGraph& g) {
  const int n = g.n_followers();
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  // Virtual super-source: any follower pinned by either leader is a root.
  for (int i = 0; i < n; ++i) {
    if (g.pinning_vectors()[0](i) > 0.0 || g.pinning_vectors()[1](i) > 0.0) {
      seen[i] = 1;
      frontier.push(i);
    }
  }
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop();
    for (int i = 0; i < n; ++i) {
      // a_ij > 0 means j -> i: information flows from j to i.
      if (!seen[i] && g.adjacency()(i, j) > 0.0) {
        seen[i] = 1;
        frontier.push(i);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

namespace {

Eigen::PartialPivLU<Mat> checked_lu(const Mat& m) {
  Eigen::PartialPivLU<Mat> lu(m);
  const Vec pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double max_p = pivots.maxCoeff();
  const double min_p = pivots.minCoeff();
  if (max_p == 0.0 || min_p < kPivotRatio * max_p) {
    throw SingularityError("matrix is numerically singular (pivot ratio " +
                           std::to_string(max_p == 0.0 ? 0.0 : min_p / max_p) + ")");
  }
  return lu;
}

}  // namespace

Mat checked_inverse(const Mat& m) { return checked_lu(m).inverse(); }

Vec checked_solve(const Mat& m, const Vec& rhs) { return checked_lu(m).solve(rhs); }

Vec containment_reference(const CommGraph& g, double x_first, double x_second) {
  const Vec ones = Vec::Ones(g.n_followers());
  return containment_reference(g, Vec(x_first * ones), Vec(x_second * ones));
}

Vec containment_reference(const CommGraph& g, const Vec& w_first, const Vec& w_second) {
  const int n = g.n_followers();
  if (w_first.size() != n || w_second.size() != n) {
    throw ValidationError("leader signal vectors must have length " + std::to_string(n));
  }
  const ContainmentAlgebra alg = containment_algebra(g);
  if (!alg.phi_sum_inverse) {
    throw SingularityError(
        "pinned Laplacian sum is singular; no leader reaches every follower");
  }
  const Vec rhs = g.pinning_vectors()[0].cwiseProduct(w_first) +
                  g.pinning_vectors()[1].cwiseProduct(w_second);
  return *alg.phi_sum_inverse * rhs;
}

SpectralReport spectral_check(const CommGraph& g) {
  SpectralReport rep;
  const ContainmentAlgebra alg = containment_algebra(g);
  const Mat& m = alg.phi_sum;
  rep.nonsingular = alg.phi_sum_inverse.has_value();

  Eigen::EigenSolver<Mat> es(m);
  rep.min_real_part = es.eigenvalues().real().minCoeff();
  const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  rep.positive_real_parts = rep.min_real_part > 1e-12 * scale;

  rep.symmetric = (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> ses(sym);
  rep.min_symmetric_eig = ses.eigenvalues().minCoeff();
  rep.symmetric_part_pd = rep.min_symmetric_eig > 1e-12 * scale;
  return rep;
}

}  // namespace mgsim
