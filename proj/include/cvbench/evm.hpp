// Copyright 2026 The cvbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "cvbench/channel_models.hpp"

namespace cvbench {

/// Equiprobable ensemble of coherent states |alpha exp(i phase_j)>.
struct InputEnsemble {
  Complex alpha{0.0, 0.0};
  std::vector<double> phases;

  /// Phases 2 pi j / N for j = 1..N.
  static InputEnsemble equally_spaced(Complex alpha, int n_states);

  int n_states() const { return static_cast<int>(phases.size()); }
  double weight() const { return 1.0 / n_states(); }
  /// Amplitude of state `j` (0-based).
  Complex amplitude(int j) const;

  /// Throws InvalidArgument for an empty ensemble or phases that coincide
  /// modulo 2 pi.
  void validate() const;
};

/// <phi_j | phi_i> for the 0-based states i, j of the ensemble.
Complex input_overlap(const InputEnsemble& ensemble, int i, int j);

/// Gram table G(i, j) = <phi_i | phi_j>, Hermitian PSD with unit diagonal.
Eigen::MatrixXcd overlap_table(const InputEnsemble& ensemble);

/// Weighted local expectation-value matrix of one output state,
///
///   weight * < [1, x, p; x, x^2, xp; p, px, p^2] >.
///
/// Layout: a real symmetric part plus the commutator term
/// i * (weight / 2) * J with J(1,2) = 1, J(2,1) = -1, which every block
/// carries exactly. When the symmetrized cross moment was not measured the
/// block also holds `free_direction`, the real symmetric matrix multiplying
/// that unknown; the stored entries then assume it is zero.
struct LocalBlock {
  Eigen::Matrix3cd entries = Eigen::Matrix3cd::Zero();
  std::optional<Eigen::Matrix3d> free_direction;

  double weight() const { return entries(0, 0).real(); }
  /// True if entry (r, c) does not depend on an unknown moment.
  bool known(int r, int c) const;

  bool operator==(const LocalBlock& other) const;
};

enum class PhysicalityCheck { kEnforce, kAllow };

/// Throws PhysicalityError when `check == kEnforce` and the moments violate
/// var_x * var_p >= 1/4 at tolerance 1e-9.
LocalBlock build_local_block(const MomentSet& m, double weight,
                             PhysicalityCheck check = PhysicalityCheck::kEnforce);

/// R(phi) b R(phi)^T with R = diag(1, [[cos, -sin], [sin, cos]]): the local
/// block of the phase-shifted input for a phase-covariant channel.
LocalBlock rotate_block(const LocalBlock& b, double phi);

/// One real parameter of the affine completion map.
struct FreeParameter {
  enum class Part { kReal, kImag, kBlockDirection };
  Part part = Part::kReal;
  int row = 0;  // upper-triangle entry for kReal / kImag; block index otherwise
  int col = 0;
};

/// The 3N x 3N bipartite expectation-value matrix with only part of its
/// entries known. Block (i, j) belongs to |i><j| on the reference system;
/// inside a block the rows and columns run over (1, x, p).
///
/// Hermiticity is structural: every setter writes (r, c) and (c, r).
/// Free entries are complex unknowns; each diagonal block may additionally
/// carry one real unknown (its unmeasured symmetrized cross moment) that
/// enters through LocalBlock::free_direction.
class PartialEvm {
 public:
  PartialEvm() = default;
  /// All entries free and zero.
  explicit PartialEvm(int n_states);

  int n_states() const { return n_states_; }
  int dim() const { return 3 * n_states_; }

  const Eigen::MatrixXcd& values() const { return values_; }
  bool is_free(int r, int c) const { return free_[index(r, c)]; }
  const std::optional<Eigen::Matrix3d>& block_direction(int block) const {
    return directions_[block];
  }

  void set_fixed(int r, int c, Complex value);
  void set_free(int r, int c);
  /// Fixes every entry of diagonal block `block` from `b` and records its
  /// free direction, if any.
  void set_diagonal_block(int block, const LocalBlock& b);

  Eigen::Matrix3cd block(int i, int j) const;
  /// Top-left entries of all blocks (N x N).
  Eigen::MatrixXcd top_left_table() const;
  /// True if every top-left entry is fixed.
  bool top_left_known() const;

  /// Parameter order: upper-triangle free entries in row-major order (real
  /// then imaginary part), then one entry per diagonal block that has a free
  /// direction.
  std::vector<FreeParameter> free_parameters() const;
  int num_parameters() const { return static_cast<int>(free_parameters().size()); }

  /// Unit change of the full matrix produced by one parameter.
  Eigen::MatrixXcd parameter_direction(const FreeParameter& p) const;
  /// Fixed part plus sum_k theta_k * direction_k.
  Eigen::MatrixXcd complete(const Eigen::VectorXd& theta) const;

  /// Returns a copy with every fixed entry multiplied by c.
  PartialEvm scaled(double c) const;

  bool operator==(const PartialEvm& other) const;

 private:
  int index(int r, int c) const { return r * dim() + c; }

  int n_states_ = 0;
  Eigen::MatrixXcd values_;
  std::vector<bool> free_;
  std::vector<std::optional<Eigen::Matrix3d>> directions_;
};

/// Diagonal blocks from the per-state moments (weight 1/N each), off-diagonal
/// top-left entries (1/N) <phi_i|phi_j>, everything else free.
PartialEvm assemble_partial_evm(const InputEnsemble& ensemble,
                                std::span<const MomentSet> moments,
                                PhysicalityCheck check = PhysicalityCheck::kEnforce);

/// Same EVM built from a single local block measured for the phase-0 input,
/// rotated to every ensemble phase.
PartialEvm assemble_phase_covariant(const LocalBlock& base, const InputEnsemble& ensemble);

/// Transposition on the reference index: block (i, j) <- block (j, i).
/// Throws InvalidArgument if the matrix is not 3N x 3N.
Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& evm, int n_states);

}  // namespace cvbench
