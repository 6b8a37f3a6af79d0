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

#include "cvbench/evm.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cvbench/errors.hpp"

namespace cvbench {
namespace {

constexpr double kPhysicalityTol = 1e-9;

Eigen::Matrix3d rotation(double phi) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  r(1, 1) = std::cos(phi);
  r(1, 2) = -std::sin(phi);
  r(2, 1) = std::sin(phi);
  r(2, 2) = std::cos(phi);
  return r;
}

// Real symmetric part plus the exact commutator term i (w/2) J.
Eigen::Matrix3cd with_commutator(const Eigen::Matrix3d& symmetric, double weight) {
  Eigen::Matrix3cd out = symmetric.cast<Complex>();
  out(1, 2) = Complex(symmetric(1, 2), 0.5 * weight);
  out(2, 1) = Complex(symmetric(2, 1), -0.5 * weight);
  return out;
}

void check_index(const InputEnsemble& ensemble, int i) {
  if (i < 0 || i >= ensemble.n_states()) {
    std::ostringstream msg;
    msg << "state index " << i << " out of range [0, " << ensemble.n_states() << ")";
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

InputEnsemble InputEnsemble::equally_spaced(Complex alpha, int n_states) {
  if (n_states < 1) {
    throw InvalidArgument("an ensemble needs at least one state");
  }
  InputEnsemble e;
  e.alpha = alpha;
  e.phases.reserve(n_states);
  for (int j = 1; j <= n_states; ++j) {
    e.phases.push_back(2.0 * std::numbers::pi * j / n_states);
  }
  return e;
}

Complex InputEnsemble::amplitude(int j) const {
  return alpha * std::polar(1.0, phases.at(j));
}

void InputEnsemble::validate() const {
  if (phases.empty()) {
    throw InvalidArgument("an ensemble needs at least one state");
  }
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (!std::isfinite(phases[i])) {
      throw InvalidArgument("ensemble phases must be finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double d = std::remainder(phases[i] - phases[j], 2.0 * std::numbers::pi);
      if (std::abs(d) < 1e-12) {
        std::ostringstream msg;
        msg << "phases " << j << " and " << i << " coincide modulo 2 pi";
        throw InvalidArgument(msg.str());
      }
    }
  }
}

Complex input_overlap(const InputEnsemble& ensemble, int i, int j) {
  check_index(ensemble, i);
  check_index(ensemble, j);
  if (i == j) return 1.0;
  const Complex ai = ensemble.amplitude(i);
  const Complex aj = ensemble.amplitude(j);
  return std::exp(-std::norm(ai) / 2.0 - std::norm(aj) / 2.0 + std::conj(aj) * ai);
}

Eigen::MatrixXcd overlap_table(const InputEnsemble& ensemble) {
  const int n = ensemble.n_states();
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g(i, j) = input_overlap(ensemble, j, i);
    }
  }
  return g;
}

bool LocalBlock::known(int r, int c) const {
  return !free_direction || (*free_direction)(r, c) == 0.0;
}

bool LocalBlock::operator==(const LocalBlock& other) const {
  if (entries != other.entries) return false;
  if (free_direction.has_value() != other.free_direction.has_value()) return false;
  return !free_direction || *free_direction == *other.free_direction;
}

LocalBlock build_local_block(const MomentSet& m, double weight, PhysicalityCheck check) {
  if (!(weight > 0.0)) {
    throw InvalidArgument("block weight must be positive");
  }
  if (check == PhysicalityCheck::kEnforce && !m.is_physical(kPhysicalityTol)) {
    std::ostringstream msg;
    msg << "moments violate the uncertainty relation: var_x=" << m.var_x
        << ", var_p=" << m.var_p;
    throw PhysicalityError(msg.str());
  }
  Eigen::Matrix3d s;
  const double cross = m.cross_re.value_or(0.0);
  s << 1.0, m.mean_x, m.mean_p,
       m.mean_x, m.var_x + m.mean_x * m.mean_x, cross,
       m.mean_p, cross, m.var_p + m.mean_p * m.mean_p;
  s *= weight;

  LocalBlock b;
  b.entries = with_commutator(s, weight);
  if (!m.cross_re) {
    Eigen::Matrix3d dir = Eigen::Matrix3d::Zero();
    dir(1, 2) = weight;
    dir(2, 1) = weight;
    b.free_direction = dir;
  }
  return b;
}

LocalBlock rotate_block(const LocalBlock& b, double phi) {
  // The commutator part is rotation invariant (R J R^T = det(R) J), so only
  // the real symmetric part is transformed.
  const Eigen::Matrix3d r = rotation(phi);
  const Eigen::Matrix3d s = b.entries.real();
  Eigen::Matrix3d rotated = r * s * r.transpose();
  rotated = 0.5 * (rotated + rotated.transpose()).eval();

  LocalBlock out;
  out.entries = with_commutator(rotated, b.weight());
  out.entries(0, 0) = b.entries(0, 0);
  if (b.free_direction) {
    Eigen::Matrix3d dir = r * *b.free_direction * r.transpose();
    out.free_direction = 0.5 * (dir + dir.transpose());
  }
  return out;
}

PartialEvm::PartialEvm(int n_states)
    : n_states_(n_states),
      values_(Eigen::MatrixXcd::Zero(3 * n_states, 3 * n_states)),
      free_(static_cast<std::size_t>(9 * n_states * n_states), true),
      directions_(n_states) {
  if (n_states < 1) {
    throw InvalidArgument("an EVM needs at least one block");
  }
}

void PartialEvm::set_fixed(int r, int c, Complex value) {
  if (r == c) {
    value = value.real();
  }
  values_(r, c) = value;
  values_(c, r) = std::conj(value);
  free_[index(r, c)] = false;
  free_[index(c, r)] = false;
}

void PartialEvm::set_free(int r, int c) {
  values_(r, c) = 0.0;
  values_(c, r) = 0.0;
  free_[index(r, c)] = true;
  free_[index(c, r)] = true;
}

void PartialEvm::set_diagonal_block(int block, const LocalBlock& b) {
  const int o = 3 * block;
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c) {
      set_fixed(o + r, o + c, b.entries(r, c));
    }
  }
  directions_.at(block) = b.free_direction;
}

Eigen::Matrix3cd PartialEvm::block(int i, int j) const {
  return values_.block<3, 3>(3 * i, 3 * j);
}

Eigen::MatrixXcd PartialEvm::top_left_table() const {
  Eigen::MatrixXcd t(n_states_, n_states_);
  for (int i = 0; i < n_states_; ++i) {
    for (int j = 0; j < n_states_; ++j) {
      t(i, j) = values_(3 * i, 3 * j);
    }
  }
  return t;
}

bool PartialEvm::top_left_known() const {
  for (int i = 0; i < n_states_; ++i) {
    for (int j = 0; j < n_states_; ++j) {
      if (is_free(3 * i, 3 * j)) return false;
    }
  }
  return true;
}

std::vector<FreeParameter> PartialEvm::free_parameters() const {
  std::vector<FreeParameter> params;
  for (int r = 0; r < dim(); ++r) {
    for (int c = r; c < dim(); ++c) {
      if (!is_free(r, c)) continue;
      params.push_back({FreeParameter::Part::kReal, r, c});
      if (r != c) params.push_back({FreeParameter::Part::kImag, r, c});
    }
  }
  for (int b = 0; b < n_states_; ++b) {
    if (directions_[b]) params.push_back({FreeParameter::Part::kBlockDirection, b, b});
  }
  return params;
}

Eigen::MatrixXcd PartialEvm::parameter_direction(const FreeParameter& p) const {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim(), dim());
  switch (p.part) {
    case FreeParameter::Part::kReal:
      d(p.row, p.col) = 1.0;
      d(p.col, p.row) = 1.0;
      break;
    case FreeParameter::Part::kImag:
      d(p.row, p.col) = Complex(0.0, 1.0);
      d(p.col, p.row) = Complex(0.0, -1.0);
      break;
    case FreeParameter::Part::kBlockDirection:
      d.block<3, 3>(3 * p.row, 3 * p.row) = directions_.at(p.row).value().cast<Complex>();
      break;
  }
  return d;
}

Eigen::MatrixXcd PartialEvm::complete(const Eigen::VectorXd& theta) const {
  const auto params = free_parameters();
  if (theta.size() != static_cast<Eigen::Index>(params.size())) {
    throw InvalidArgument("parameter vector has the wrong dimension");
  }
  Eigen::MatrixXcd out = values_;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    const double t = theta[static_cast<Eigen::Index>(k)];
    switch (p.part) {
      case FreeParameter::Part::kReal:
        out(p.row, p.col) += t;
        if (p.row != p.col) out(p.col, p.row) += t;
        break;
      case FreeParameter::Part::kImag:
        out(p.row, p.col) += Complex(0.0, t);
        out(p.col, p.row) += Complex(0.0, -t);
        break;
      case FreeParameter::Part::kBlockDirection:
        out.block<3, 3>(3 * p.row, 3 * p.row) += t * directions_[p.row]->cast<Complex>();
        break;
    }
  }
  return out;
}

PartialEvm PartialEvm::scaled(double c) const {
  PartialEvm out = *this;
  out.values_ *= c;
  for (auto& d : out.directions_) {
    if (d) *d *= c;
  }
  return out;
}

bool PartialEvm::operator==(const PartialEvm& other) const {
  if (n_states_ != other.n_states_ || values_ != other.values_ || free_ != other.free_) {
    return false;
  }
  for (int b = 0; b < n_states_; ++b) {
    const auto& x = directions_[b];
    const auto& y = other.directions_[b];
    if (x.has_value() != y.has_value()) return false;
    if (x && *x != *y) return false;
  }
  return true;
}

PartialEvm assemble_partial_evm(const InputEnsemble& ensemble,
                                std::span<const MomentSet> moments,
                                PhysicalityCheck check) {
  ensemble.validate();
  const int n = ensemble.n_states();
  if (static_cast<int>(moments.size()) != n) {
    std::ostringstream msg;
    msg << "expected " << n << " moment sets, got " << moments.size();
    throw InvalidArgument(msg.str());
  }
  const double w = ensemble.weight();
  PartialEvm evm(n);
  for (int i = 0; i < n; ++i) {
    evm.set_diagonal_block(i, build_local_block(moments[i], w, check));
    for (int j = i + 1; j < n; ++j) {
      evm.set_fixed(3 * i, 3 * j, w * input_overlap(ensemble, j, i));
    }
  }
  return evm;
}

PartialEvm assemble_phase_covariant(const LocalBlock& base, const InputEnsemble& ensemble) {
  ensemble.validate();
  const int n = ensemble.n_states();
  const double base_weight = base.weight();
  if (!(base_weight > 0.0)) {
    throw InvalidArgument("base block must have a positive weight");
  }
  LocalBlock unit = base;
  unit.entries /= base_weight;
  if (unit.free_direction) *unit.free_direction /= base_weight;
  unit.entries(0, 0) = 1.0;

  const double w = ensemble.weight();
  PartialEvm evm(n);
  for (int i = 0; i < n; ++i) {
    LocalBlock b = rotate_block(unit, ensemble.phases[i]);
    b.entries *= w;
    if (b.free_direction) *b.free_direction *= w;
    evm.set_diagonal_block(i, b);
    for (int j = i + 1; j < n; ++j) {
      evm.set_fixed(3 * i, 3 * j, w * input_overlap(ensemble, j, i));
    }
  }
  return evm;
}

Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& evm, int n_states) {
  if (n_states < 1 || evm.rows() != 3 * n_states || evm.cols() != 3 * n_states) {
    std::ostringstream msg;
    msg << "partial transpose: expected a " << 3 * n_states << " x " << 3 * n_states
        << " matrix, got " << evm.rows() << " x " << evm.cols();
    throw InvalidArgument(msg.str());
  }
  Eigen::MatrixXcd out(evm.rows(), evm.cols());
  for (int i = 0; i < n_states; ++i) {
    for (int j = 0; j < n_states; ++j) {
      out.block<3, 3>(3 * i, 3 * j) = evm.block<3, 3>(3 * j, 3 * i);
    }
  }
  return out;
}

}  // namespace cvbench
