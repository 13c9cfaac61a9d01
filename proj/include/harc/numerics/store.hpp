#pragma once

#include "harc/error.hpp"
#include "harc/rng.hpp"
#include "harc/types.hpp"

#include <cmath>
#include <map>
#include <string>

namespace harc::numerics {

/// Dense real tensor. Everything this model needs is rank 1 or 2; vectors are
/// stored as n x 1 with rank = 1 so checkpoints round-trip shapes exactly.
template <class S>
struct Tensor {
  Mat<S> m;
  int rank = 2;

  static Tensor vector(Eigen::Index n) { return {Mat<S>::Zero(n, 1), 1}; }
  static Tensor matrix(Eigen::Index r, Eigen::Index c) { return {Mat<S>::Zero(r, c), 2}; }

  Eigen::Index size() const { return m.size(); }
  Eigen::Index rows() const { return m.rows(); }
  Eigen::Index cols() const { return m.cols(); }

  /// Row-major coordinate addressing, shared by the checkpoint writer and the
  /// gradient checker.
  S& coord(Eigen::Index k) { return m(k / m.cols(), k % m.cols()); }
  S coord(Eigen::Index k) const { return m(k / m.cols(), k % m.cols()); }

  bool all_finite() const { return m.allFinite(); }
};

template <class S>
struct AdamState {
  Mat<S> m1;  // first moment
  Mat<S> m2;  // second moment
  i64 t = 0;
};

template <class S>
struct Param {
  Tensor<S> value;
  Tensor<S> grad;
  AdamState<S> adam;
};

/// Named parameters with paired gradient buffers and Adam state. std::map
/// gives deterministic iteration by name, which fixes checkpoint layout and
/// gradient-checker coordinate order.
template <class S>
class ParameterStore {
 public:
  Param<S>& add(const std::string& name, int rank, Eigen::Index rows,
                Eigen::Index cols = 1) {
    if (params_.count(name)) throw ValidationError("duplicate parameter name: " + name);
    Param<S> p;
    p.value = rank == 1 ? Tensor<S>::vector(rows) : Tensor<S>::matrix(rows, cols);
    p.grad = p.value;
    p.adam.m1 = p.value.m;
    p.adam.m2 = p.value.m;
    return params_.emplace(name, std::move(p)).first->second;
  }

  Param<S>& at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw LookupError("unknown parameter: " + name);
    return it->second;
  }
  const Param<S>& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw LookupError("unknown parameter: " + name);
    return it->second;
  }
  bool has(const std::string& name) const { return params_.count(name) != 0; }

  const Mat<S>& value(const std::string& name) const { return at(name).value.m; }
  Mat<S>& grad(const std::string& name) { return at(name).grad.m; }

  void zero_grads() {
    for (auto& [name, p] : params_) p.grad.m.setZero();
  }

  i64 coord_count() const {
    i64 n = 0;
    for (const auto& [name, p] : params_) n += p.value.size();
    return n;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  std::size_t size() const { return params_.size(); }

  template <class T>
  ParameterStore<T> cast() const {
    ParameterStore<T> out;
    for (const auto& [name, p] : params_) {
      auto& q = out.add(name, p.value.rank, p.value.rows(), p.value.cols());
      q.value.m = p.value.m.template cast<T>();
    }
    return out;
  }

 private:
  std::map<std::string, Param<S>> params_;
};

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam on every parameter. Gradients are left intact; the
/// caller zeroes them.
template <class S>
void adam_step(ParameterStore<S>& store, const AdamConfig& cfg = {}) {
  for (auto& [name, p] : store) {
    p.adam.t += 1;
    const S b1 = static_cast<S>(cfg.beta1);
    const S b2 = static_cast<S>(cfg.beta2);
    p.adam.m1 = b1 * p.adam.m1 + (S{1} - b1) * p.grad.m;
    p.adam.m2 = (b2 * p.adam.m2.array() + (S{1} - b2) * p.grad.m.array().square()).matrix();
    const S c1 = S{1} - static_cast<S>(std::pow(cfg.beta1, static_cast<double>(p.adam.t)));
    const S c2 = S{1} - static_cast<S>(std::pow(cfg.beta2, static_cast<double>(p.adam.t)));
    p.value.m.array() -= static_cast<S>(cfg.lr) * (p.adam.m1.array() / c1) /
                         ((p.adam.m2.array() / c2).sqrt() + static_cast<S>(cfg.eps));
  }
}

template <class S>
bool all_finite(const ParameterStore<S>& store) {
  for (const auto& [name, p] : store)
    if (!p.value.all_finite()) return false;
  return true;
}

/// Bitwise equality of values, for determinism tests.
template <class S>
bool values_equal(const ParameterStore<S>& a, const ParameterStore<S>& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (ia->second.value.m.rows() != ib->second.value.m.rows() ||
        ia->second.value.m.cols() != ib->second.value.m.cols())
      return false;
    if (std::memcmp(ia->second.value.m.data(), ib->second.value.m.data(),
                    sizeof(S) * static_cast<std::size_t>(ia->second.value.m.size())) != 0)
      return false;
  }
  return true;
}

}  // namespace harc::numerics
