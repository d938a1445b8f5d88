#pragma once

#include "latlin/fields.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace latlin {

/// Closed-form smooth continuum field w: R^d -> R^d with its Jacobian.
class SmoothField {
 public:
  virtual ~SmoothField() = default;
  virtual int dim() const = 0;
  virtual void value(std::span<const double> x, std::span<double> out) const = 0;
  /// Row-major Jacobian: out[i*d + p] = d w_i / d x_p.
  virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;

  FieldFunction value_fn() const;
  FieldFunction gradient_fn() const;
};

using SmoothFieldPtr = std::shared_ptr<const SmoothField>;

/// w(x) = amplitude * phi(s), s = (x - center) / radius componentwise, where
/// phi is one of
///   zero        0
///   bump        prod_a beta(s_a), beta(s) = exp(1 - 1/(1 - s^2)) on |s| < 1
///   bump_sine   bump * sin(pi * frequency * s_0)
///   bump_cos    bump * cos(pi * frequency * s_0)
///   bump_poly   bump * (1 + s_0 + s_0^2)
/// All shapes are compactly supported in the box center +- radius.
struct SmoothFieldSpec {
  std::string shape = "bump";
  std::vector<double> center;
  std::vector<double> radius;
  std::vector<double> amplitude;
  double frequency = 1.0;
};

SmoothFieldPtr make_smooth_field(const SmoothFieldSpec& spec);

/// Field given by arbitrary callables (used for solution snapshots).
class FunctionField final : public SmoothField {
 public:
  FunctionField(int dim, FieldFunction value, FieldFunction gradient)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)) {}
  int dim() const override { return dim_; }
  void value(std::span<const double> x, std::span<double> out) const override { value_(x, out); }
  void gradient(std::span<const double> x, std::span<double> out) const override { gradient_(x, out); }

 private:
  int dim_;
  FieldFunction value_;
  FieldFunction gradient_;
};

}  // namespace latlin
