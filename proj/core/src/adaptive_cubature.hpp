#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature over intervals and
// rectangles, specialised to the three real moments the coherence quotient
// needs: the PSD integral and the real and imaginary CPSD integrals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace decaycoh::detail {

struct Moments {
  double den = 0.0;
  double num_re = 0.0;
  double num_im = 0.0;

  Moments& operator+=(const Moments& o) {
    den += o.den;
    num_re += o.num_re;
    num_im += o.num_im;
    return *this;
  }
  friend Moments operator-(Moments a, const Moments& b) {
    return {a.den - b.den, a.num_re - b.num_re, a.num_im - b.num_im};
  }
  friend Moments operator*(double s, Moments a) {
    return {s * a.den, s * a.num_re, s * a.num_im};
  }
  // |delta den| + |delta num| bounds the quotient error times den when |value| <= 1.
  double error_norm() const { return std::abs(den) + std::hypot(num_re, num_im); }
};

// Abscissae in descending order; the 15-point rule uses +-x and 0.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::size_t kRuleSize = 15;

struct RuleWeights {
  std::array<double, kRuleSize> offsets{};  // abscissae on [-1, 1]
  std::array<double, kRuleSize> kronrod{};
  std::array<double, kRuleSize> gauss{};  // zero at Kronrod-only nodes
};

inline const RuleWeights& rule_weights() {
  static const RuleWeights rule = [] {
    RuleWeights r;
    for (std::size_t i = 0; i < 7; ++i) {
      r.offsets[i] = -kKronrodNodes[i];
      r.offsets[14 - i] = kKronrodNodes[i];
      r.kronrod[i] = r.kronrod[14 - i] = kKronrodWeights[i];
      if (i % 2 == 1) r.gauss[i] = r.gauss[14 - i] = kGaussWeights[i / 2];
    }
    r.offsets[7] = 0.0;
    r.kronrod[7] = kKronrodWeights[7];
    r.gauss[7] = kGaussWeights[3];
    return r;
  }();
  return rule;
}

struct AdaptiveOutcome {
  Moments integral;
  double error = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

// Kernel concept for integrate_rectangles:
//   using AxisA = ...; AxisA prepare_a(double a) const;
//   using AxisB = ...; AxisB prepare_b(double b) const;
//   Moments operator()(const AxisA&, const AxisB&) const;
// The per-axis preparation lets the kernel hoist trigonometry out of the
// 15 x 15 node loop.
template <class Kernel>
class RectangleIntegrator {
 public:
  RectangleIntegrator(const Kernel& kernel, double tolerance, std::size_t max_panels)
      : kernel_(kernel), tolerance_(tolerance), max_panels_(max_panels) {}

  AdaptiveOutcome run(std::span<const double> breaks_a, std::span<const double> breaks_b) {
    panels_.clear();
    for (std::size_t i = 0; i + 1 < breaks_a.size(); ++i) {
      for (std::size_t j = 0; j + 1 < breaks_b.size(); ++j) {
        push(evaluate(breaks_a[i], breaks_a[i + 1], breaks_b[j], breaks_b[j + 1]));
      }
    }
    std::size_t since_resum = 0;
    while (true) {
      if (++since_resum == 512) {
        resum();
        since_resum = 0;
      }
      if (running_error_ <= tolerance_ * std::abs(running_.den)) break;
      if (panels_.size() + 1 > max_panels_) break;
      const std::size_t worst = queue_.top().index;
      queue_.pop();
      const Panel p = panels_[worst];
      running_ += -1.0 * p.value;
      running_error_ -= p.error();
      Panel lo, hi;
      if (p.error_a >= p.error_b) {
        const double mid = 0.5 * (p.a0 + p.a1);
        lo = evaluate(p.a0, mid, p.b0, p.b1);
        hi = evaluate(mid, p.a1, p.b0, p.b1);
      } else {
        const double mid = 0.5 * (p.b0 + p.b1);
        lo = evaluate(p.a0, p.a1, p.b0, mid);
        hi = evaluate(p.a0, p.a1, mid, p.b1);
      }
      replace(worst, lo);
      push(hi);
    }
    resum();
    AdaptiveOutcome out;
    out.integral = running_;
    out.error = running_error_;
    out.panels = panels_.size();
    out.converged = running_error_ <= tolerance_ * std::abs(running_.den);
    return out;
  }

 private:
  struct Panel {
    double a0, a1, b0, b1;
    Moments value;
    double error_a = 0.0;
    double error_b = 0.0;
    double error() const { return error_a + error_b; }
  };
  struct Entry {
    double error;
    std::size_t index;
    bool operator<(const Entry& o) const { return error < o.error; }
  };

  Panel evaluate(double a0, double a1, double b0, double b1) const {
    const auto& rule = rule_weights();
    const double ca = 0.5 * (a0 + a1), ha = 0.5 * (a1 - a0);
    const double cb = 0.5 * (b0 + b1), hb = 0.5 * (b1 - b0);
    std::array<typename Kernel::AxisB, kRuleSize> axis_b;
    for (std::size_t j = 0; j < kRuleSize; ++j) {
      axis_b[j] = kernel_.prepare_b(cb + hb * rule.offsets[j]);
    }
    Moments kk, gk, kg;  // (a rule, b rule)
    for (std::size_t i = 0; i < kRuleSize; ++i) {
      const auto axis_a = kernel_.prepare_a(ca + ha * rule.offsets[i]);
      Moments row_k, row_g;
      for (std::size_t j = 0; j < kRuleSize; ++j) {
        const Moments f = kernel_(axis_a, axis_b[j]);
        row_k += rule.kronrod[j] * f;
        if (rule.gauss[j] != 0.0) row_g += rule.gauss[j] * f;
      }
      kk += rule.kronrod[i] * row_k;
      kg += rule.kronrod[i] * row_g;
      if (rule.gauss[i] != 0.0) gk += rule.gauss[i] * row_k;
    }
    const double area = ha * hb;
    Panel p{a0, a1, b0, b1, area * kk};
    p.error_a = area * (kk - gk).error_norm();
    p.error_b = area * (kk - kg).error_norm();
    return p;
  }

  void push(const Panel& p) {
    panels_.push_back(p);
    queue_.push({p.error(), panels_.size() - 1});
    running_ += p.value;
    running_error_ += p.error();
  }

  void replace(std::size_t index, const Panel& p) {
    panels_[index] = p;
    queue_.push({p.error(), index});
    running_ += p.value;
    running_error_ += p.error();
  }

  // Sum in panel order so the result is independent of refinement history
  // drift in the running totals.
  void resum() {
    running_ = {};
    running_error_ = 0.0;
    for (const auto& p : panels_) {
      running_ += p.value;
      running_error_ += p.error();
    }
  }

  const Kernel& kernel_;
  double tolerance_;
  std::size_t max_panels_;
  std::vector<Panel> panels_;
  std::priority_queue<Entry> queue_;
  Moments running_;
  double running_error_ = 0.0;
};

// One-dimensional counterpart. Kernel: `Moments operator()(double) const`.
template <class Kernel>
AdaptiveOutcome integrate_intervals(const Kernel& kernel, std::span<const double> breaks,
                                    double tolerance, std::size_t max_panels) {
  struct Piece {
    double a, b;
    Moments value;
    double error;
  };
  const auto& rule = rule_weights();
  auto evaluate = [&](double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Moments k, g;
    for (std::size_t i = 0; i < kRuleSize; ++i) {
      const Moments f = kernel(c + h * rule.offsets[i]);
      k += rule.kronrod[i] * f;
      if (rule.gauss[i] != 0.0) g += rule.gauss[i] * f;
    }
    return Piece{a, b, h * k, h * (k - g).error_norm()};
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    pieces.push_back(evaluate(breaks[i], breaks[i + 1]));
  }
  auto totals = [&] {
    AdaptiveOutcome out;
    for (const auto& p : pieces) {
      out.integral += p.value;
      out.error += p.error;
    }
    out.panels = pieces.size();
    out.converged = out.error <= tolerance * std::abs(out.integral.den);
    return out;
  };
  while (true) {
    AdaptiveOutcome current = totals();
    if (current.converged || pieces.size() + 1 > max_panels) return current;
    auto worst = std::max_element(pieces.begin(), pieces.end(),
                                  [](const Piece& x, const Piece& y) { return x.error < y.error; });
    const double mid = 0.5 * (worst->a + worst->b);
    const Piece hi = evaluate(mid, worst->b);
    *worst = evaluate(worst->a, mid);
    pieces.push_back(hi);
  }
}

}  // namespace decaycoh::detail
