#include "gkbm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gkbm {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string trim_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Kernel Kernel::indicator(double kappa) {
  require(kappa > 0.0 && std::isfinite(kappa), "Kernel: kappa must be finite and > 0");
  Kernel k;
  k.shape_ = KernelShape::indicator;
  k.kappa_ = kappa;
  k.epsilon_ = 1.0;
  return k;
}

Kernel Kernel::triangular(double kappa) {
  require(kappa > 0.0 && std::isfinite(kappa), "Kernel: kappa must be finite and > 0");
  Kernel k;
  k.shape_ = KernelShape::triangular;
  k.kappa_ = kappa;
  // Grid infimum over [0, kappa]; the endpoint x = kappa gives exactly 0.
  k.epsilon_ = 0.0;
  return k;
}

Kernel Kernel::truncated_exponential(double rate, double kappa) {
  require(kappa > 0.0 && std::isfinite(kappa), "Kernel: kappa must be finite and > 0");
  require(rate >= 0.0 && std::isfinite(rate), "Kernel: rate must be finite and >= 0");
  Kernel k;
  k.shape_ = KernelShape::truncated_exponential;
  k.kappa_ = kappa;
  k.rate_ = rate;
  // phi decreasing, so the grid infimum is attained at the right endpoint.
  k.epsilon_ = std::exp(-rate * kappa);
  return k;
}

Kernel Kernel::piecewise_constant(std::vector<KernelPiece> pieces) {
  require(!pieces.empty(), "Kernel: pwc needs at least one piece");
  std::sort(pieces.begin(), pieces.end(),
            [](const KernelPiece& a, const KernelPiece& b) { return a.left < b.left; });
  double prev_right = 0.0;
  bool covers = true;
  double min_level = 1.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const KernelPiece& piece = pieces[i];
    require(piece.left >= 0.0 && piece.right > piece.left, "Kernel: pwc piece must have 0 <= left < right");
    require(piece.level >= 0.0 && piece.level <= 1.0, "Kernel: pwc level must be in [0, 1]");
    require(i == 0 || piece.left >= pieces[i - 1].right, "Kernel: pwc pieces must be disjoint");
    if (piece.left > prev_right + 1e-15) covers = false;
    prev_right = piece.right;
    min_level = std::min(min_level, piece.level);
  }
  require(pieces.back().level > 0.0, "Kernel: last pwc piece must have level > 0 (it defines kappa)");
  Kernel k;
  k.shape_ = KernelShape::piecewise_constant;
  k.kappa_ = pieces.back().right;
  k.pieces_ = std::move(pieces);
  if (k.pieces_.front().left > 0.0) covers = false;
  k.epsilon_ = covers ? min_level : 0.0;
  return k;
}

Kernel Kernel::with_epsilon(double epsilon) const {
  require(epsilon >= 0.0 && epsilon <= 1.0, "Kernel: epsilon override must be in [0, 1]");
  Kernel k = *this;
  k.epsilon_ = epsilon;
  return k;
}

double Kernel::operator()(double x) const {
  if (x < 0.0) throw std::invalid_argument("Kernel: eval requires x >= 0");
  if (x > kappa_) return 0.0;
  switch (shape_) {
    case KernelShape::indicator:
      return 1.0;
    case KernelShape::triangular:
      return 1.0 - x / kappa_;
    case KernelShape::truncated_exponential:
      return std::exp(-rate_ * x);
    case KernelShape::piecewise_constant:
      for (const KernelPiece& piece : pieces_) {
        if (x >= piece.left && x < piece.right) return piece.level;
      }
      // x == kappa (or a piece's closed right end at the support boundary).
      if (x == pieces_.back().right) return pieces_.back().level;
      return 0.0;
  }
  return 0.0;
}

std::vector<double> Kernel::breakpoints() const {
  std::vector<double> pts{0.0, kappa_};
  if (shape_ == KernelShape::piecewise_constant) {
    for (const KernelPiece& piece : pieces_) {
      pts.push_back(piece.left);
      pts.push_back(piece.right);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double Kernel::infimum_on(double a, double b) const {
  a = std::max(a, 0.0);
  b = std::min(b, kappa_);
  if (b < a) return 0.0;
  switch (shape_) {
    case KernelShape::indicator:
      return 1.0;
    case KernelShape::triangular:
      return 1.0 - b / kappa_;
    case KernelShape::truncated_exponential:
      return std::exp(-rate_ * b);
    case KernelShape::piecewise_constant: {
      double inf = 1.0;
      double covered = a;
      for (const KernelPiece& piece : pieces_) {
        if (piece.right <= a || piece.left >= b) {
          if (piece.left >= b) break;
          continue;
        }
        if (piece.left > covered + 1e-15) return 0.0;  // gap inside [a, b]
        covered = std::max(covered, piece.right);
        inf = std::min(inf, piece.level);
      }
      if (covered < b - 1e-15) return 0.0;
      return inf;
    }
  }
  return 0.0;
}

std::string Kernel::describe() const {
  switch (shape_) {
    case KernelShape::indicator:
      return "indicator(" + trim_number(kappa_) + ")";
    case KernelShape::triangular:
      return "triangular(" + trim_number(kappa_) + ")";
    case KernelShape::truncated_exponential:
      return "texp(" + trim_number(rate_) + ";" + trim_number(kappa_) + ")";
    case KernelShape::piecewise_constant:
      return "pwc(" + std::to_string(pieces_.size()) + ")";
  }
  return "kernel";
}

double SimpleApproximation::Level::volume() const {
  double v = 0.0;
  for (const auto& [l, r] : intervals) v += r - l;
  return v;
}

double SimpleApproximation::operator()(double x) const {
  if (x < 0.0 || x > kappa) return 0.0;
  for (const Level& level : levels) {
    for (const auto& [l, r] : level.intervals) {
      if ((x >= l && x < r) || (x == kappa && r == kappa)) return level.value;
    }
  }
  return 0.0;
}

SimpleApproximation approximate(const Kernel& kernel, int ell) {
  if (ell < 1) throw std::invalid_argument("approximate: ell must be >= 1");

  // (level, interval) ladder covering [0, kappa].
  std::vector<KernelPiece> ladder;
  if (kernel.shape() == KernelShape::indicator) {
    ladder.push_back({0.0, kernel.kappa(), 1.0});
  } else if (kernel.shape() == KernelShape::piecewise_constant &&
             static_cast<int>(kernel.pieces().size()) <= ell) {
    // Already simple: the kernel approximates itself exactly.
    double covered = 0.0;
    for (const KernelPiece& piece : kernel.pieces()) {
      if (piece.left > covered) ladder.push_back({covered, piece.left, 0.0});
      ladder.push_back(piece);
      covered = piece.right;
    }
  } else {
    const double step = kernel.kappa() / ell;
    for (int i = 0; i < ell; ++i) {
      const double left = step * i;
      const double right = (i + 1 == ell) ? kernel.kappa() : step * (i + 1);
      ladder.push_back({left, right, kernel.infimum_on(left, right)});
    }
  }

  SimpleApproximation approx;
  approx.ell = ell;
  approx.kappa = kernel.kappa();
  for (const KernelPiece& piece : ladder) {
    auto it = std::find_if(approx.levels.begin(), approx.levels.end(),
                           [&](const SimpleApproximation::Level& lv) {
                             return lv.value == piece.level;
                           });
    if (it == approx.levels.end()) {
      approx.levels.push_back({piece.level, {{piece.left, piece.right}}});
    } else {
      it->intervals.emplace_back(piece.left, piece.right);
    }
  }

  // Sup-norm error per ladder interval: the smooth shapes are decreasing,
  // so the supremum sits at the left endpoint; for pwc it is the largest
  // overlapping level. Exact 0 on the self-representation path.
  double err = 0.0;
  if (!(kernel.shape() == KernelShape::indicator ||
        (kernel.shape() == KernelShape::piecewise_constant &&
         static_cast<int>(kernel.pieces().size()) <= ell))) {
    for (const KernelPiece& piece : ladder) {
      double sup = 0.0;
      if (kernel.shape() == KernelShape::piecewise_constant) {
        for (const KernelPiece& kp : kernel.pieces()) {
          if (kp.right > piece.left && kp.left < piece.right)
            sup = std::max(sup, kp.level);
        }
      } else {
        sup = kernel(piece.left);
      }
      err = std::max(err, sup - piece.level);
    }
  }
  approx.sup_error = err;
  return approx;
}

double psi_n(const Kernel& kernel, int n, TorusPoint x, TorusPoint y) {
  if (n < 3) throw std::invalid_argument("psi_n: n must be >= 3");
  const double scale = n / std::log(static_cast<double>(n));
  return kernel(scale * torus_distance(x, y));
}

double scaled_support_radius(const Kernel& kernel, int n) {
  if (n < 3) throw std::invalid_argument("scaled_support_radius: n must be >= 3");
  return kernel.kappa() * std::log(static_cast<double>(n)) / n;
}

}  // namespace gkbm
