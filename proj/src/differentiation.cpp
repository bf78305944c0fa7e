#include "kasnerlab/differentiation.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <tuple>

namespace kasnerlab {

namespace {

using Weights = std::vector<double>;

Weights spectral_weights(int n, int order, bool dealias) {
  const double pi = std::numbers::pi;
  const int half = n / 2;
  const double cutoff = dealias ? n / 3.0 : static_cast<double>(half);
  Weights w(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    // pair (kappa, -kappa): 2 Re[(2 pi i kappa)^m e^{-2 pi i kappa k / n}]
    long double acc = 0.0L;
    for (int kappa = 1; kappa < half; ++kappa) {
      if (kappa > cutoff) break;
      const double theta = 2.0 * pi * static_cast<double>(kappa) * k / n;
      acc += 2.0L * std::pow(2.0L * pi * kappa, order) * std::cos(theta - order * pi / 2.0);
    }
    if (order % 2 == 0 && half <= cutoff) {
      const long double sign = ((order / 2) % 2 == 0 ? 1.0L : -1.0L) * (k % 2 == 0 ? 1.0L : -1.0L);
      acc += sign * std::pow(static_cast<long double>(pi) * n, order);
    }
    w[static_cast<std::size_t>(k)] = static_cast<double>(acc / n);
  }
  return w;
}

Weights convolve(const Weights& a, const Weights& b) {
  const int n = static_cast<int>(a.size());
  Weights c(static_cast<std::size_t>(n), 0.0);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      c[static_cast<std::size_t>(m)] += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(((m - k) % n + n) % n)];
  return c;
}

Weights fd4_weights(int n, int order) {
  const double h = 1.0 / n;
  Weights first(static_cast<std::size_t>(n), 0.0);
  Weights second(static_cast<std::size_t>(n), 0.0);
  auto at = [n](Weights& w, int offset) -> double& { return w[static_cast<std::size_t>((offset % n + n) % n)]; };
  at(first, 1) = 2.0 / 3.0 / h;
  at(first, -1) = -2.0 / 3.0 / h;
  at(first, 2) = -1.0 / 12.0 / h;
  at(first, -2) = 1.0 / 12.0 / h;
  at(second, 0) = -2.5 / (h * h);
  at(second, 1) = 4.0 / 3.0 / (h * h);
  at(second, -1) = 4.0 / 3.0 / (h * h);
  at(second, 2) = -1.0 / 12.0 / (h * h);
  at(second, -2) = -1.0 / 12.0 / (h * h);
  Weights w(static_cast<std::size_t>(n), 0.0);
  w[0] = 1.0;
  for (int i = 0; i < order / 2; ++i) w = convolve(w, second);
  if (order % 2 == 1) w = convolve(w, first);
  return w;
}

}  // namespace

const std::vector<double>& derivative_weights(int n, int order, DerivativeScheme scheme, bool dealias) {
  if (order < 0 || order > kMaxDerivativeOrder)
    throw ConfigError("derivative order must lie in 0.." + std::to_string(kMaxDerivativeOrder));
  if (n < 1) throw ConfigError("derivative needs at least one point");
  using Key = std::tuple<int, int, DerivativeScheme, bool>;
  thread_local std::map<Key, Weights> cache;
  const bool use_dealias = scheme == DerivativeScheme::spectral && dealias;
  const Key key{n, order, scheme, use_dealias};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Weights w;
  if (order == 0) {
    w.assign(static_cast<std::size_t>(n), 0.0);
    w[0] = 1.0;
  } else if (scheme == DerivativeScheme::spectral) {
    w = spectral_weights(n, order, use_dealias);
  } else {
    w = fd4_weights(n, order);
  }
  return cache.emplace(key, std::move(w)).first->second;
}

Eigen::MatrixXd derivative_matrix(int n, int order, DerivativeScheme scheme, bool dealias) {
  const auto& w = derivative_weights(n, order, scheme, dealias);
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(j, (j + i) % n) = w[static_cast<std::size_t>(i)];
  return m;
}

Eigen::VectorXcd derivative_symbol(int n, int order, DerivativeScheme scheme, bool dealias) {
  const auto& w = derivative_weights(n, order, scheme, dealias);
  Eigen::VectorXcd s(n);
  for (int kappa = 0; kappa < n; ++kappa) {
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < n; ++k)
      acc += w[static_cast<std::size_t>(k)] * std::polar(1.0, 2.0 * std::numbers::pi * kappa * k / n);
    s(kappa) = acc;
  }
  return s;
}

std::vector<std::vector<int>> multi_indices(int num_axes, int order) {
  std::vector<std::vector<int>> out;
  if (num_axes == 0) {
    if (order == 0) out.emplace_back();
    return out;
  }
  std::vector<int> cur(static_cast<std::size_t>(num_axes), 0);
  auto rec = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == num_axes - 1) {
      cur[static_cast<std::size_t>(axis)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      cur[static_cast<std::size_t>(axis)] = c;
      self(self, axis + 1, remaining - c);
    }
  };
  rec(rec, 0, order);
  return out;
}

}  // namespace kasnerlab
