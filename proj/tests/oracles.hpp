// Closed-form reference values written out by hand, independent of the
// library's own construction paths.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;
inline const cd I{0.0, 1.0};

inline M2 id2() { return M2::Identity(); }
inline M2 s1() { M2 m; m << 0, 1, 1, 0; return m; }
inline M2 s2() { M2 m; m << 0, -I, I, 0; return m; }
inline M2 s3() { M2 m; m << 1, 0, 0, -1; return m; }
inline M2 sig(int j) { return j == 1 ? s1() : (j == 2 ? s2() : s3()); }

inline M4 kron2(const M2& a, const M2& b) {
  M4 out;
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) out(2 * r + x, 2 * s + y) = a(r, s) * b(x, y);
  return out;
}

inline M2 bloch(double a1, double a2, double a3) {
  return 0.5 * (id2() + a1 * s1() + a2 * s2() + a3 * s3());
}

// exp(-i wt sum sigma(x)sigma) from its spectral projectors: the sum has
// eigenvalue 1 on the triplet and -3 on the singlet.
inline M4 heisenberg(double wt) {
  M4 h = kron2(s1(), s1()) + kron2(s2(), s2()) + kron2(s3(), s3());
  M4 singlet = 0.25 * (M4::Identity() - h);
  M4 triplet = M4::Identity() - singlet;
  return std::exp(-I * wt) * triplet + std::exp(3.0 * I * wt) * singlet;
}

// Stochastic process map, C = cos(2wt).
inline M4 lambda_s(double x) {
  const double c = std::cos(x);
  M4 m;
  m << 1 + c * c, 0, 0, 2 * c * c,
       0, 1 - c * c, 0, 0,
       0, 0, 1 - c * c, 0,
       2 * c * c, 0, 0, 1 + c * c;
  return 0.5 * m;
}

// Multiple-pin process map.
inline M4 lambda_ms(double x) {
  const double c = std::cos(x), s = std::sin(x);
  const double cc = c * c, ss = s * s;
  M4 m;
  m << 1 + cc, -(1.0 + I) * ss, 0, 2 * cc,
       -(1.0 - I) * ss, 1 - cc + 2 * ss, 0, 0,
       0, 0, 1 - cc, (1.0 + I) * ss,
       2 * cc, 0, (1.0 - I) * ss, 1 + cc - 2 * ss;
  return 0.5 * m;
}

// Projective process map with effective correlation cp = c23 / (1 + a2).
inline M4 lambda_p(double x, double cp) {
  const double c = std::cos(x), s = std::sin(x);
  M4 m;
  m << 1 + c * c, I * cp * s * s, 0, 2 * c * c - I * cp * c * s,
       -I * cp * s * s, 1 - c * c, I * cp * c * s, 0,
       0, -I * cp * c * s, 1 - c * c, -I * cp * s * s,
       2 * c * c + I * cp * c * s, 0, I * cp * s * s, 1 + c * c;
  return 0.5 * m;
}

// Dynamical map of the correlated two-qubit family (only c23 set).
inline M4 dynamical_map(double x, double c23) {
  const double c = std::cos(x), s = std::sin(x);
  const double k = -c23 * c * s;
  M4 m;
  m << 1 + c * c, 0, k, 2 * c * c,
       0, 1 - c * c, 0, k,
       k, 0, 1 - c * c, 0,
       2 * c * c, k, 0, 1 + c * c;
  return 0.5 * m;
}

// Eigenvalues of dynamical_map, unsorted.
inline Eigen::Vector4d dynamical_eigenvalues(double x, double c23) {
  const double c = std::cos(x), s = std::sin(x);
  const double root = std::sqrt(4 * c * c + c23 * c23 * s * s);
  Eigen::Vector4d v;
  v << 0.5 * (1 - c * c + c23 * c * s), 0.5 * (1 - c * c - c23 * c * s),
      0.5 * (1 + c * c + c * root), 0.5 * (1 + c * c - c * root);
  return v;
}

// Pure preparation set P(1,-), P(1,+), P(2,+), P(3,+) of radius p.
inline std::array<M2, 4> prj_inputs(double p = 1.0) {
  return {bloch(-p, 0, 0), bloch(p, 0, 0), bloch(0, p, 0), bloch(0, 0, p)};
}

inline std::array<M2, 4> prj_duals(double p = 1.0) {
  return {(0.5 / p) * (p * id2() - s1() - s2() - s3()), (0.5 / p) * (p * id2() + s1() - s2() - s3()),
          s2() / p, s3() / p};
}

inline std::vector<double> grid(int n = 400) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(2.0 * std::numbers::pi * i / (n - 1));
  return xs;
}

template <typename A, typename B>
double maxdiff(const A& a, const B& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace oracle
