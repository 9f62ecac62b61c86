#include "slabmn/linalg.hpp"

#include <cmath>

namespace slabmn {

namespace {

SolveStatus classify_pivot(double p) {
  if (p <= 0.0)
    return SolveStatus::not_positive_definite;
  if (p <= kPivotFloor)
    return SolveStatus::numerically_singular;
  return SolveStatus::ok;
}

} // namespace

FactorOutcome cholesky_factor_dense(const Vec& h, int n) {
  FactorOutcome out;
  out.l.assign(static_cast<std::size_t>(n) * n, 0.0);
  Vec& l = out.l;
  for (int j = 0; j < n; ++j) {
    double d = h[j * n + j];
    for (int k = 0; k < j; ++k)
      d -= l[j * n + k] * l[j * n + k];
    if (auto s = classify_pivot(d); s != SolveStatus::ok) {
      out.status = s;
      return out;
    }
    l[j * n + j] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = h[i * n + j];
      for (int k = 0; k < j; ++k)
        s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
  return out;
}

Vec cholesky_solve_factored(const Vec& l, int n, const Vec& rhs) {
  Vec y(rhs);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k)
      y[i] -= l[i * n + k] * y[k];
    y[i] /= l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k)
      y[i] -= l[k * n + i] * y[k];
    y[i] /= l[i * n + i];
  }
  return y;
}

SpdSolveOutcome cholesky_solve_dense(const Vec& h, int n, const Vec& rhs) {
  SpdSolveOutcome out;
  FactorOutcome f = cholesky_factor_dense(h, n);
  if (!f.ok()) {
    out.status = f.status;
    return out;
  }
  out.x = cholesky_solve_factored(f.l, n, rhs);
  return out;
}

SpdSolveOutcome cholesky_solve_tridiagonal(const Vec& diag, const Vec& off,
                                           const Vec& rhs) {
  const int n = static_cast<int>(diag.size());
  SpdSolveOutcome out;
  Vec d(n), l(n > 0 ? n - 1 : 0);
  for (int i = 0; i < n; ++i) {
    double di = diag[i];
    if (i > 0)
      di -= l[i - 1] * l[i - 1] * d[i - 1];
    if (auto s = classify_pivot(di); s != SolveStatus::ok) {
      out.status = s;
      return out;
    }
    d[i] = di;
    if (i + 1 < n)
      l[i] = off[i] / di;
  }
  Vec x(rhs);
  for (int i = 1; i < n; ++i)
    x[i] -= l[i - 1] * x[i - 1];
  for (int i = 0; i < n; ++i)
    x[i] /= d[i];
  for (int i = n - 2; i >= 0; --i)
    x[i] -= l[i] * x[i + 1];
  out.x = std::move(x);
  return out;
}

SpdSolveOutcome cholesky_solve_blocks(const Vec& blocks, const Vec& rhs) {
  const int nb = static_cast<int>(blocks.size() / 3);
  SpdSolveOutcome out;
  out.x.resize(2 * nb);
  for (int j = 0; j < nb; ++j) {
    const double a = blocks[3 * j], b = blocks[3 * j + 1], c = blocks[3 * j + 2];
    if (auto s = classify_pivot(a); s != SolveStatus::ok) {
      out.status = s;
      out.x.clear();
      return out;
    }
    const double l11 = std::sqrt(a);
    const double l21 = b / l11;
    const double d2 = c - l21 * l21;
    if (auto s = classify_pivot(d2); s != SolveStatus::ok) {
      out.status = s;
      out.x.clear();
      return out;
    }
    const double l22 = std::sqrt(d2);
    const double y0 = rhs[2 * j] / l11;
    const double y1 = (rhs[2 * j + 1] - l21 * y0) / l22;
    const double x1 = y1 / l22;
    const double x0 = (y0 - l21 * x1) / l11;
    out.x[2 * j] = x0;
    out.x[2 * j + 1] = x1;
  }
  return out;
}

SpdSolveOutcome spd_solve(const HessianMatrix& h, const Vec& rhs) {
  switch (h.layout) {
  case HessianMatrix::Layout::dense:
    return cholesky_solve_dense(h.data, h.n, rhs);
  case HessianMatrix::Layout::tridiagonal: {
    Vec diag(h.data.begin(), h.data.begin() + h.n);
    Vec off(h.data.begin() + h.n, h.data.end());
    return cholesky_solve_tridiagonal(diag, off, rhs);
  }
  case HessianMatrix::Layout::diagonal: {
    SpdSolveOutcome out;
    out.x.resize(h.n);
    for (int i = 0; i < h.n; ++i) {
      if (auto s = classify_pivot(h.data[i]); s != SolveStatus::ok) {
        out.status = s;
        out.x.clear();
        return out;
      }
      out.x[i] = rhs[i] / h.data[i];
    }
    return out;
  }
  case HessianMatrix::Layout::block2x2:
    return cholesky_solve_blocks(h.data, rhs);
  }
  return {};
}

} // namespace slabmn
