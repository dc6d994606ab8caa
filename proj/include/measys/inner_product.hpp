#pragma once

#include <algorithm>

#include "measys/coefficients.hpp"
#include "measys/function.hpp"
#include "measys/linalg.hpp"

namespace measys {

/// <u, v> = integral of u^* w v over the open window shared by u and v.
///
/// The window is cut at every knot of u, v and w. On each piece both factors
/// have a closed LocalForm, so the density part is a Van Loan Gramian; atoms of
/// w inside the window add u_bal^* dw v_bal. Conjugate-linear in u.
template <WindowFunction U, WindowFunction V>
Complex inner_product(const MeasureMatrix& w, const U& u, const V& v) {
  const Window window = u.window();
  if (!(window == v.window())) throw Error(ErrorKind::window_mismatch, "inner product: windows differ");
  const auto n = u.dim();
  if (v.dim() != n || w.dim() != n) throw Error(ErrorKind::dimension_mismatch, "inner product: dimensions differ");
  if (window.lo < w.interval().lo || window.hi > w.interval().hi) {
    throw Error(ErrorKind::window_mismatch, "inner product: window leaves the interval of w");
  }

  std::vector<double> positions = u.knots();
  const auto vk = v.knots();
  positions.insert(positions.end(), vk.begin(), vk.end());
  positions.insert(positions.end(), w.breakpoints().begin(), w.breakpoints().end());
  for (const auto& atom : w.atoms()) positions.push_back(atom.x);
  const auto cuts = merge_knots(window, std::move(positions));

  Complex acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double s = cuts[k];
    const double e = cuts[k + 1];
    const Matrix& w0 = w.density_at(0.5 * (s + e));
    if (w0.isZero(0.0)) continue;
    const LocalForm fu = u.local_form(s, e);
    const LocalForm fv = v.local_form(s, e);
    Matrix gram = Matrix::Zero(fu.state.size(), fv.state.size());
    gram.topLeftCorner(n, n) = w0;
    acc += fu.state.dot(expm_gramian(fu.generator, gram, fv.generator, e - s) * fv.state);
  }
  for (const auto& atom : w.atoms()) {
    if (!window.contains_open(atom.x)) continue;
    acc += u.value(atom.x, Side::balanced).dot(atom.mass * v.value(atom.x, Side::balanced));
  }
  return acc;
}

/// <u, u>, clamped at zero against rounding.
template <WindowFunction U>
double norm_squared(const MeasureMatrix& w, const U& u) {
  return std::max(0.0, inner_product(w, u, u).real());
}

}  // namespace measys
