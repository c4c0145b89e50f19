#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

#include "cg/solver.hpp"

namespace cg {

namespace {

constexpr double kEps = 1e-12;

bool optimal(const Matrix& m, const std::vector<double>& x, const std::vector<double>& y, double v) {
  size_t r = m.size(), c = m[0].size();
  for (size_t j = 0; j < c; ++j) {
    double s = 0;
    for (size_t i = 0; i < r; ++i) s += x[i] * m[i][j];
    if (s < v - 1e-10) return false;
  }
  for (size_t i = 0; i < r; ++i) {
    double s = 0;
    for (size_t j = 0; j < c; ++j) s += m[i][j] * y[j];
    if (s > v + 1e-10) return false;
  }
  return true;
}

void normalize(std::vector<double>& x) {
  double s = 0;
  for (auto& p : x) {
    p = std::max(p, 0.0);
    s += p;
  }
  for (auto& p : x) p /= s;
}

// Solves the square kernel on rows I, columns J: equalizing mixes and value.
bool kernel(const Matrix& m, const std::vector<size_t>& I, const std::vector<size_t>& J, MatrixSolution& out) {
  size_t k = I.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = 0; b < k; ++b) {
      A(a, b) = m[I[a]][J[b]];  // column mix y: sum_b M[a][b] y_b = v
      B(b, a) = m[I[a]][J[b]];  // row mix x: sum_a x_a M[a][b] = v
    }
    A(a, k) = -1;
    B(a, k) = -1;
    A(k, a) = 1;
    B(k, a) = 1;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs[k] = 1;
  Eigen::FullPivLU<Eigen::MatrixXd> la(A), lb(B);
  if (!la.isInvertible() || !lb.isInvertible()) return false;
  Eigen::VectorXd y = la.solve(rhs), x = lb.solve(rhs);
  for (size_t a = 0; a < k; ++a)
    if (x[a] < -kEps || y[a] < -kEps) return false;
  std::vector<double> row(m.size(), 0.0), col(m[0].size(), 0.0);
  for (size_t a = 0; a < k; ++a) {
    row[I[a]] = x[a];
    col[J[a]] = y[a];
  }
  normalize(row);
  normalize(col);
  double v = 0.5 * (x[k] + y[k]);
  if (!optimal(m, row, col, v)) return false;
  out = {std::clamp(v, 0.0, 1.0), std::move(row), std::move(col)};
  return true;
}

void subsets(size_t n, size_t k, std::vector<std::vector<size_t>>& out) {
  std::vector<size_t> cur;
  std::function<void(size_t)> rec = [&](size_t from) {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (size_t i = from; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

}  // namespace

MatrixSolution matrix_game_value(const Matrix& m) {
  if (m.empty() || m[0].empty()) throw std::invalid_argument("matrix_game_value: empty matrix");
  size_t r = m.size(), c = m[0].size();
  if (r > 4 || c > 4) throw std::invalid_argument("matrix_game_value: larger than 4x4");
  for (const auto& row : m) {
    if (row.size() != c) throw std::invalid_argument("matrix_game_value: ragged matrix");
    for (double x : row)
      if (!(x >= -kEps && x <= 1 + kEps)) throw std::invalid_argument("matrix_game_value: entry outside [0,1]");
  }
  MatrixSolution sol;
  if (c == 1) {
    size_t best = 0;
    for (size_t i = 1; i < r; ++i)
      if (m[i][0] > m[best][0]) best = i;
    sol.value = m[best][0];
    sol.row.assign(r, 0.0);
    sol.row[best] = 1;
    sol.col = {1.0};
    return sol;
  }
  if (r == 1) {
    size_t best = 0;
    for (size_t j = 1; j < c; ++j)
      if (m[0][j] < m[0][best]) best = j;
    sol.value = m[0][best];
    sol.col.assign(c, 0.0);
    sol.col[best] = 1;
    sol.row = {1.0};
    return sol;
  }
  // Pure saddle points first.
  for (size_t i = 0; i < r; ++i) {
    double rowmin = *std::min_element(m[i].begin(), m[i].end());
    for (size_t j = 0; j < c; ++j) {
      if (m[i][j] != rowmin) continue;
      bool colmax = true;
      for (size_t k = 0; k < r && colmax; ++k) colmax = m[k][j] <= m[i][j];
      if (colmax) {
        sol.value = m[i][j];
        sol.row.assign(r, 0.0);
        sol.col.assign(c, 0.0);
        sol.row[i] = 1;
        sol.col[j] = 1;
        return sol;
      }
    }
  }
  if (r == 2 && c == 2) {
    double a = m[0][0], b = m[0][1], cc = m[1][0], d = m[1][1];
    double den = a - b - cc + d;
    // No saddle point, so den != 0 and both solutions are interior.
    double p = (d - cc) / den, q = (d - b) / den;
    sol.value = std::clamp((a * d - b * cc) / den, 0.0, 1.0);
    sol.row = {std::clamp(p, 0.0, 1.0), std::clamp(1 - p, 0.0, 1.0)};
    sol.col = {std::clamp(q, 0.0, 1.0), std::clamp(1 - q, 0.0, 1.0)};
    return sol;
  }
  // Every extreme optimal pair lives on a nonsingular square kernel.
  for (size_t k = 2; k <= std::min(r, c); ++k) {
    std::vector<std::vector<size_t>> rs, cs;
    subsets(r, k, rs);
    subsets(c, k, cs);
    for (const auto& I : rs)
      for (const auto& J : cs)
        if (kernel(m, I, J, sol)) return sol;
  }
  throw std::runtime_error("matrix_game_value: no kernel found (numerical degeneracy)");
}

}  // namespace cg
